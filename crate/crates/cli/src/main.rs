use std::io::{stderr, stdout};

fn main() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .target(env_logger::Target::Stderr)
        .init();
    let code = nvforce_cli::run(std::env::args_os(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}
