//! The four subcommands. Each writes its report to `out`, warnings to `err`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use nvforce::limits::log_grid;
use nvforce::sensor::phase_grid;
use nvforce::{
    difference_phase, exclusion_curve, fit_cosine, phase_cpmg, phase_spin_echo, phase_upper_bound,
    shape_factor_closed_form, shape_factor_quadrature, simulate_readout, Coupling, FitResult, SequenceKind,
    UncertaintyMode,
};

use crate::config::RunConfig;
use crate::csvio;
use crate::error::CliError;

/// The λ the headline bound is quoted at.
pub const REFERENCE_LAMBDA: f64 = 20e-6;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn report_io(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

pub fn cmd_curve(cfg: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<(), CliError> {
    cfg.validate()?;
    cfg.experiment.validate().map_err(|e| CliError::Config(vec![e.to_string()]))?;
    let grid = cfg.lambda_grid.values();
    let curve = exclusion_curve(&grid, &cfg.experiment, cfg.rel_tol)?;
    for gap in &curve.gaps {
        writeln!(err, "warning: no bound at lambda = {:e} m: {}", gap.lambda, gap.reason).map_err(report_io)?;
    }
    let path = PathBuf::from(&cfg.output);
    let dropped = csvio::write_curve(create(&path)?, &curve.points).map_err(|e| CliError::io(&path, e))?;
    if dropped > 0 {
        writeln!(err, "warning: {dropped} non-finite rows omitted").map_err(report_io)?;
    }
    match curve.nearest(REFERENCE_LAMBDA) {
        Some(p) => writeln!(
            out,
            "g_bound at lambda = {:.6e} m (m_a = {:.6e} eV): {:.6e}",
            p.lambda, p.alp_mass_ev, p.g_bound
        ),
        None => writeln!(err, "warning: curve has no finite points"),
    }
    .map_err(report_io)?;
    writeln!(out, "wrote {} rows to {}", curve.points.len() - dropped, path.display()).map_err(report_io)
}

/// Grid for the closed-form vs quadrature comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub lambdas: Vec<f64>,
    pub gaps: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            lambdas: log_grid(0.1e-6, 1e-3, 5),
            gaps: log_grid(0.05e-6, 10e-6, 5),
            radii: vec![100e-6, 300e-6, 500e-6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub max_deviation: f64,
    pub threshold: f64,
    /// (λ, R, d) at the largest deviation.
    pub worst: (f64, f64, f64),
    pub evaluated: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.threshold
    }
}

/// Compare closed form against quadrature. `corrupt` scales the closed form
/// (harness sanity hook; `None` in normal use).
pub fn verify_shape_factor(grid: &VerifyGrid, rel_tol: f64, corrupt: Option<f64>) -> Result<VerifyReport, CliError> {
    let quad_tol = rel_tol.clamp(1e-10, 1e-3);
    let mut triples = Vec::new();
    for &l in &grid.lambdas {
        for &r in &grid.radii {
            for &d in &grid.gaps {
                triples.push((l, r, d));
            }
        }
    }
    if triples.is_empty() {
        return Err(CliError::Config(vec!["verification grid is empty".into()]));
    }
    let devs = triples
        .par_iter()
        .map(|&(l, r, d)| {
            let closed = shape_factor_closed_form(l, r, d)?.value * corrupt.unwrap_or(1.0);
            let quad = match shape_factor_quadrature(l, r, d, quad_tol) {
                Ok(q) => q.value,
                Err(nvforce::Error::Convergence { best, .. }) => best,
                Err(e) => return Err(e),
            };
            let dev = if closed == quad { 0.0 } else { (closed - quad).abs() / quad.abs().max(closed.abs()) };
            Ok(dev)
        })
        .collect::<Result<Vec<f64>, nvforce::Error>>()?;
    let (i, &max_deviation) = devs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    Ok(VerifyReport {
        max_deviation,
        threshold: rel_tol.max(1e-6),
        worst: triples[i],
        evaluated: devs.len(),
    })
}

pub fn cmd_verify(
    grid: &VerifyGrid,
    rel_tol: f64,
    corrupt: Option<f64>,
    out: &mut (dyn Write + Send),
) -> Result<VerifyReport, CliError> {
    let rep = verify_shape_factor(grid, rel_tol, corrupt)?;
    let (l, r, d) = rep.worst;
    writeln!(
        out,
        "max relative deviation {:.3e} over {} points (threshold {:.1e}); worst at lambda = {:e} m, R = {:e} m, d = {:e} m",
        rep.max_deviation, rep.evaluated, rep.threshold, l, r, d
    )
    .map_err(report_io)?;
    if rep.passed() {
        Ok(rep)
    } else {
        Err(CliError::Verification(format!(
            "deviation {:.3e} > {:.1e} at (lambda, R, d) = ({l:e}, {r:e}, {d:e}) m",
            rep.max_deviation, rep.threshold
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSource {
    Phase(f64),
    /// Coupling g evaluated at force range λ (m).
    Coupling { g: f64, lambda: f64 },
}

/// True phase implied by `source` under the configured experiment.
pub fn resolve_phase(cfg: &RunConfig, source: PhaseSource) -> Result<f64, CliError> {
    match source {
        PhaseSource::Phase(phi) if phi.is_finite() => Ok(phi),
        PhaseSource::Phase(phi) => Err(CliError::Usage(format!("phi_true must be finite (got {phi})"))),
        PhaseSource::Coupling { g, lambda } => {
            let e = &cfg.experiment;
            let g = Coupling::new(g)?;
            let phi = match e.seq.kind {
                SequenceKind::Cpmg(_) => phase_cpmg(lambda, g, &e.source, &e.vib, &e.seq, cfg.rel_tol)?,
                _ => phase_spin_echo(lambda, g, &e.source, &e.vib, &e.seq, cfg.rel_tol)?,
            };
            Ok(phi)
        }
    }
}

/// Simulated readout CSV to `dest` (or `out` when `None`).
pub fn cmd_simulate(
    cfg: &RunConfig,
    source: PhaseSource,
    dest: Option<&Path>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<f64, CliError> {
    cfg.validate()?;
    let phi = resolve_phase(cfg, source)?;
    let grid = phase_grid(cfg.readout.phi_mw_points);
    let data = simulate_readout(phi, &grid, &cfg.readout.model(cfg.seed))?;
    match dest {
        Some(path) => {
            csvio::write_readout(create(path)?, &data.points).map_err(|e| CliError::io(path, e))?;
            writeln!(out, "phi_true = {phi:.9e} rad; wrote {} points to {}", data.points.len(), path.display())
                .map_err(report_io)?;
        }
        None => {
            csvio::write_readout(&mut *out, &data.points).map_err(report_io)?;
            writeln!(err, "phi_true = {phi:.9e} rad").map_err(report_io)?;
        }
    }
    Ok(phi)
}

fn fit_file(path: &Path) -> Result<FitResult, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let points = csvio::read_readout(std::io::BufReader::new(file), path)?;
    fit_cosine(&points).map_err(|e| CliError::Data {
        path: path.to_path_buf(),
        line: 0,
        message: format!("cannot fit: {e}"),
    })
}

fn describe(path: &Path, f: &FitResult) -> String {
    let mode = match f.mode {
        UncertaintyMode::Covariance => "covariance",
        UncertaintyMode::Scatter => "scatter",
    };
    let flag = if f.low_contrast { ", LOW CONTRAST" } else { "" };
    format!(
        "{}: phi = {:.6} ± {:.6} rad, I0 = {:.6e}, A_PL = {:.6e} ± {:.2e}, residual_rms = {:.3e}, uncertainty from {mode}{flag}",
        path.display(),
        f.phi,
        f.phi_std,
        f.offset,
        f.amplitude,
        f.amplitude_std,
        f.residual_rms
    )
}

/// Result of `fit`: per-file fits and, with a benchmark, the difference and
/// its 2σ bound.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub data: FitResult,
    pub benchmark: Option<FitResult>,
    pub difference: Option<(f64, f64)>,
    pub bound: Option<f64>,
}

pub fn cmd_fit(data: &Path, benchmark: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<FitReport, CliError> {
    let with = fit_file(data)?;
    writeln!(out, "{}", describe(data, &with)).map_err(report_io)?;
    let mut report = FitReport {
        data: with,
        benchmark: None,
        difference: None,
        bound: None,
    };
    if let Some(bench) = benchmark {
        let without = fit_file(bench)?;
        writeln!(out, "{}", describe(bench, &without)).map_err(report_io)?;
        let d = difference_phase(
            &with.measurement(data.display().to_string()),
            &without.measurement(bench.display().to_string()),
        );
        let bound = phase_upper_bound(&d, 2.0);
        writeln!(out, "difference: phi = {:.6} ± {:.6} rad", d.phi, d.phi_std).map_err(report_io)?;
        writeln!(out, "2-sigma phase bound: {bound:.6} rad").map_err(report_io)?;
        report.benchmark = Some(without);
        report.difference = Some((d.phi, d.phi_std));
        report.bound = Some(bound);
    }
    Ok(report)
}
