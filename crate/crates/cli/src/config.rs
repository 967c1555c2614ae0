//! Line-oriented `key = value` run configuration with unit suffixes.
//!
//! ```text
//! # comment
//! radius = 250um
//! density = 1.33e30/m3
//! theta = 54.7356deg
//! sequence = cpmg:1024
//! ```
//!
//! Bare numbers are SI. Parsing and validation collect every problem before
//! reporting, so one run shows all mistakes in a file.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use nvforce::limits::{linear_grid, log_grid, projected_scenario, LAMBDA_DOMAIN};
use nvforce::{ExperimentConfig, NuisanceBox, ReadoutModel, SequenceKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Current,
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_grid(self.min, self.max, self.points),
            Spacing::Linear => linear_grid(self.min, self.max, self.points),
        }
    }
}

/// Readout parameters for `simulate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutSettings {
    pub photons_per_shot: f64,
    pub contrast: f64,
    pub baseline: f64,
    pub shots: u64,
    pub phi_mw_points: usize,
}

impl Default for ReadoutSettings {
    /// Counting statistics giving a ~0.012 rad phase uncertainty on 12 points.
    fn default() -> Self {
        Self {
            photons_per_shot: 0.02,
            contrast: 0.3,
            baseline: 0.0,
            shots: 640_000,
            phi_mw_points: 12,
        }
    }
}

impl ReadoutSettings {
    pub fn model(&self, seed: u64) -> ReadoutModel {
        ReadoutModel {
            photons_per_shot: self.photons_per_shot,
            contrast: self.contrast,
            baseline: self.baseline,
            shots: self.shots,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub theta_uncertainty: f64,
    pub lambda_grid: GridSpec,
    pub output: String,
    pub rel_tol: f64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub readout: ReadoutSettings,
}

impl RunConfig {
    pub fn for_scenario(scenario: Scenario) -> Self {
        let experiment = match scenario {
            Scenario::Current => ExperimentConfig::current_experiment(),
            Scenario::Projected => projected_scenario(),
        };
        Self {
            experiment,
            theta_uncertainty: 0.0,
            lambda_grid: GridSpec {
                min: 0.05e-6,
                max: 50e-6,
                points: 60,
                spacing: Spacing::Log,
            },
            output: "exclusion_curve.csv".into(),
            rel_tol: 1e-10,
            seed: 0,
            threads: None,
            readout: ReadoutSettings::default(),
        }
    }

    /// Rebuild the nuisance box from the central values and uncertainties.
    fn refresh_box(&mut self) {
        let e = &mut self.experiment;
        e.nuisance = NuisanceBox::from_uncertainties(&e.source, &e.vib, &e.seq, self.theta_uncertainty);
    }

    /// Parse `text` on top of the scenario defaults.
    pub fn parse(text: &str, scenario: Scenario) -> Result<Self, CliError> {
        let mut cfg = Self::for_scenario(scenario);
        let mut problems = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {lineno}: expected `key = value`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                problems.push(format!("line {lineno}: duplicate key `{key}`"));
                continue;
            }
            if let Err(msg) = cfg.set(key, value) {
                problems.push(format!("line {lineno}: {key}: {msg}"));
            }
        }
        cfg.refresh_box();
        problems.extend(cfg.violations());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Config(problems))
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let e = &mut self.experiment;
        match key {
            "label" => e.label = value.to_string(),
            "source_label" => e.source.label = value.to_string(),
            "radius" => e.source.radius = quantity(value, Dim::Length)?,
            "radius_uncertainty" => e.source.radius_uncertainty = quantity(value, Dim::Length)?,
            "density" => e.source.nucleon_density = quantity(value, Dim::Density)?,
            "d0" => e.vib.d0 = quantity(value, Dim::Length)?,
            "d0_uncertainty" => e.vib.d0_uncertainty = quantity(value, Dim::Length)?,
            "amplitude" => e.vib.amplitude = quantity(value, Dim::Length)?,
            "amplitude_uncertainty" => e.vib.amplitude_uncertainty = quantity(value, Dim::Length)?,
            "omega_m" => e.vib.omega_m = quantity(value, Dim::AngularFrequency)?,
            "theta" => e.seq.theta = quantity(value, Dim::Angle)?,
            "theta_uncertainty" => self.theta_uncertainty = quantity(value, Dim::Angle)?,
            "sequence" => e.seq.kind = parse_sequence(value)?,
            "phase_bound" => e.phase_bound = quantity(value, Dim::Angle)?,
            "lambda_min" => self.lambda_grid.min = quantity(value, Dim::Length)?,
            "lambda_max" => self.lambda_grid.max = quantity(value, Dim::Length)?,
            "lambda_points" => self.lambda_grid.points = integer(value)? as usize,
            "lambda_spacing" => {
                self.lambda_grid.spacing = match value {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    other => return Err(format!("expected `log` or `linear`, got `{other}`")),
                }
            }
            "output" => self.output = value.to_string(),
            "rel_tol" => self.rel_tol = quantity(value, Dim::None)?,
            "seed" => self.seed = integer(value)?,
            "threads" => {
                self.threads = match value {
                    "auto" => None,
                    v => Some(integer(v)? as usize),
                }
            }
            "photons_per_shot" => self.readout.photons_per_shot = quantity(value, Dim::None)?,
            "contrast" => self.readout.contrast = quantity(value, Dim::None)?,
            "baseline" => self.readout.baseline = quantity(value, Dim::None)?,
            "shots" => self.readout.shots = integer(value)?,
            "phi_mw_points" => self.readout.phi_mw_points = integer(value)? as usize,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Every constraint the configuration breaks.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let e = &self.experiment;
        let mut need = |ok: bool, msg: String| {
            if !ok {
                v.push(msg);
            }
        };
        let s = &e.source;
        need(s.radius > 0.0 && s.radius.is_finite(), format!("radius must be > 0 (got {:e})", s.radius));
        need(
            s.radius_uncertainty >= 0.0 && s.radius_uncertainty < s.radius,
            format!("radius_uncertainty must be in [0, radius) (got {:e})", s.radius_uncertainty),
        );
        need(s.nucleon_density > 0.0 && s.nucleon_density.is_finite(), format!("density must be > 0 (got {:e})", s.nucleon_density));
        let vib = &e.vib;
        need(vib.d0 > 0.0 && vib.d0.is_finite(), format!("d0 must be > 0 (got {:e})", vib.d0));
        need(
            vib.d0_uncertainty >= 0.0 && vib.d0_uncertainty < vib.d0,
            format!("d0_uncertainty must be in [0, d0) (got {:e})", vib.d0_uncertainty),
        );
        need(
            vib.amplitude > 0.0 && vib.amplitude_uncertainty >= 0.0 && vib.amplitude_uncertainty < vib.amplitude,
            format!(
                "amplitude must be > 0 with uncertainty in [0, amplitude) (got {:e} ± {:e})",
                vib.amplitude, vib.amplitude_uncertainty
            ),
        );
        need(vib.omega_m > 0.0 && vib.omega_m.is_finite(), format!("omega_m must be > 0 (got {:e})", vib.omega_m));
        need((0.0..=FRAC_PI_2).contains(&e.seq.theta), format!("theta must be in [0, π/2] rad (got {})", e.seq.theta));
        need(self.theta_uncertainty >= 0.0, format!("theta_uncertainty must be >= 0 (got {})", self.theta_uncertainty));
        need(e.seq.kind != SequenceKind::Cpmg(0), "cpmg pulse count must be >= 1".into());
        need(e.seq.kind != SequenceKind::Ramsey, "sequence must be `echo` or `cpmg:K`".into());
        need(e.phase_bound > 0.0 && e.phase_bound.is_finite(), format!("phase_bound must be > 0 (got {})", e.phase_bound));

        let g = &self.lambda_grid;
        need(g.points >= 1, "lambda_points must be >= 1 (grid is empty)".into());
        need(
            (LAMBDA_DOMAIN.0..=LAMBDA_DOMAIN.1).contains(&g.min) && (LAMBDA_DOMAIN.0..=LAMBDA_DOMAIN.1).contains(&g.max),
            format!("lambda_min/lambda_max must lie in [10 nm, 10 cm] (got {:e}, {:e})", g.min, g.max),
        );
        need(
            g.min < g.max || (g.points == 1 && g.min == g.max),
            format!("lambda_min must be < lambda_max (got {:e} >= {:e})", g.min, g.max),
        );
        need(self.rel_tol > 0.0 && self.rel_tol <= 1e-3, format!("rel_tol must be in (0, 1e-3] (got {:e})", self.rel_tol));
        need(self.threads != Some(0), "threads must be >= 1".into());
        let r = &self.readout;
        need(r.photons_per_shot >= 0.0, format!("photons_per_shot must be >= 0 (got {})", r.photons_per_shot));
        need((0.0..=1.0).contains(&r.contrast), format!("contrast must be in [0, 1] (got {})", r.contrast));
        need(r.baseline >= 0.0, format!("baseline must be >= 0 (got {})", r.baseline));
        need(r.shots >= 1, "shots must be >= 1".into());
        need(r.phi_mw_points >= 3, format!("phi_mw_points must be >= 3 (got {})", r.phi_mw_points));
        v
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(v))
        }
    }

    /// Serialize in the same format `parse` reads; SI units, shortest
    /// round-trip float formatting.
    pub fn dump(&self) -> String {
        let e = &self.experiment;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("label", e.label.clone());
        kv("source_label", e.source.label.clone());
        kv("radius", format!("{:e}m", e.source.radius));
        kv("radius_uncertainty", format!("{:e}m", e.source.radius_uncertainty));
        kv("density", format!("{:e}/m3", e.source.nucleon_density));
        kv("d0", format!("{:e}m", e.vib.d0));
        kv("d0_uncertainty", format!("{:e}m", e.vib.d0_uncertainty));
        kv("amplitude", format!("{:e}m", e.vib.amplitude));
        kv("amplitude_uncertainty", format!("{:e}m", e.vib.amplitude_uncertainty));
        kv("omega_m", format!("{:e}rad/s", e.vib.omega_m));
        kv("theta", format!("{:e}rad", e.seq.theta));
        kv("theta_uncertainty", format!("{:e}rad", self.theta_uncertainty));
        kv("sequence", e.seq.kind.to_string());
        kv("phase_bound", format!("{:e}rad", e.phase_bound));
        kv("lambda_min", format!("{:e}m", self.lambda_grid.min));
        kv("lambda_max", format!("{:e}m", self.lambda_grid.max));
        kv("lambda_points", self.lambda_grid.points.to_string());
        kv(
            "lambda_spacing",
            match self.lambda_grid.spacing {
                Spacing::Log => "log".into(),
                Spacing::Linear => "linear".into(),
            },
        );
        kv("output", self.output.clone());
        kv("rel_tol", format!("{:e}", self.rel_tol));
        kv("seed", self.seed.to_string());
        kv("threads", self.threads.map_or("auto".into(), |t| t.to_string()));
        kv("photons_per_shot", format!("{:e}", self.readout.photons_per_shot));
        kv("contrast", format!("{:e}", self.readout.contrast));
        kv("baseline", format!("{:e}", self.readout.baseline));
        kv("shots", self.readout.shots.to_string());
        kv("phi_mw_points", self.readout.phi_mw_points.to_string());
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    None,
    Length,
    Density,
    Angle,
    AngularFrequency,
}

#[derive(Debug, Clone, Copy)]
enum Scale {
    /// Power-of-ten prefix, applied in decimal so `41.1nm` equals `4.11e-8`.
    Decimal(i32),
    Factor(f64),
}

fn unit_scale(dim: Dim, unit: &str) -> Option<Scale> {
    use Scale::*;
    let scale = match (dim, unit) {
        (_, "") => Decimal(0),
        (Dim::Length, "m") => Decimal(0),
        (Dim::Length, "cm") => Decimal(-2),
        (Dim::Length, "mm") => Decimal(-3),
        (Dim::Length, "um" | "µm" | "μm") => Decimal(-6),
        (Dim::Length, "nm") => Decimal(-9),
        (Dim::Density, "/m3" | "m^-3" | "m-3") => Decimal(0),
        (Dim::Density, "/cm3" | "cm^-3" | "cm-3") => Decimal(6),
        (Dim::Angle, "rad") => Decimal(0),
        (Dim::Angle, "mrad") => Decimal(-3),
        (Dim::Angle, "deg") => Factor(PI / 180.0),
        (Dim::AngularFrequency, "rad/s") => Decimal(0),
        (Dim::AngularFrequency, "Hz") => Factor(2.0 * PI),
        (Dim::AngularFrequency, "kHz") => Factor(2.0 * PI * 1e3),
        (Dim::AngularFrequency, "MHz") => Factor(2.0 * PI * 1e6),
        _ => return None,
    };
    Some(scale)
}

/// Parse a number with an optional unit suffix into SI.
pub fn quantity(text: &str, dim: Dim) -> Result<f64, String> {
    let text = text.trim();
    let split = numeric_prefix_len(text);
    if split == 0 {
        return Err(format!("`{text}` does not start with a number"));
    }
    let (num, unit) = text.split_at(split);
    let unit = unit.trim();
    let scale = unit_scale(dim, unit).ok_or_else(|| format!("unit `{unit}` not valid for {dim:?}"))?;
    let bad = || format!("`{num}` is not a number");
    match scale {
        Scale::Decimal(0) => num.parse().map_err(|_| bad()),
        Scale::Decimal(shift) => {
            let (mantissa, exp) = match num.find(['e', 'E']) {
                Some(i) => (&num[..i], num[i + 1..].parse::<i32>().map_err(|_| bad())?),
                None => (num, 0),
            };
            format!("{mantissa}e{}", exp + shift).parse().map_err(|_| bad())
        }
        Scale::Factor(k) => num.parse::<f64>().map(|v| v * k).map_err(|_| bad()),
    }
}

fn numeric_prefix_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let digits_start = i;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i == digits_start {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

fn integer(text: &str) -> Result<u64, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a non-negative integer"))
}

fn parse_sequence(text: &str) -> Result<SequenceKind, String> {
    match text {
        "echo" | "spin_echo" => Ok(SequenceKind::SpinEcho),
        other => {
            let k = other
                .strip_prefix("cpmg:")
                .ok_or_else(|| format!("expected `echo` or `cpmg:K`, got `{other}`"))?;
            let k: u32 = k.parse().map_err(|_| format!("bad CPMG pulse count `{k}`"))?;
            Ok(SequenceKind::Cpmg(k))
        }
    }
}
