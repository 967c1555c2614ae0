//! Coupling limits from a phase bound.
//!
//! The accumulated phase is linear in the coupling, `φ = g · h(λ; R, d0, A, θ)`,
//! with the sensitivity
//!
//! ```text
//! h = ħ ρ cosθ / (2m) · [∫_{τ/2}^{3τ/2} f dt − ∫_{3τ/2}^{5τ/2} f dt]      (echo)
//! h = ħ K ρ cosθ / (4m) · [ same bracket ]                              (CPMG-K)
//! ```
//!
//! The conservative bound at each λ is `sup φ / min h`, the minimum taken over
//! the box of experimental-parameter uncertainties.

use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::geometry::{shape_factor_unchecked, SourceMass, BGO_DENSITY};
use crate::physics::{lambda_to_alp_mass, ForceRange, CONSTANTS};
use crate::quadrature::{integrate, QuadOptions};
use crate::sensor::{PulseSequence, SequenceKind, VibrationProfile};

/// Two standard deviations of the 0.018 rad differenced phase.
pub const MEASURED_PHASE_BOUND: f64 = 0.036;
/// Photoluminescence-rate gain assumed for the projected setup.
pub const PROJECTED_RATE_GAIN: f64 = 17.0;
/// Smallest and largest force ranges accepted in a sweep, m.
pub const LAMBDA_DOMAIN: (f64, f64) = (10e-9, 0.1);

/// One point in (R, d0, A, θ, ρ, ω_m) space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub radius: f64,
    pub d0: f64,
    pub amplitude: f64,
    pub theta: f64,
    pub density: f64,
    pub omega_m: f64,
}

impl OperatingPoint {
    fn validate(&self) -> Result<()> {
        require_positive("radius", self.radius)?;
        require_positive("d0", self.d0)?;
        require_positive("density", self.density)?;
        require_positive("omega_m", self.omega_m)?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Domain {
                name: "amplitude",
                value: self.amplitude,
                requirement: "finite and >= 0",
            });
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta) {
            return Err(Error::Domain {
                name: "theta",
                value: self.theta,
                requirement: "within [0, π/2]",
            });
        }
        Ok(())
    }
}

/// Phase per unit coupling (rad) at force range `lambda`.
pub fn sensitivity_h(lambda: f64, point: &OperatingPoint, seq: &PulseSequence, rel_tol: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    point.validate()?;
    let hbar_over_m = CONSTANTS.hbar_over_mass();
    let prefactor = match seq.kind {
        SequenceKind::SpinEcho => hbar_over_m * point.density * point.theta.cos() / 2.0,
        SequenceKind::Cpmg(0) => {
            return Err(Error::Domain {
                name: "cpmg_pulses",
                value: 0.0,
                requirement: ">= 1",
            })
        }
        SequenceKind::Cpmg(k) => hbar_over_m * k as f64 * point.density * point.theta.cos() / 4.0,
        SequenceKind::Ramsey => {
            return Err(Error::WrongSequence {
                expected: "spin echo or CPMG",
                found: seq.kind.to_string(),
            })
        }
    };

    let tau = std::f64::consts::PI / point.omega_m;
    let gap = |t: f64| point.d0 + point.amplitude * (1.0 + (point.omega_m * t).cos());
    let shape = |t: f64| shape_factor_unchecked(lambda, point.radius, gap(t));
    // near half-period minus far half-period, sampled at matching phases
    let bracket = integrate(
        |t| shape(t) - shape(t + tau),
        0.5 * tau,
        1.5 * tau,
        &QuadOptions::relative(rel_tol),
    )?;
    Ok(prefactor * bracket.value)
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` evenly spaced samples; a single sample for a degenerate interval.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        if self.width() == 0.0 || n < 2 {
            return vec![self.lo];
        }
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lo + self.width() * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn ends(&self) -> Vec<f64> {
        if self.width() == 0.0 {
            vec![self.lo]
        } else {
            vec![self.lo, self.hi]
        }
    }
}

/// Uncertainty box over which the sensitivity is minimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuisanceBox {
    pub radius: Interval,
    pub d0: Interval,
    pub amplitude: Interval,
    pub theta: Interval,
}

impl NuisanceBox {
    /// Central values ± their quoted uncertainties; θ gets ±`theta_uncertainty`.
    pub fn from_uncertainties(source: &SourceMass, vib: &VibrationProfile, seq: &PulseSequence, theta_uncertainty: f64) -> Self {
        Self {
            radius: Interval::around(source.radius, source.radius_uncertainty),
            d0: Interval::around(vib.d0, vib.d0_uncertainty),
            amplitude: Interval::around(vib.amplitude, vib.amplitude_uncertainty),
            theta: Interval::new(
                (seq.theta - theta_uncertainty).max(0.0),
                (seq.theta + theta_uncertainty).min(std::f64::consts::FRAC_PI_2),
            ),
        }
    }

    pub fn collapsed(source: &SourceMass, vib: &VibrationProfile, seq: &PulseSequence) -> Self {
        Self {
            radius: Interval::point(source.radius),
            d0: Interval::point(vib.d0),
            amplitude: Interval::point(vib.amplitude),
            theta: Interval::point(seq.theta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("radius range", self.radius, true),
            ("d0 range", self.d0, true),
            ("amplitude range", self.amplitude, true),
            ("theta range", self.theta, false),
        ];
        for (name, iv, strictly_positive_lo) in axes {
            let lo_ok = if strictly_positive_lo { iv.lo > 0.0 } else { iv.lo >= 0.0 };
            if !(iv.lo.is_finite() && iv.hi.is_finite() && iv.lo <= iv.hi && lo_ok) {
                return Err(Error::Domain {
                    name,
                    value: iv.lo,
                    requirement: "finite, lo <= hi, lo > 0 (theta lo >= 0)",
                });
            }
        }
        if self.theta.hi > std::f64::consts::FRAC_PI_2 {
            return Err(Error::Domain {
                name: "theta range",
                value: self.theta.hi,
                requirement: "<= π/2",
            });
        }
        Ok(())
    }

    fn points(&self, r: &[f64], d0: &[f64], a: &[f64], th: &[f64], density: f64, omega_m: f64) -> Vec<OperatingPoint> {
        let mut out = Vec::with_capacity(r.len() * d0.len() * a.len() * th.len());
        for &radius in r {
            for &d in d0 {
                for &amplitude in a {
                    for &theta in th {
                        out.push(OperatingPoint {
                            radius,
                            d0: d,
                            amplitude,
                            theta,
                            density,
                            omega_m,
                        });
                    }
                }
            }
        }
        out
    }

    /// The (up to) 16 corners of the box.
    pub fn corners(&self, density: f64, omega_m: f64) -> Vec<OperatingPoint> {
        self.points(
            &self.radius.ends(),
            &self.d0.ends(),
            &self.amplitude.ends(),
            &self.theta.ends(),
            density,
            omega_m,
        )
    }

    /// A `n⁴` grid through the box; degenerate axes contribute one sample.
    pub fn grid(&self, n: usize, density: f64, omega_m: f64) -> Vec<OperatingPoint> {
        self.points(
            &self.radius.samples(n),
            &self.d0.samples(n),
            &self.amplitude.samples(n),
            &self.theta.samples(n),
            density,
            omega_m,
        )
    }
}

/// Everything needed to turn a phase bound into a coupling bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: SourceMass,
    pub vib: VibrationProfile,
    pub seq: PulseSequence,
    /// sup φ, rad.
    pub phase_bound: f64,
    pub nuisance: NuisanceBox,
    pub label: String,
}

impl ExperimentConfig {
    /// Fused-silica lens on a tuning fork, spin echo, sup φ = 0.036 rad.
    pub fn current_experiment() -> Self {
        let source = SourceMass::fused_silica_lens();
        let vib = VibrationProfile::tuning_fork();
        let seq = PulseSequence::spin_echo();
        let nuisance = NuisanceBox::from_uncertainties(&source, &vib, &seq, 0.0);
        Self {
            source,
            vib,
            seq,
            phase_bound: MEASURED_PHASE_BOUND,
            nuisance,
            label: "current".into(),
        }
    }

    pub fn central(&self) -> OperatingPoint {
        OperatingPoint {
            radius: self.source.radius,
            d0: self.vib.d0,
            amplitude: self.vib.amplitude,
            theta: self.seq.theta,
            density: self.source.nucleon_density,
            omega_m: self.vib.omega_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.vib.validate()?;
        self.seq.validate()?;
        self.nuisance.validate()?;
        if !(self.phase_bound >= 0.0 && self.phase_bound.is_finite()) {
            return Err(Error::Domain {
                name: "phase_bound",
                value: self.phase_bound,
                requirement: "finite and >= 0",
            });
        }
        Ok(())
    }
}

/// Projected configuration: CPMG-1024 synchronized at ω_m = 2.51×10⁶ rad/s,
/// BGO source, d0 = 100 nm, A = 400 nm, and a phase bound reduced by √17 from
/// the higher photoluminescence rate.
pub fn projected_scenario() -> ExperimentConfig {
    projected_scenario_with(1.0)
}

/// As [`projected_scenario`], with an extra statistical gain (e.g. from more
/// scans) dividing the phase bound.
pub fn projected_scenario_with(extra_statistical_gain: f64) -> ExperimentConfig {
    let source = SourceMass {
        radius: 250e-6,
        radius_uncertainty: 0.0,
        nucleon_density: BGO_DENSITY,
        label: "BGO half-ball".into(),
    };
    let vib = VibrationProfile {
        d0: 100e-9,
        d0_uncertainty: 0.0,
        amplitude: 400e-9,
        amplitude_uncertainty: 0.0,
        omega_m: 2.51e6,
    };
    let seq = PulseSequence::cpmg(1024);
    let nuisance = NuisanceBox::collapsed(&source, &vib, &seq);
    ExperimentConfig {
        source,
        vib,
        seq,
        phase_bound: MEASURED_PHASE_BOUND / PROJECTED_RATE_GAIN.sqrt() / extra_statistical_gain,
        nuisance,
        label: "projected".into(),
    }
}

/// Result of the nuisance minimization at one force range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBound {
    pub lambda: f64,
    pub h_min: f64,
    /// Where in the box the minimum was found.
    pub minimizer: OperatingPoint,
    /// `None` when the sensitivity vanishes and no constraint exists.
    pub g_bound: Option<f64>,
}

/// Grid resolution per axis for the non-monotonicity fallback.
pub const FALLBACK_GRID: usize = 5;

/// Minimum of h over the nuisance box: the 16 corners plus a 5⁴ grid.
pub fn minimize_sensitivity(lambda: f64, config: &ExperimentConfig, rel_tol: f64) -> Result<(f64, OperatingPoint)> {
    let density = config.source.nucleon_density;
    let omega = config.vib.omega_m;
    let mut candidates = config.nuisance.corners(density, omega);
    candidates.extend(config.nuisance.grid(FALLBACK_GRID, density, omega));
    let mut best: Option<(f64, OperatingPoint)> = None;
    for p in candidates {
        let h = sensitivity_h(lambda, &p, &config.seq, rel_tol)?;
        if best.is_none_or(|(b, _)| h < b) {
            best = Some((h, p));
        }
    }
    Ok(best.expect("box always has at least one point"))
}

/// sup g = sup φ / min h at a single force range.
pub fn bound_at_lambda(lambda: f64, config: &ExperimentConfig, rel_tol: f64) -> Result<LambdaBound> {
    require_positive("lambda", lambda)?;
    config.validate()?;
    require_positive("phase_bound", config.phase_bound)?;
    let (h_min, minimizer) = minimize_sensitivity(lambda, config, rel_tol)?;
    let g = config.phase_bound / h_min;
    let g_bound = (h_min > 0.0 && g.is_finite()).then_some(g);
    Ok(LambdaBound {
        lambda,
        h_min,
        minimizer,
        g_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionPoint {
    pub lambda: f64,
    pub alp_mass_ev: f64,
    pub g_bound: f64,
}

/// A force range where no bound could be set, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveGap {
    pub lambda: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExclusionCurve {
    pub points: Vec<ExclusionPoint>,
    pub gaps: Vec<CurveGap>,
}

impl ExclusionCurve {
    /// Point whose λ is closest (in log space) to `lambda`.
    pub fn nearest(&self, lambda: f64) -> Option<&ExclusionPoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.lambda / lambda).ln().abs().total_cmp(&(b.lambda / lambda).ln().abs()))
    }
}

pub fn check_lambda_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain {
            name: "lambda_grid",
            value: 0.0,
            requirement: "non-empty",
        });
    }
    for &l in grid {
        if !(LAMBDA_DOMAIN.0..=LAMBDA_DOMAIN.1).contains(&l) {
            return Err(Error::Domain {
                name: "lambda_grid",
                value: l,
                requirement: "within [10 nm, 10 cm]",
            });
        }
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain {
            name: "lambda_grid",
            value: w[1],
            requirement: "strictly increasing",
        });
    }
    Ok(())
}

/// Bounds over a λ grid, evaluated in parallel and returned in grid order.
/// Per-λ failures become gaps instead of aborting the sweep.
pub fn exclusion_curve(lambda_grid: &[f64], config: &ExperimentConfig, rel_tol: f64) -> Result<ExclusionCurve> {
    check_lambda_grid(lambda_grid)?;
    config.validate()?;
    require_positive("phase_bound", config.phase_bound)?;
    let results: Vec<(f64, Result<LambdaBound>)> = lambda_grid
        .par_iter()
        .map(|&l| (l, bound_at_lambda(l, config, rel_tol)))
        .collect();

    let mut curve = ExclusionCurve::default();
    for (lambda, res) in results {
        match res {
            Ok(LambdaBound {
                g_bound: Some(g), ..
            }) => curve.points.push(ExclusionPoint {
                lambda,
                alp_mass_ev: lambda_to_alp_mass(ForceRange::new(lambda)?),
                g_bound: g,
            }),
            Ok(b) => curve.gaps.push(CurveGap {
                lambda,
                reason: format!("no constraint: minimum sensitivity {:e}", b.h_min),
            }),
            Err(e) => curve.gaps.push(CurveGap {
                lambda,
                reason: e.to_string(),
            }),
        }
    }
    Ok(curve)
}

/// `n` log-spaced values from `min` to `max` with exact endpoints.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => {
            let (a, b) = (min.ln(), max.ln());
            (0..n)
                .map(|i| match i {
                    0 => min,
                    i if i == n - 1 => max,
                    i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// `n` evenly spaced values from `min` to `max` with exact endpoints.
pub fn linear_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    Interval::new(min, max).samples(n).into_iter().take(n).collect()
}

/// 60 log-spaced force ranges over [0.05 µm, 50 µm].
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(0.05e-6, 50e-6, 60)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::Coupling;
    use crate::sensor::{phase_cpmg, phase_spin_echo};
    use approx::assert_relative_eq;

    #[test]
    fn static_source_or_perpendicular_field_gives_zero() {
        let mut p = ExperimentConfig::current_experiment().central();
        p.amplitude = 0.0;
        assert_eq!(sensitivity_h(20e-6, &p, &PulseSequence::spin_echo(), 1e-10).unwrap(), 0.0);
        let mut p = ExperimentConfig::current_experiment().central();
        let h0 = sensitivity_h(20e-6, &p, &PulseSequence::spin_echo(), 1e-10).unwrap();
        p.theta = std::f64::consts::FRAC_PI_2;
        let h = sensitivity_h(20e-6, &p, &PulseSequence::spin_echo(), 1e-10).unwrap();
        assert!(h.abs() <= 1e-15 * h0);
    }

    #[test]
    fn matches_phase_path() {
        let cfg = ExperimentConfig::current_experiment();
        for lam in [0.3e-6, 20e-6] {
            let h = sensitivity_h(lam, &cfg.central(), &cfg.seq, 1e-12).unwrap();
            let phi = phase_spin_echo(lam, Coupling(1.0), &cfg.source, &cfg.vib, &cfg.seq, 1e-12).unwrap();
            assert_relative_eq!(h, phi, max_relative = 1e-9);
        }
        let p = projected_scenario();
        let h = sensitivity_h(5e-6, &p.central(), &p.seq, 1e-12).unwrap();
        let phi = phase_cpmg(5e-6, Coupling(1.0), &p.source, &p.vib, &p.seq, 1e-12).unwrap();
        assert_relative_eq!(h, phi, max_relative = 1e-9);
    }

    #[test]
    fn ramsey_has_no_sensitivity_function() {
        let cfg = ExperimentConfig::current_experiment();
        assert!(sensitivity_h(1e-6, &cfg.central(), &PulseSequence::ramsey(), 1e-10).is_err());
    }

    #[test]
    fn bound_scales_with_phase_bound() {
        let mut cfg = ExperimentConfig::current_experiment();
        let g1 = bound_at_lambda(5e-6, &cfg, 1e-10).unwrap().g_bound.unwrap();
        cfg.phase_bound *= 2.0;
        let g2 = bound_at_lambda(5e-6, &cfg, 1e-10).unwrap().g_bound.unwrap();
        assert_relative_eq!(g2, 2.0 * g1, max_relative = 1e-15);
    }

    #[test]
    fn collapsing_box_never_loosens() {
        let cfg = ExperimentConfig::current_experiment();
        let mut tight = cfg.clone();
        tight.nuisance = NuisanceBox::collapsed(&cfg.source, &cfg.vib, &cfg.seq);
        for lam in [0.1e-6, 2e-6, 20e-6] {
            let wide = bound_at_lambda(lam, &cfg, 1e-10).unwrap().g_bound.unwrap();
            let narrow = bound_at_lambda(lam, &tight, 1e-10).unwrap().g_bound.unwrap();
            assert!(narrow <= wide);
        }
    }

    #[test]
    fn minimizer_is_expected_corner() {
        let cfg = ExperimentConfig::current_experiment();
        for lam in [0.1e-6, 1e-6, 20e-6] {
            let (h, p) = minimize_sensitivity(lam, &cfg, 1e-12).unwrap();
            // R enters through a difference of shape factors and its sign flips
            // with λ; it only has to sit on a face of the box.
            assert!(p.radius == cfg.nuisance.radius.lo || p.radius == cfg.nuisance.radius.hi);
            assert_eq!(p.d0, cfg.nuisance.d0.hi);
            assert_eq!(p.amplitude, cfg.nuisance.amplitude.lo);
            assert_eq!(p.theta, cfg.nuisance.theta.hi);
            // dense grid does not undercut the corner
            let dense = cfg.nuisance.grid(9, cfg.source.nucleon_density, cfg.vib.omega_m);
            let grid_min = dense
                .iter()
                .map(|q| sensitivity_h(lam, q, &cfg.seq, 1e-12).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(h, grid_min, max_relative = 1e-9);
        }
    }

    #[test]
    fn tiny_range_unconstrained() {
        let cfg = ExperimentConfig::current_experiment();
        let b = bound_at_lambda(1e-10, &cfg, 1e-10).unwrap();
        assert!(b.g_bound.is_none());
        assert_eq!(b.h_min, 0.0);
    }

    #[test]
    fn zero_phase_bound_rejected() {
        let mut cfg = ExperimentConfig::current_experiment();
        cfg.phase_bound = 0.0;
        assert!(bound_at_lambda(1e-6, &cfg, 1e-10).is_err());
    }

    #[test]
    fn sweep_keeps_order_and_reports_gaps() {
        let cfg = ExperimentConfig::current_experiment();
        let grid = [12e-9, 0.1e-6, 1e-6, 20e-6];
        let curve = exclusion_curve(&grid, &cfg, 1e-10).unwrap();
        let lambdas: Vec<f64> = curve.points.iter().map(|p| p.lambda).collect();
        assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(curve.points.len() + curve.gaps.len(), grid.len());

        let single = exclusion_curve(&[20e-6], &cfg, 1e-10).unwrap();
        assert_eq!(single.points.len(), 1);
        assert_relative_eq!(single.points[0].alp_mass_ev, lambda_to_alp_mass(ForceRange::new(20e-6).unwrap()));
    }

    #[test]
    fn grid_validation() {
        let cfg = ExperimentConfig::current_experiment();
        assert!(exclusion_curve(&[], &cfg, 1e-10).is_err());
        assert!(exclusion_curve(&[1e-6, 1e-6], &cfg, 1e-10).is_err());
        assert!(exclusion_curve(&[1e-9], &cfg, 1e-10).is_err());
        assert!(exclusion_curve(&[1.0], &cfg, 1e-10).is_err());
    }

    #[test]
    fn grids_have_exact_endpoints() {
        let g = log_grid(0.05e-6, 50e-6, 60);
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.05e-6);
        assert_eq!(g[59], 50e-6);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linear_grid(1.0, 2.0, 5);
        assert_eq!(l, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(default_lambda_grid().len(), 60);
    }

    #[test]
    fn projected_values() {
        let p = projected_scenario();
        assert_eq!(p.source.nucleon_density, 4.29e30);
        assert_eq!(p.seq.kind, SequenceKind::Cpmg(1024));
        assert_eq!(p.vib.omega_m, 2.51e6);
        assert_eq!(p.vib.d0, 100e-9);
        assert_eq!(p.vib.amplitude, 400e-9);
        assert_relative_eq!(p.phase_bound, 0.036 / 17f64.sqrt(), max_relative = 1e-15);
        assert_eq!(p.nuisance.d0.width(), 0.0);
        assert_relative_eq!(projected_scenario_with(4.0).phase_bound, p.phase_bound / 4.0);
    }

    #[test]
    fn monotone_nuisance_structure() {
        let cfg = ExperimentConfig::current_experiment();
        let seq = cfg.seq;
        for lam in [0.1e-6, 1e-6, 20e-6] {
            let base = cfg.central();
            let h = |p: OperatingPoint| sensitivity_h(lam, &p, &seq, 1e-12).unwrap();
            let bx = cfg.nuisance;
            let mut last_d = f64::INFINITY;
            let mut last_a = 0.0;
            let mut hrs = Vec::new();
            for i in 0..5 {
                let hd = h(OperatingPoint { d0: bx.d0.samples(5)[i], ..base });
                let ha = h(OperatingPoint { amplitude: bx.amplitude.samples(5)[i], ..base });
                let hr = h(OperatingPoint { radius: bx.radius.samples(5)[i], ..base });
                assert!(hd < last_d);
                assert!(ha > last_a);
                hrs.push(hr);
                last_d = hd;
                last_a = ha;
            }
            let up = hrs.windows(2).all(|w| w[1] > w[0]);
            let down = hrs.windows(2).all(|w| w[1] < w[0]);
            assert!(up || down, "h not monotone in R at λ = {lam}");
        }
    }
}
