//! Phase extraction from fringe scans.
//!
//! The readout `I = I0 + A_PL cos(φ_mw + φ)` is linear in `(I0, a, b)` after
//! writing it as `I0 + a cos φ_mw + b sin φ_mw` with `a = A_PL cos φ` and
//! `b = −A_PL sin φ`, so the fit is a weighted linear least-squares solve.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::sensor::ReadoutPoint;

/// How the parameter covariance is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UncertaintyMode {
    /// Per-point standard errors are taken as absolute: C = (XᵀWX)⁻¹.
    #[default]
    Covariance,
    /// Covariance scaled by the reduced χ² of the residuals.
    Scatter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Offset I_PL,0.
    pub offset: f64,
    /// Fringe amplitude A_PL ≥ 0.
    pub amplitude: f64,
    /// Phase in (−π, π].
    pub phi: f64,
    pub phi_std: f64,
    pub amplitude_std: f64,
    pub residual_rms: f64,
    /// Amplitude is below twice its own uncertainty; `phi_std` is then unreliable.
    pub low_contrast: bool,
    pub mode: UncertaintyMode,
}

impl FitResult {
    pub fn measurement(&self, label: impl Into<String>) -> PhaseMeasurement {
        PhaseMeasurement {
            phi: self.phi,
            phi_std: self.phi_std,
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMeasurement {
    pub phi: f64,
    pub phi_std: f64,
    pub label: String,
}

impl PhaseMeasurement {
    pub fn new(phi: f64, phi_std: f64, label: impl Into<String>) -> Self {
        Self {
            phi,
            phi_std,
            label: label.into(),
        }
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Fit with per-point errors when every point carries a positive one,
/// otherwise unweighted with residual-scaled covariance.
pub fn fit_cosine(points: &[ReadoutPoint]) -> Result<FitResult> {
    let weighted = points.iter().all(|p| p.std_error > 0.0 && p.std_error.is_finite());
    let mode = if weighted {
        UncertaintyMode::Covariance
    } else {
        UncertaintyMode::Scatter
    };
    fit_cosine_with(points, mode)
}

pub fn fit_cosine_with(points: &[ReadoutPoint], mode: UncertaintyMode) -> Result<FitResult> {
    let distinct = distinct_phases(points);
    if distinct < 3 {
        return Err(Error::RankDeficient(format!(
            "need at least 3 distinct microwave phases, got {distinct}"
        )));
    }
    let weighted = points.iter().all(|p| p.std_error > 0.0 && p.std_error.is_finite());
    if mode == UncertaintyMode::Covariance && !weighted {
        return Err(Error::RankDeficient(
            "absolute covariance needs a positive standard error on every point".into(),
        ));
    }

    let weight = |p: &ReadoutPoint| if weighted { 1.0 / (p.std_error * p.std_error) } else { 1.0 };
    let row = |p: &ReadoutPoint| Vector3::new(1.0, p.phi_mw.cos(), p.phi_mw.sin());

    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for p in points {
        let x = row(p);
        let w = weight(p);
        normal += x * x.transpose() * w;
        rhs += x * (w * p.mean_counts);
    }
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("normal matrix not positive definite".into()))?;
    let beta = chol.solve(&rhs);
    let mut cov = chol.inverse();

    let mut chi2 = 0.0;
    let mut sq = 0.0;
    for p in points {
        let r = p.mean_counts - row(p).dot(&beta);
        chi2 += weight(p) * r * r;
        sq += r * r;
    }
    let n = points.len();
    if mode == UncertaintyMode::Scatter {
        let scale = if n > 3 { chi2 / (n - 3) as f64 } else { f64::INFINITY };
        cov *= scale;
    }

    let (offset, a, b) = (beta[0], beta[1], beta[2]);
    let amplitude = a.hypot(b);
    let phi = wrap_phase((-b).atan2(a));
    let (phi_std, amplitude_std) = if amplitude > 0.0 {
        let a2 = amplitude * amplitude;
        // ∂φ/∂(a, b) = (b, −a)/A²; ∂A/∂(a, b) = (a, b)/A
        let jp = Vector3::new(0.0, b / a2, -a / a2);
        let ja = Vector3::new(0.0, a / amplitude, b / amplitude);
        ((jp.transpose() * cov * jp)[0].max(0.0).sqrt(), (ja.transpose() * cov * ja)[0].max(0.0).sqrt())
    } else {
        (f64::INFINITY, cov[(1, 1)].max(cov[(2, 2)]).sqrt())
    };

    Ok(FitResult {
        offset,
        amplitude,
        phi,
        phi_std,
        amplitude_std,
        residual_rms: (sq / n as f64).sqrt(),
        low_contrast: amplitude.partial_cmp(&(2.0 * amplitude_std)) != Some(std::cmp::Ordering::Greater),
        mode,
    })
}

fn distinct_phases(points: &[ReadoutPoint]) -> usize {
    let mut wrapped: Vec<f64> = points.iter().map(|p| p.phi_mw.rem_euclid(2.0 * PI)).collect();
    wrapped.sort_by(f64::total_cmp);
    let tol = 1e-9;
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &x in &wrapped {
        if last.is_none_or(|l| x - l > tol) {
            count += 1;
            last = Some(x);
        }
    }
    // 0 and 2π − ε are the same phase
    if count > 1 && wrapped[0] + 2.0 * PI - wrapped[wrapped.len() - 1] <= tol {
        count -= 1;
    }
    count
}

/// Phase attributable to the source: with-mass minus benchmark, errors in quadrature.
pub fn difference_phase(with_mass: &PhaseMeasurement, without_mass: &PhaseMeasurement) -> PhaseMeasurement {
    PhaseMeasurement {
        phi: wrap_phase(with_mass.phi - without_mass.phi),
        phi_std: with_mass.phi_std.hypot(without_mass.phi_std),
        label: format!("{} - {}", with_mass.label, without_mass.label),
    }
}

/// Upper bound on |φ|: `|φ| + k σ`. For a null result this is the usual `k σ`.
pub fn phase_upper_bound(measurement: &PhaseMeasurement, k_sigma: f64) -> f64 {
    if measurement.phi != 0.0 {
        log::info!(
            "phase {} is non-zero; bound includes |phi| on top of {k_sigma} sigma",
            measurement.phi
        );
    }
    measurement.phi.abs() + k_sigma * measurement.phi_std
}
