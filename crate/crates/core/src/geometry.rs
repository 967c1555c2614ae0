//! Effective field of a half-ball source mass on its symmetry axis.
//!
//! The ball's centre sits at height `d + R` above the spin and only the lower
//! half (curved face toward the spin) is filled, so the closest point of the
//! source is at distance `d`. The axial field is
//!
//! ```text
//! B_eff = ħ g ρ / (2 m γ) · f(λ, R, d)
//! ```
//!
//! where `f` is a length. [`shape_factor_closed_form`] evaluates the analytic
//! expression; [`shape_factor_quadrature`] integrates the volume directly in
//! cylindrical coordinates and serves as its oracle.

use std::cell::Cell;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::physics::{yukawa_radial, Coupling, CONSTANTS};
use crate::quadrature::{integrate, QuadOptions};

/// Half-ball source of nucleons.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMass {
    /// Radius R, m.
    pub radius: f64,
    /// Standard uncertainty on R, m.
    pub radius_uncertainty: f64,
    /// Nucleon number density ρ, m⁻³.
    pub nucleon_density: f64,
    pub label: String,
}

/// Nucleon number density of fused silica, m⁻³.
pub const FUSED_SILICA_DENSITY: f64 = 1.33e30;
/// Nucleon number density of Bi₄Ge₃O₁₂, m⁻³.
pub const BGO_DENSITY: f64 = 4.29e30;

impl SourceMass {
    pub fn new(radius: f64, radius_uncertainty: f64, nucleon_density: f64, label: impl Into<String>) -> Result<Self> {
        let s = Self {
            radius,
            radius_uncertainty,
            nucleon_density,
            label: label.into(),
        };
        s.validate()?;
        Ok(s)
    }

    /// The fused-silica lens, R = 250(2.5) µm.
    pub fn fused_silica_lens() -> Self {
        Self {
            radius: 250e-6,
            radius_uncertainty: 2.5e-6,
            nucleon_density: FUSED_SILICA_DENSITY,
            label: "fused silica half-ball lens".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("radius", self.radius)?;
        require_non_negative("radius_uncertainty", self.radius_uncertainty)?;
        require_positive("nucleon_density", self.nucleon_density)?;
        if self.radius_uncertainty >= self.radius {
            return Err(Error::Domain {
                name: "radius_uncertainty",
                value: self.radius_uncertainty,
                requirement: "< radius",
            });
        }
        Ok(())
    }
}

/// Value of f(λ, R, d) in metres, with an error estimate (zero for the closed form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFactorResult {
    pub value: f64,
    pub estimated_error: f64,
}

fn check_args(lambda: f64, radius: f64, d: f64) -> Result<()> {
    require_positive("lambda", lambda)?;
    require_positive("radius", radius)?;
    require_non_negative("d", d)?;
    Ok(())
}

/// Closed-form half-ball shape factor.
///
/// Written as
///
/// ```text
/// f = λ e^{-d/λ} [ R/D − λd/D² − λ²/D² − e^{-R/λ} + e^{-(s−d)/λ} (1 + λs/D² + λ²/D²) ]
/// ```
///
/// with `D = d + R` and `s = √(R² + D²)`, which is the seven-term bracket with
/// the common `e^{-d/λ}` pulled out.
pub fn shape_factor_closed_form(lambda: f64, radius: f64, d: f64) -> Result<ShapeFactorResult> {
    check_args(lambda, radius, d)?;
    Ok(ShapeFactorResult {
        value: shape_factor_unchecked(lambda, radius, d),
        estimated_error: 0.0,
    })
}

/// [`shape_factor_closed_form`] without argument validation, for hot loops
/// whose arguments were validated once up front.
#[inline]
pub(crate) fn shape_factor_unchecked(lambda: f64, radius: f64, d: f64) -> f64 {
    let outer = (-d / lambda).exp();
    if outer == 0.0 {
        return 0.0;
    }
    let big_d = d + radius;
    let inv_d2 = 1.0 / (big_d * big_d);
    let s = (radius * radius + big_d * big_d).sqrt();
    let near = radius / big_d - lambda * d * inv_d2 - lambda * lambda * inv_d2;
    let far = (-radius / lambda).exp();
    let rim = (-(s - d) / lambda).exp() * (1.0 + lambda * s * inv_d2 + lambda * lambda * inv_d2);
    (lambda * outer * (near - far + rim)).max(0.0)
}

/// Axial field-kernel integrand in cylindrical coordinates (azimuth already
/// integrated): `(1/(λr) + 1/r²) e^{-r/λ} (z/r) l`.
pub fn volume_integrand(lambda: f64, z: f64, l: f64) -> f64 {
    let r = (z * z + l * l).sqrt();
    yukawa_radial(r, lambda) * (z / r) * l
}

/// Shape factor from direct volume integration.
///
/// Outer integral over the height `z ∈ [d, d + R]`, inner over the radial
/// coordinate `l ∈ [0, √(R² − (d + R − z)²)]`. The 2π from the azimuth and
/// the 1/4π of the point-source field combine into the 1/2 of the prefactor,
/// so the double integral equals f directly.
pub fn shape_factor_quadrature(lambda: f64, radius: f64, d: f64, rel_tol: f64) -> Result<ShapeFactorResult> {
    check_args(lambda, radius, d)?;
    if !(1e-10..=1e-3).contains(&rel_tol) {
        return Err(Error::Domain {
            name: "rel_tol",
            value: rel_tol,
            requirement: "within [1e-10, 1e-3]",
        });
    }
    let inner_opts = QuadOptions {
        rel_tol: rel_tol * 0.1,
        abs_tol: 0.0,
        max_segments: 4000,
    };
    let outer_opts = QuadOptions {
        rel_tol,
        abs_tol: 0.0,
        max_segments: 4000,
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let worst_inner_rel = Cell::new(0.0f64);
    let centre = d + radius;

    let slice = |z: f64| {
        let dz = centre - z;
        let l_max = (radius * radius - dz * dz).max(0.0).sqrt();
        match integrate(|l| volume_integrand(lambda, z, l), 0.0, l_max, &inner_opts) {
            Ok(r) => {
                if r.value != 0.0 {
                    worst_inner_rel.set(worst_inner_rel.get().max(r.error / r.value.abs()));
                }
                r.value
            }
            Err(e) => {
                let best = match e {
                    Error::Convergence { best, .. } => best,
                    _ => 0.0,
                };
                failure.set(Some(e));
                best
            }
        }
    };

    // Split the height range at a few multiples of λ so the outer adaptive
    // pass starts with the exponential peak resolved.
    let mut cuts = vec![d];
    for k in [1.0, 4.0, 16.0, 64.0] {
        let z = d + k * lambda;
        if z < centre {
            cuts.push(z);
        }
    }
    cuts.push(centre);

    let mut value = 0.0;
    let mut error = 0.0;
    for w in cuts.windows(2) {
        match integrate(&slice, w[0], w[1], &outer_opts) {
            Ok(r) => {
                value += r.value;
                error += r.error;
            }
            Err(Error::Convergence { best, error: e }) => {
                value += best;
                error += e;
                failure.set(Some(Error::Convergence { best: value, error }));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(e) = failure.take() {
        return Err(match e {
            Error::Convergence { .. } => Error::Convergence { best: value, error },
            other => other,
        });
    }
    Ok(ShapeFactorResult {
        value,
        estimated_error: error + worst_inner_rel.get() * value.abs(),
    })
}

/// Axial effective field (T) of the source at gap `d`.
pub fn effective_field_mass(lambda: f64, source: &SourceMass, d: f64, g: Coupling) -> Result<f64> {
    source.validate()?;
    let f = shape_factor_closed_form(lambda, source.radius, d)?;
    Ok(field_prefactor(source.nucleon_density, g) * f.value)
}

/// ħ g ρ / (2 m γ), tesla per metre of shape factor.
pub(crate) fn field_prefactor(density: f64, g: Coupling) -> f64 {
    let c = CONSTANTS;
    c.hbar * g.value() * density / (2.0 * c.electron_mass * c.gyromagnetic_ratio)
}
