//! Physical constants, the monopole-dipole potential between an electron spin
//! and a single nucleon, the equivalent effective magnetic field, and the
//! conversion between force range and mediator mass.
//!
//! ```text
//! V(r)   = ħ² g / (8π m) · (1/(λr) + 1/r²) · exp(-r/λ) · (σ̂ · r̂)
//! B(r)   = ħ g  / (4π m γ) · (1/(λr) + 1/r²) · exp(-r/λ) · r̂
//! λ      = ħ / (m_a c)
//! ```
//!
//! Everything is SI internally; electron-volts only appear for the mediator mass.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{require_positive, Error, Result};

/// Fundamental constants used by every computation in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Electron rest mass, kg.
    pub electron_mass: f64,
    /// Magnitude of the electron gyromagnetic ratio, rad·s⁻¹·T⁻¹.
    pub gyromagnetic_ratio: f64,
    /// Speed of light, m·s⁻¹.
    pub speed_of_light: f64,
    /// Joules per electron-volt.
    pub ev_to_joule: f64,
}

/// CODATA 2014 recommended values.
pub const CODATA_2014: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_800e-34,
    electron_mass: 9.109_383_56e-31,
    gyromagnetic_ratio: 1.760_859_644e11,
    speed_of_light: 299_792_458.0,
    ev_to_joule: 1.602_176_620_8e-19,
};

/// The canonical constant set.
pub const CONSTANTS: &PhysicalConstants = &CODATA_2014;

impl PhysicalConstants {
    /// ħ/m, the combination that appears in every coupling prefactor.
    pub fn hbar_over_mass(&self) -> f64 {
        self.hbar / self.electron_mass
    }
}

/// The dimensionless coupling product g_s^N g_p^e.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Coupling(pub f64);

impl Coupling {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Domain {
                name: "coupling",
                value,
                requirement: "finite",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Yukawa force range λ in metres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ForceRange(f64);

impl ForceRange {
    pub fn new(lambda: f64) -> Result<Self> {
        require_positive("lambda", lambda).map(Self)
    }

    pub fn meters(self) -> f64 {
        self.0
    }
}

/// Displacement vector from the nucleon to the electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    vector: Vector3<f64>,
    norm: f64,
}

impl Displacement {
    pub fn new(vector: Vector3<f64>) -> Result<Self> {
        let norm = vector.norm();
        require_positive("r", norm)?;
        Ok(Self { vector, norm })
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.vector
    }

    pub fn distance(&self) -> f64 {
        self.norm
    }

    pub fn unit(&self) -> Vector3<f64> {
        self.vector / self.norm
    }
}

/// Radial profile (1/(λr) + 1/r²)·exp(-r/λ) shared by the potential and the field.
#[inline]
pub fn yukawa_radial(r: f64, lambda: f64) -> f64 {
    (1.0 / (lambda * r) + 1.0 / (r * r)) * (-r / lambda).exp()
}

/// Monopole-dipole interaction energy (J) for spin direction `sigma_hat`.
pub fn potential_monopole_dipole(
    r: &Displacement,
    lambda: ForceRange,
    g: Coupling,
    sigma_hat: Vector3<f64>,
) -> Result<f64> {
    check_unit("sigma_hat", &sigma_hat)?;
    let c = CONSTANTS;
    let prefactor = c.hbar * c.hbar * g.0 / (8.0 * PI * c.electron_mass);
    Ok(prefactor * yukawa_radial(r.distance(), lambda.meters()) * sigma_hat.dot(&r.unit()))
}

/// Effective magnetic field (T) at the electron due to a single nucleon.
pub fn effective_field_point(r: &Displacement, lambda: ForceRange, g: Coupling) -> Vector3<f64> {
    let c = CONSTANTS;
    let prefactor = c.hbar * g.0 / (4.0 * PI * c.electron_mass * c.gyromagnetic_ratio);
    r.unit() * (prefactor * yukawa_radial(r.distance(), lambda.meters()))
}

/// Mediator mass in eV for a given force range: m_a c² = ħc/λ.
pub fn lambda_to_alp_mass(lambda: ForceRange) -> f64 {
    let c = CONSTANTS;
    c.hbar * c.speed_of_light / (lambda.meters() * c.ev_to_joule)
}

/// Force range for a mediator mass given in eV.
pub fn alp_mass_to_lambda(mass_ev: f64) -> Result<ForceRange> {
    require_positive("alp_mass", mass_ev)?;
    let c = CONSTANTS;
    ForceRange::new(c.hbar * c.speed_of_light / (mass_ev * c.ev_to_joule))
}

fn check_unit(name: &'static str, v: &Vector3<f64>) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: n,
            requirement: "unit norm",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_z() -> Displacement {
        Displacement::from_components(0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn constants_positive() {
        let c = CONSTANTS;
        for v in [c.hbar, c.electron_mass, c.gyromagnetic_ratio, c.speed_of_light, c.ev_to_joule] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn perpendicular_spin_has_no_energy() {
        let r = Displacement::from_components(1e-6, 0.0, 0.0).unwrap();
        let v = potential_monopole_dipole(
            &r,
            ForceRange::new(3e-6).unwrap(),
            Coupling(1e-12),
            Vector3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let r = unit_z();
        let lam = ForceRange::new(1.0).unwrap();
        assert_eq!(potential_monopole_dipole(&r, lam, Coupling(0.0), Vector3::z()).unwrap(), 0.0);
        assert_eq!(effective_field_point(&r, lam, Coupling(0.0)), Vector3::zeros());
    }

    #[test]
    fn potential_at_unit_range() {
        // (ħ²/8πm)·2·e⁻¹, evaluated at 30 digits with CODATA 2014 constants.
        let v = potential_monopole_dipole(
            &unit_z(),
            ForceRange::new(1.0).unwrap(),
            Coupling(1.0),
            Vector3::z(),
        )
        .unwrap();
        assert_relative_eq!(v, 3.574_036_412_508_458_4e-40, max_relative = 1e-13);
    }

    #[test]
    fn potential_antisymmetric_in_spin() {
        let r = Displacement::from_components(0.3e-6, -0.2e-6, 0.9e-6).unwrap();
        let lam = ForceRange::new(2e-6).unwrap();
        let s = Vector3::new(1.0, 2.0, -0.5).normalize();
        let up = potential_monopole_dipole(&r, lam, Coupling(3.0), s).unwrap();
        let down = potential_monopole_dipole(&r, lam, Coupling(3.0), -s).unwrap();
        assert_eq!(up, -down);
    }

    #[test]
    fn non_unit_spin_rejected() {
        let err = potential_monopole_dipole(
            &unit_z(),
            ForceRange::new(1.0).unwrap(),
            Coupling(1.0),
            Vector3::new(0.0, 0.0, 2.0),
        );
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn field_is_gradient_of_yukawa_scalar() {
        let c = CONSTANTS;
        let lam = 2.0e-6;
        let scalar = |r: f64| c.hbar / (4.0 * PI * c.electron_mass) * (-r / lam).exp() / r;
        for r in [0.1e-6, 1.0e-6, 5.0e-6] {
            let h = r * 1e-5;
            let deriv = (scalar(r + h) - scalar(r - h)) / (2.0 * h);
            let b = effective_field_point(
                &Displacement::from_components(0.0, r, 0.0).unwrap(),
                ForceRange::new(lam).unwrap(),
                Coupling(1.0),
            );
            assert_relative_eq!(b.norm(), -deriv / c.gyromagnetic_ratio, max_relative = 1e-8);
            assert_relative_eq!(b.normalize().y, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn linear_in_coupling() {
        let r = Displacement::from_components(0.4e-6, 0.1e-6, 0.7e-6).unwrap();
        let lam = ForceRange::new(1e-6).unwrap();
        let s = Vector3::new(0.0, 0.6, 0.8);
        let b1 = effective_field_point(&r, lam, Coupling(1.0));
        let v1 = potential_monopole_dipole(&r, lam, Coupling(1.0), s).unwrap();
        for k in [2.0, 10.0, -1.0] {
            let bk = effective_field_point(&r, lam, Coupling(k));
            let vk = potential_monopole_dipole(&r, lam, Coupling(k), s).unwrap();
            assert_eq!(bk, b1 * k);
            assert_eq!(vk, v1 * k);
        }
    }

    #[test]
    fn field_decreases_with_distance() {
        let lam = ForceRange::new(20e-6).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..=60 {
            let r = 1e-8 * 10f64.powf(i as f64 * 5.0 / 60.0);
            let b = effective_field_point(
                &Displacement::from_components(r, 0.0, 0.0).unwrap(),
                lam,
                Coupling(1.0),
            )
            .norm();
            assert!(b < last, "not decreasing at r = {r}");
            last = b;
        }
    }

    #[test]
    fn potential_is_zeeman_energy_in_effective_field() {
        // Electron: γ_e = -|γ|, so H = -γ_e (ħ/2) σ·B = |γ| (ħ/2) σ·B.
        let c = CONSTANTS;
        let gamma_e = -c.gyromagnetic_ratio;
        let r = Displacement::from_components(0.2e-6, 0.5e-6, -0.3e-6).unwrap();
        let s = Vector3::new(0.3, -0.4, 0.5).normalize();
        for lam in [1e-7, 1e-6, 2e-5] {
            let lam = ForceRange::new(lam).unwrap();
            let v = potential_monopole_dipole(&r, lam, Coupling(2.5), s).unwrap();
            let b = effective_field_point(&r, lam, Coupling(2.5));
            let zeeman = -gamma_e * c.hbar / 2.0 * s.dot(&b);
            assert_relative_eq!(v, zeeman, max_relative = 1e-12);
        }
    }

    #[test]
    fn alp_mass_conversions() {
        // ħc = 197.327 eV·nm
        let l1 = alp_mass_to_lambda(1.0).unwrap().meters();
        assert_relative_eq!(l1, 1.973_269_787_831_649e-7, max_relative = 1e-12);
        let l2 = alp_mass_to_lambda(1e-5).unwrap().meters();
        assert_relative_eq!(l2, 1.973_269_787_831_649e-2, max_relative = 1e-12);

        let m_short = lambda_to_alp_mass(ForceRange::new(0.2e-6).unwrap());
        let m_long = lambda_to_alp_mass(ForceRange::new(0.02).unwrap());
        assert!((m_short - 1.0).abs() < 0.02);
        assert!((m_long / 1e-5 - 1.0).abs() < 0.02);
    }

    #[test]
    fn domain_errors() {
        assert!(ForceRange::new(0.0).is_err());
        assert!(ForceRange::new(-1.0).is_err());
        assert!(Displacement::from_components(0.0, 0.0, 0.0).is_err());
        assert!(alp_mass_to_lambda(0.0).is_err());
        assert!(Coupling::new(f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn lambda_mass_round_trip(exp in -9.0f64..1.0) {
            let lam = ForceRange::new(10f64.powf(exp)).unwrap();
            let back = alp_mass_to_lambda(lambda_to_alp_mass(lam)).unwrap();
            proptest::prop_assert!((back.meters() / lam.meters() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn unit_vector_has_unit_norm(x in -1.0f64..1.0, y in -1.0f64..1.0, z in 0.01f64..1.0) {
            let d = Displacement::from_components(x, y, z).unwrap();
            proptest::prop_assert!((d.unit().norm() - 1.0).abs() < 1e-12);
        }
    }
}
