//! Vibrating-source measurement protocol.
//!
//! The source oscillates as `d(t) = d0 + A[1 + cos(ω t)]`, so `t = 0` is the
//! far turning point and the equilibrium crossings sit at `τ/2 + nτ` with
//! `τ = π/ω`. Pulses are ideal and fire on those crossings. A spin echo
//! accumulates
//!
//! ```text
//! φ = γ cosθ [ ∫_{τ/2}^{3τ/2} B(t) dt − ∫_{3τ/2}^{5τ/2} B(t) dt ]
//! ```
//!
//! and the readout after the final π/2 pulse of phase φ_mw is
//! `P0 = 1/2 + 1/2 cos(φ_mw + φ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::{effective_field_mass, SourceMass};
use crate::physics::{Coupling, CONSTANTS};
use crate::quadrature::{integrate, QuadOptions};

/// Motion of the source mass relative to the spin.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationProfile {
    /// Closest approach d0, m.
    pub d0: f64,
    pub d0_uncertainty: f64,
    /// Vibration amplitude A, m.
    pub amplitude: f64,
    pub amplitude_uncertainty: f64,
    /// Angular frequency ω_m, rad/s.
    pub omega_m: f64,
}

impl VibrationProfile {
    /// d0 = 0.5(1) µm, A = 41.1(1) nm, ω_m = 1.18×10⁶ rad/s.
    pub fn tuning_fork() -> Self {
        Self {
            d0: 0.5e-6,
            d0_uncertainty: 0.1e-6,
            amplitude: 41.1e-9,
            amplitude_uncertainty: 0.1e-9,
            omega_m: 1.18e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("d0", self.d0)?;
        require_non_negative("d0_uncertainty", self.d0_uncertainty)?;
        require_non_negative("amplitude", self.amplitude)?;
        require_non_negative("amplitude_uncertainty", self.amplitude_uncertainty)?;
        require_positive("omega_m", self.omega_m)?;
        if self.d0_uncertainty >= self.d0 {
            return Err(Error::Domain {
                name: "d0_uncertainty",
                value: self.d0_uncertainty,
                requirement: "< d0",
            });
        }
        Ok(())
    }

    /// Half the vibration period, τ = π/ω_m.
    pub fn half_period(&self) -> f64 {
        PI / self.omega_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Ramsey,
    SpinEcho,
    /// CPMG with `K` π pulses.
    Cpmg(u32),
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceKind::Ramsey => write!(f, "ramsey"),
            SequenceKind::SpinEcho => write!(f, "echo"),
            SequenceKind::Cpmg(k) => write!(f, "cpmg:{k}"),
        }
    }
}

/// Pulse sequence synchronized to the vibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSequence {
    pub kind: SequenceKind,
    /// Angle between the effective field and the NV axis, rad.
    pub theta: f64,
}

/// arccos(1/√3): the NV axis in a [100]-cut crystal relative to the surface normal.
pub fn default_theta() -> f64 {
    (1.0 / 3f64.sqrt()).acos()
}

impl PulseSequence {
    pub fn spin_echo() -> Self {
        Self {
            kind: SequenceKind::SpinEcho,
            theta: default_theta(),
        }
    }

    pub fn cpmg(k: u32) -> Self {
        Self {
            kind: SequenceKind::Cpmg(k),
            theta: default_theta(),
        }
    }

    pub fn ramsey() -> Self {
        Self {
            kind: SequenceKind::Ramsey,
            theta: default_theta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SequenceKind::Cpmg(0) = self.kind {
            return Err(Error::Domain {
                name: "cpmg_pulses",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::Domain {
                name: "theta",
                value: self.theta,
                requirement: "within [0, π/2]",
            });
        }
        Ok(())
    }

    /// Phase multiplier relative to a single echo bracket: 1 for the echo, K/2 for CPMG-K.
    pub fn bracket_multiplier(&self) -> f64 {
        match self.kind {
            SequenceKind::Cpmg(k) => k as f64 / 2.0,
            _ => 1.0,
        }
    }
}

/// Source–spin gap at time `t`.
pub fn distance_at(t: f64, vib: &VibrationProfile) -> f64 {
    vib.d0 + vib.amplitude * (1.0 + (vib.omega_m * t).cos())
}

/// `∫_{τ/2}^{3τ/2} [s(t) − s(t + τ)] dt`, i.e. the echo-weighted integral of
/// `signal` over one vibration period.
pub fn echo_bracket<F: Fn(f64) -> f64>(signal: F, tau: f64, rel_tol: f64) -> Result<f64> {
    let opts = QuadOptions::relative(rel_tol);
    integrate(|t| signal(t) - signal(t + tau), 0.5 * tau, 1.5 * tau, &opts).map(|r| r.value)
}

fn echo_phase(
    lambda: f64,
    g: Coupling,
    source: &SourceMass,
    vib: &VibrationProfile,
    seq: &PulseSequence,
    rel_tol: f64,
) -> Result<f64> {
    require_positive("lambda", lambda)?;
    source.validate()?;
    vib.validate()?;
    seq.validate()?;
    let field = |t: f64| {
        effective_field_mass(lambda, source, distance_at(t, vib), g).expect("arguments validated above")
    };
    let bracket = echo_bracket(field, vib.half_period(), rel_tol)?;
    Ok(CONSTANTS.gyromagnetic_ratio * seq.theta.cos() * bracket)
}

/// Spin-echo phase (rad) accumulated from the vibrating source.
pub fn phase_spin_echo(
    lambda: f64,
    g: Coupling,
    source: &SourceMass,
    vib: &VibrationProfile,
    seq: &PulseSequence,
    rel_tol: f64,
) -> Result<f64> {
    if seq.kind != SequenceKind::SpinEcho {
        return Err(Error::WrongSequence {
            expected: "spin echo",
            found: seq.kind.to_string(),
        });
    }
    echo_phase(lambda, g, source, vib, seq, rel_tol)
}

/// CPMG-K phase (rad): the one-period echo bracket scaled by K/2, with the
/// vibration synchronized so every π pulse falls on an equilibrium crossing.
pub fn phase_cpmg(
    lambda: f64,
    g: Coupling,
    source: &SourceMass,
    vib: &VibrationProfile,
    seq: &PulseSequence,
    rel_tol: f64,
) -> Result<f64> {
    let SequenceKind::Cpmg(k) = seq.kind else {
        return Err(Error::WrongSequence {
            expected: "CPMG",
            found: seq.kind.to_string(),
        });
    };
    Ok(k as f64 / 2.0 * echo_phase(lambda, g, source, vib, seq, rel_tol)?)
}

/// Ramsey phase γ B cosθ τ_free for a source held at a fixed gap.
///
/// Illustrates why the echo is needed; not used for limits.
pub fn phase_ramsey(
    lambda: f64,
    g: Coupling,
    source: &SourceMass,
    gap: f64,
    theta: f64,
    free_time: f64,
) -> Result<f64> {
    require_non_negative("free_time", free_time)?;
    let b = effective_field_mass(lambda, source, gap, g)?;
    Ok(CONSTANTS.gyromagnetic_ratio * b * theta.cos() * free_time)
}

/// Population of |m_S = 0⟩ after the final π/2 pulse.
pub fn population_ground(phi: f64, phi_mw: f64) -> f64 {
    0.5 + 0.5 * (phi_mw + phi).cos()
}

/// Phenomenological photoluminescence readout.
///
/// Mean counts per shot are `I0 + A_PL cos(φ_mw + φ)` with
/// `I0 = baseline + photons_per_shot` and `A_PL = contrast · photons_per_shot`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub photons_per_shot: f64,
    pub contrast: f64,
    pub baseline: f64,
    pub shots: u64,
    pub seed: u64,
}

impl ReadoutModel {
    pub fn validate(&self) -> Result<()> {
        require_non_negative("photons_per_shot", self.photons_per_shot)?;
        require_non_negative("baseline", self.baseline)?;
        if !(0.0..=1.0).contains(&self.contrast) {
            return Err(Error::Domain {
                name: "contrast",
                value: self.contrast,
                requirement: "within [0, 1]",
            });
        }
        if self.shots == 0 {
            return Err(Error::Domain {
                name: "shots",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        Ok(())
    }

    pub fn offset(&self) -> f64 {
        self.baseline + self.photons_per_shot
    }

    pub fn fringe_amplitude(&self) -> f64 {
        self.contrast * self.photons_per_shot
    }

    pub fn mean_counts(&self, phi: f64, phi_mw: f64) -> f64 {
        self.offset() + self.fringe_amplitude() * (phi_mw + phi).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutPoint {
    pub phi_mw: f64,
    pub mean_counts: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulatedReadout {
    pub points: Vec<ReadoutPoint>,
}

/// `n` equally spaced microwave phases over [0, 2π).
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Draw a seeded synthetic readout curve.
///
/// The summed counts over `shots` repetitions at each phase are drawn from a
/// single Poisson variate with mean `shots · μ`, which has exactly the
/// distribution of the sum of per-shot Poisson counts. The standard error uses
/// the Poisson variance estimate `max(N, 1) / shots²`.
pub fn simulate_readout(phi_true: f64, phi_mw_grid: &[f64], model: &ReadoutModel) -> Result<SimulatedReadout> {
    model.validate()?;
    if phi_mw_grid.is_empty() {
        return Err(Error::Domain {
            name: "phi_mw_grid",
            value: 0.0,
            requirement: "non-empty",
        });
    }
    if let Some(w) = phi_mw_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain {
            name: "phi_mw_grid",
            value: w[1],
            requirement: "strictly increasing",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let shots = model.shots as f64;
    let points = phi_mw_grid
        .iter()
        .map(|&phi_mw| {
            let mu = model.mean_counts(phi_true, phi_mw).max(0.0) * shots;
            let total = if mu > 0.0 {
                Poisson::new(mu).expect("positive finite mean").sample(&mut rng)
            } else {
                0.0
            };
            ReadoutPoint {
                phi_mw,
                mean_counts: total / shots,
                std_error: total.max(1.0).sqrt() / shots,
            }
        })
        .collect();
    Ok(SimulatedReadout { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lens() -> SourceMass {
        SourceMass::fused_silica_lens()
    }

    #[test]
    fn distance_landmarks() {
        let v = VibrationProfile::tuning_fork();
        let w = v.omega_m;
        assert_eq!(distance_at(0.0, &v), v.d0 + 2.0 * v.amplitude);
        assert_relative_eq!(distance_at(PI / w, &v), v.d0, max_relative = 1e-15);
        assert_relative_eq!(distance_at(PI / (2.0 * w), &v), v.d0 + v.amplitude, max_relative = 1e-15);
        for i in 0..100 {
            let t = i as f64 * 0.1 / w;
            let d = distance_at(t, &v);
            assert!(d >= v.d0 && d <= v.d0 + 2.0 * v.amplitude);
            assert_relative_eq!(d, distance_at(t + 2.0 * PI / w, &v), max_relative = 1e-12);
        }
    }

    #[test]
    fn static_source_cancels() {
        let mut v = VibrationProfile::tuning_fork();
        v.amplitude = 0.0;
        let phi = phase_spin_echo(20e-6, Coupling(1e-10), &lens(), &v, &PulseSequence::spin_echo(), 1e-10).unwrap();
        assert_eq!(phi, 0.0);
    }

    #[test]
    fn zero_coupling_no_phase() {
        let v = VibrationProfile::tuning_fork();
        let phi = phase_spin_echo(20e-6, Coupling(0.0), &lens(), &v, &PulseSequence::spin_echo(), 1e-10).unwrap();
        assert_eq!(phi, 0.0);
        let phi = phase_cpmg(20e-6, Coupling(0.0), &lens(), &v, &PulseSequence::cpmg(8), 1e-10).unwrap();
        assert_eq!(phi, 0.0);
    }

    #[test]
    fn near_half_dominates() {
        let v = VibrationProfile::tuning_fork();
        let phi = phase_spin_echo(20e-6, Coupling(1.0), &lens(), &v, &PulseSequence::spin_echo(), 1e-10).unwrap();
        assert!(phi > 0.0);
    }

    #[test]
    fn wrong_sequence_rejected() {
        let v = VibrationProfile::tuning_fork();
        assert!(matches!(
            phase_spin_echo(1e-6, Coupling(1.0), &lens(), &v, &PulseSequence::cpmg(4), 1e-8),
            Err(Error::WrongSequence { .. })
        ));
        assert!(matches!(
            phase_cpmg(1e-6, Coupling(1.0), &lens(), &v, &PulseSequence::spin_echo(), 1e-8),
            Err(Error::WrongSequence { .. })
        ));
        assert!(PulseSequence::cpmg(0).validate().is_err());
    }

    // Characterization of the printed prefactors: CPMG-2 and the echo coincide.
    #[test]
    fn cpmg_two_equals_echo() {
        let v = VibrationProfile::tuning_fork();
        let g = Coupling(1e-14);
        let echo = phase_spin_echo(5e-6, g, &lens(), &v, &PulseSequence::spin_echo(), 1e-12).unwrap();
        let cpmg = phase_cpmg(5e-6, g, &lens(), &v, &PulseSequence::cpmg(2), 1e-12).unwrap();
        assert_relative_eq!(echo, cpmg, max_relative = 1e-14);
    }

    #[test]
    fn cpmg_linear_in_pulse_count() {
        let v = VibrationProfile::tuning_fork();
        let g = Coupling(1e-14);
        let p8 = phase_cpmg(5e-6, g, &lens(), &v, &PulseSequence::cpmg(8), 1e-12).unwrap();
        let p1024 = phase_cpmg(5e-6, g, &lens(), &v, &PulseSequence::cpmg(1024), 1e-12).unwrap();
        assert_relative_eq!(p1024 / p8, 128.0, max_relative = 1e-13);
    }

    #[test]
    fn half_period_shift_flips_sign() {
        let v = VibrationProfile::tuning_fork();
        let tau = v.half_period();
        let src = lens();
        let field = |t: f64| effective_field_mass(2e-6, &src, distance_at(t, &v), Coupling(1.0)).unwrap();
        let a = echo_bracket(field, tau, 1e-12).unwrap();
        let b = echo_bracket(|t| field(t + tau), tau, 1e-12).unwrap();
        assert!(a > 0.0);
        assert_relative_eq!(a, -b, max_relative = 1e-10);
    }

    #[test]
    fn echo_phase_stable_under_fixed_rule_refinement() {
        // composite Simpson on the two half-periods, independent of the adaptive engine
        let v = VibrationProfile::tuning_fork();
        let src = lens();
        let lam = 3e-6;
        let g = Coupling(1e-12);
        let tau = v.half_period();
        let gamma_cos = CONSTANTS.gyromagnetic_ratio * default_theta().cos();
        let simpson = |n: usize| {
            let f = |t: f64| effective_field_mass(lam, &src, distance_at(t, &v), g).unwrap();
            let integ = |a: f64, b: f64| {
                let h = (b - a) / n as f64;
                let mut s = f(a) + f(b);
                for i in 1..n {
                    s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * h / 3.0
            };
            gamma_cos * (integ(0.5 * tau, 1.5 * tau) - integ(1.5 * tau, 2.5 * tau))
        };
        let adaptive = phase_spin_echo(lam, g, &src, &v, &PulseSequence::spin_echo(), 1e-12).unwrap();
        let coarse = simpson(200);
        let fine = simpson(400);
        assert_relative_eq!(fine, adaptive, max_relative = 1e-9);
        // Richardson: the Simpson error shrinks ~16× per halving
        assert!((fine - adaptive).abs() <= (coarse - adaptive).abs() + 1e-15 * adaptive.abs());
    }

    #[test]
    fn phase_nearly_linear_in_amplitude() {
        let mut v = VibrationProfile::tuning_fork();
        let seq = PulseSequence::spin_echo();
        for a in [10e-9, 25e-9, 41.1e-9, 50e-9] {
            v.amplitude = a;
            let p1 = phase_spin_echo(20e-6, Coupling(1.0), &lens(), &v, &seq, 1e-12).unwrap();
            v.amplitude = 2.0 * a;
            let p2 = phase_spin_echo(20e-6, Coupling(1.0), &lens(), &v, &seq, 1e-12).unwrap();
            let ratio = p2 / p1;
            assert!((1.9..=2.1).contains(&ratio), "A = {a}: ratio {ratio}");
        }
    }

    #[test]
    fn ramsey_phase_scales_with_time() {
        let src = lens();
        let p1 = phase_ramsey(5e-6, Coupling(1e-12), &src, 1e-6, default_theta(), 1e-6).unwrap();
        let p2 = phase_ramsey(5e-6, Coupling(1e-12), &src, 1e-6, default_theta(), 2e-6).unwrap();
        assert!(p1 > 0.0);
        assert_relative_eq!(p2, 2.0 * p1, max_relative = 1e-15);
    }

    #[test]
    fn population_values() {
        assert_eq!(population_ground(0.0, 0.0), 1.0);
        assert!(population_ground(0.0, PI) < 1e-16);
        assert_relative_eq!(population_ground(FRAC_PI_2, 0.0), 0.5, epsilon = 1e-16);
    }

    proptest::proptest! {
        #[test]
        fn population_bounded_and_periodic(phi in -10.0f64..10.0, mw in -10.0f64..10.0) {
            let p = population_ground(phi, mw);
            proptest::prop_assert!((0.0..=1.0).contains(&p));
            proptest::prop_assert!((p - population_ground(phi + 2.0 * PI, mw)).abs() < 1e-12);
            proptest::prop_assert!((p - population_ground(phi, mw + 2.0 * PI)).abs() < 1e-12);
        }
    }

    fn model(seed: u64) -> ReadoutModel {
        ReadoutModel {
            photons_per_shot: 0.02,
            contrast: 0.3,
            baseline: 0.0,
            shots: 100_000,
            seed,
        }
    }

    #[test]
    fn readout_is_deterministic() {
        let grid = phase_grid(12);
        let a = simulate_readout(0.1, &grid, &model(7)).unwrap();
        let b = simulate_readout(0.1, &grid, &model(7)).unwrap();
        let c = simulate_readout(0.1, &grid, &model(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for p in &a.points {
            assert!(p.std_error > 0.0);
        }
    }

    #[test]
    fn flat_readout_without_contrast() {
        let mut m = model(1);
        m.contrast = 0.0;
        m.shots = 1;
        m.photons_per_shot = 0.0;
        let r = simulate_readout(0.0, &phase_grid(6), &m).unwrap();
        assert!(r.points.iter().all(|p| p.mean_counts == 0.0));
    }

    #[test]
    fn readout_rejects_bad_grid() {
        assert!(simulate_readout(0.0, &[], &model(1)).is_err());
        assert!(simulate_readout(0.0, &[0.0, 1.0, 1.0], &model(1)).is_err());
        let mut m = model(1);
        m.shots = 0;
        assert!(simulate_readout(0.0, &[0.0], &m).is_err());
    }

    #[test]
    fn phase_grid_spacing() {
        let g = phase_grid(12);
        assert_eq!(g.len(), 12);
        assert_eq!(g[0], 0.0);
        assert!(g[11] < 2.0 * PI);
    }
}
