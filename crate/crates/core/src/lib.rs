//! Axion-mediated monopole-dipole forces probed by a single NV electron spin.
//!
//! The crate models the effective field of a vibrating half-ball source mass,
//! the phase a synchronized spin echo (or CPMG) sequence accumulates from it,
//! the fringe fit that recovers that phase from photoluminescence data, and
//! the conversion of a phase bound into an exclusion curve for g_s^N g_p^e.
//!
//! Modules, bottom up:
//!
//! - [`physics`]: constants, point-nucleon potential and field, λ ↔ m_a
//! - [`quadrature`]: adaptive Gauss–Kronrod integration
//! - [`geometry`]: half-ball shape factor, closed form and volume quadrature
//! - [`sensor`]: vibration, echo/CPMG phase, synthetic readout
//! - [`inference`]: cosine fit and phase differencing
//! - [`limits`]: sensitivity, nuisance minimization, exclusion curves

pub mod error;
pub mod geometry;
pub mod inference;
pub mod limits;
pub mod physics;
pub mod quadrature;
pub mod sensor;

pub use error::{Error, Result};
pub use geometry::{
    effective_field_mass, shape_factor_closed_form, shape_factor_quadrature, ShapeFactorResult, SourceMass,
};
pub use inference::{
    difference_phase, fit_cosine, fit_cosine_with, phase_upper_bound, wrap_phase, FitResult, PhaseMeasurement,
    UncertaintyMode,
};
pub use limits::{
    bound_at_lambda, default_lambda_grid, exclusion_curve, projected_scenario, projected_scenario_with,
    sensitivity_h, ExclusionCurve, ExclusionPoint, ExperimentConfig, Interval, LambdaBound, NuisanceBox,
    OperatingPoint,
};
pub use physics::{
    alp_mass_to_lambda, effective_field_point, lambda_to_alp_mass, potential_monopole_dipole, Coupling,
    Displacement, ForceRange, PhysicalConstants, CONSTANTS,
};
pub use sensor::{
    distance_at, phase_cpmg, phase_spin_echo, population_ground, simulate_readout, PulseSequence, ReadoutModel,
    ReadoutPoint, SequenceKind, SimulatedReadout, VibrationProfile,
};
