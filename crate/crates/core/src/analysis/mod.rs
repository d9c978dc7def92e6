//! Diagnostics, the effective potential, phase detection and residual checks.

pub mod diagnostics;
pub mod phases;
pub mod potential;
pub mod residuals;

pub use diagnostics::{
    d_of_z, diagnostic_row, energy_rate, energy_split, etilde_minus_e, jellett, modified_energy, omega_cross_a, routh, torque, xi,
    DiagnosticRow, EnergySplit, EtildeMinusE, Torque,
};
pub use phases::{detect_phases, PhaseGates, PhaseReport};
pub use potential::{
    asymptotic_constants, effective_potential, mass_function, potential_minimum, routh_offsets, t_upp, thresholds, AsymptoticConstants,
    PotentialError, PotentialMinimum, Thresholds,
};
pub use residuals::{
    integrated_form_residuals, met_residual, met_residual_at, phi_dot_identity, phi_dot_identity_at, IntegratedFormResiduals,
    PhiDotIdentity,
};
