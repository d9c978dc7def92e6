//! Simulation and analysis of the tippe top: a sphere with an eccentric
//! centre of mass spinning on a flat table with sliding friction.

// `!(x > 0.0)` style checks are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod integrator;
pub mod model;
pub mod sweep;

pub use dynamics::{euler_rhs, normal_force, DynamicsError, NormalForce, StateDerivative};
pub use integrator::{integrate, IntegrationConfig, IntegrationError, Run, Trajectory};
pub use model::{ModelError, Params, State};
