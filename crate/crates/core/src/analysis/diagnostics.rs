//! Scalar diagnostics evaluated pointwise on a state.

use crate::dynamics::{self, DynamicsError};
use crate::model::{Params, State};

use super::potential;

/// Jellett's integral `λ = R I1 φ̇ sin²θ − R I3 ω3 (α − cosθ)`.
pub fn jellett(s: &State, p: &Params) -> f64 {
    let (sin, cos) = s.theta.sin_cos();
    p.r * p.i1 * s.phi_dot * sin * sin - p.r * p.i3 * s.omega3 * (p.alpha - cos)
}

/// `d(z) = γ + σ(α − z)² + σγ(1 − z²)`.
pub fn d_of_z(z: f64, p: &Params) -> f64 {
    p.gamma + p.sigma * (p.alpha - z).powi(2) + p.sigma * p.gamma * (1.0 - z * z)
}

/// Routh function `D = I3 ω3 √d(cosθ)`.
pub fn routh(s: &State, p: &Params) -> f64 {
    p.i3 * s.omega3 * d_of_z(s.theta.cos(), p).sqrt()
}

/// Energy with the rolling constraint substituted for the gliding velocity.
pub fn modified_energy(s: &State, p: &Params) -> f64 {
    let (sin, cos) = s.theta.sin_cos();
    let (td, pd, w3) = (s.theta_dot, s.phi_dot, s.omega3);
    let am = p.alpha - cos;
    let rot = 0.5 * (p.i1 * pd * pd * sin * sin + p.i1 * td * td + p.i3 * w3 * w3);
    let pot = p.m * p.g * p.r * (1.0 - p.alpha * cos);
    let roll = 0.5 * p.m * p.r * p.r * (am * am * (td * td + pd * pd * sin * sin) + sin * sin * (td * td + w3 * w3 + 2.0 * w3 * pd * am));
    rot + pot + roll
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySplit {
    pub total: f64,
    pub translational: f64,
    pub rotational: f64,
    pub potential: f64,
}

/// Kinetic energy of the centre of mass, rotational and potential energy.
pub fn energy_split(s: &State, p: &Params) -> EnergySplit {
    let (sin, cos) = s.theta.sin_cos();
    let (td, pd, w3) = (s.theta_dot, s.phi_dot, s.omega3);
    let am = p.alpha - cos;
    let vx = s.nu_x * cos - p.r * td * am;
    let vy = s.nu_y - p.r * sin * (w3 + pd * am);
    let vz = s.nu_x * sin + p.r * td * sin;
    let translational = 0.5 * p.m * (vx * vx + vy * vy + vz * vz);
    let rotational = 0.5 * (p.i1 * (td * td + pd * pd * sin * sin) + p.i3 * w3 * w3);
    let potential = p.m * p.g * p.r * (1.0 - p.alpha * cos);
    EnergySplit {
        total: translational + rotational + potential,
        translational,
        rotational,
        potential,
    }
}

/// `Ė = −μ g_n |v_A|²`.
pub fn energy_rate(s: &State, p: &Params) -> Result<f64, DynamicsError> {
    let gn = dynamics::normal_force(s, p)?.value();
    Ok(energy_rate_with(s, p, gn))
}

pub(crate) fn energy_rate_with(s: &State, p: &Params, gn: f64) -> f64 {
    -p.mu * gn * (s.nu_x * s.nu_x + s.nu_y * s.nu_y)
}

/// Torque about the centre of mass in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torque {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn torque(s: &State, p: &Params) -> Result<Torque, DynamicsError> {
    let gn = dynamics::normal_force(s, p)?.value();
    Ok(torque_with(s, p, gn))
}

pub(crate) fn torque_with(s: &State, p: &Params, gn: f64) -> Torque {
    let (sin, cos) = s.theta.sin_cos();
    let (r, a, mu) = (p.r, p.alpha, p.mu);
    Torque {
        x: -r * (1.0 - a * cos) * mu * gn * s.nu_y,
        y: -r * a * gn * sin + r * mu * gn * s.nu_x * (1.0 - a * cos),
        z: -r * a * mu * gn * s.nu_y * sin,
    }
}

/// `ω × a` in rotating-frame components.
pub fn omega_cross_a(s: &State, p: &Params) -> [f64; 3] {
    let (sin, cos) = s.theta.sin_cos();
    let w = [
        -s.phi_dot * sin * cos + s.omega3 * sin,
        s.theta_dot,
        s.phi_dot * sin * sin + s.omega3 * cos,
    ];
    let a = [p.r * p.alpha * sin, 0.0, p.r * (p.alpha * cos - 1.0)];
    [w[1] * a[2] - w[2] * a[1], w[2] * a[0] - w[0] * a[2], w[0] * a[1] - w[1] * a[0]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtildeMinusE {
    /// `−½ m |v_A|² + m v_A·(ω × a)`.
    pub exact: f64,
    /// `−½ m νx² + ½ m νy (2|ω × a| − νy)`.
    pub estimate: f64,
}

pub fn etilde_minus_e(s: &State, p: &Params) -> EtildeMinusE {
    let wa = omega_cross_a(s, p);
    let (nx, ny) = (s.nu_x, s.nu_y);
    let norm = (wa[0] * wa[0] + wa[1] * wa[1] + wa[2] * wa[2]).sqrt();
    EtildeMinusE {
        exact: -0.5 * p.m * (nx * nx + ny * ny) + p.m * (nx * wa[0] + ny * wa[1]),
        estimate: -0.5 * p.m * nx * nx + 0.5 * p.m * ny * (2.0 * norm - ny),
    }
}

/// Gyroscopic balance `ξ = I3 ω3 − I1 φ̇ cosθ`.
pub fn xi(s: &State, p: &Params) -> f64 {
    p.i3 * s.omega3 - p.i1 * s.phi_dot * s.theta.cos()
}

/// Every per-sample diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub gn: f64,
    pub lambda: f64,
    pub d: f64,
    pub etilde: f64,
    pub e: f64,
    pub e_trans: f64,
    pub e_rot: f64,
    pub e_pot: f64,
    pub e_dot: f64,
    pub tau_x: f64,
    pub tau_y: f64,
    pub tau_z: f64,
    pub xi: f64,
    /// Main-equation residual against the reference `λ`.
    pub met_residual: f64,
    /// Residual of the exact `φ̇ sin²θ` identity against the reference `λ`.
    pub phi_dot_identity_residual: f64,
}

/// Evaluates all diagnostics at `(t, s)`, with `lambda0` the value of
/// Jellett's integral the run started from.
pub fn diagnostic_row(t: f64, s: &State, p: &Params, lambda0: f64) -> Result<DiagnosticRow, DynamicsError> {
    let gn = dynamics::normal_force(s, p)?.value();
    let split = energy_split(s, p);
    let tau = torque_with(s, p, gn);
    let etilde = modified_energy(s, p);
    let d = routh(s, p);
    let z = s.theta.cos();
    let met_residual =
        etilde - potential::mass_function(z, p) * s.theta_dot * s.theta_dot - potential::effective_potential_unchecked(z, d, lambda0, p);
    Ok(DiagnosticRow {
        t,
        gn,
        lambda: jellett(s, p),
        d,
        etilde,
        e: split.total,
        e_trans: split.translational,
        e_rot: split.rotational,
        e_pot: split.potential,
        e_dot: energy_rate_with(s, p, gn),
        tau_x: tau.x,
        tau_y: tau.y,
        tau_z: tau.z,
        xi: xi(s, p),
        met_residual,
        phi_dot_identity_residual: super::residuals::phi_dot_identity_at(s, p, lambda0).exact,
    })
}
