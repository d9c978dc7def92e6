//! Identity and rate-law residuals along trajectories.

use nalgebra::Vector3;

use crate::integrator::Trajectory;
use crate::model::{Frames, Params, State};

use super::diagnostics::{d_of_z, jellett, modified_energy, routh};
use super::potential::{effective_potential_unchecked, mass_function};

/// `Ẽ − g(z) θ̇² − V(z, D, λ)` at one state; vanishes identically when
/// `lambda` is the state's own Jellett integral.
pub fn met_residual_at(s: &State, p: &Params, lambda: f64) -> f64 {
    let z = s.theta.cos();
    modified_energy(s, p) - mass_function(z, p) * s.theta_dot * s.theta_dot - effective_potential_unchecked(z, routh(s, p), lambda, p)
}

/// Main-equation residual at every sample, using `λ` of the first sample.
pub fn met_residual(traj: &Trajectory, p: &Params) -> Vec<f64> {
    let Some(first) = traj.first() else {
        return Vec::new();
    };
    let lambda0 = jellett(&first.state, p);
    traj.samples().iter().map(|smp| met_residual_at(&smp.state, p, lambda0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiDotIdentity {
    /// `φ̇ sin²θ − λ/(R I1) − (I3/I1) ω3 (α − cosθ)`.
    pub exact: f64,
    /// `φ̇ sin²θ − λ/(R I3) − ω3 (α − cosθ)`, which only vanishes for `γ = 1`.
    pub printed: f64,
}

pub fn phi_dot_identity_at(s: &State, p: &Params, lambda: f64) -> PhiDotIdentity {
    let (sin, cos) = s.theta.sin_cos();
    let lhs = s.phi_dot * sin * sin;
    let am = p.alpha - cos;
    PhiDotIdentity {
        exact: lhs - (lambda / (p.r * p.i1) + p.i3 / p.i1 * s.omega3 * am),
        printed: lhs - (lambda / (p.r * p.i3) + s.omega3 * am),
    }
}

pub fn phi_dot_identity(traj: &Trajectory, p: &Params) -> Vec<PhiDotIdentity> {
    let Some(first) = traj.first() else {
        return Vec::new();
    };
    let lambda0 = jellett(&first.state, p);
    traj.samples()
        .iter()
        .map(|smp| phi_dot_identity_at(&smp.state, p, lambda0))
        .collect()
}

/// Finite-difference check of the rate laws for `λ`, `D` and `Ẽ`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegratedFormResiduals {
    pub dt: f64,
    pub t: Vec<f64>,
    /// `dλ/dt`.
    pub lambda_rate: Vec<f64>,
    /// `dD/dt − (γ m / (α √d)) (ẑ × a)·v̇_A`.
    pub d_rate: Vec<f64>,
    /// `dẼ/dt − m (ω × a)·v̇_A`.
    pub etilde_rate: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl IntegratedFormResiduals {
    pub fn max_lambda_rate(&self) -> f64 {
        max_abs(&self.lambda_rate)
    }

    pub fn max_d_rate(&self) -> f64 {
        max_abs(&self.d_rate)
    }

    pub fn max_etilde_rate(&self) -> f64 {
        max_abs(&self.etilde_rate)
    }
}

struct Kinematics {
    omega: Vector3<f64>,
    a: Vector3<f64>,
    v_a: Vector3<f64>,
}

fn kinematics(s: &State, phi: f64, p: &Params) -> Kinematics {
    let f = Frames::new(s.theta, phi);
    let omega = f.e1 * (-s.phi_dot * s.theta.sin()) + f.y_hat * s.theta_dot + f.e3 * s.omega3;
    Kinematics {
        omega,
        a: (f.e3 * p.alpha - Vector3::z()) * p.r,
        v_a: f.x_hat * s.nu_x + f.y_hat * s.nu_y,
    }
}

/// Resamples `traj` at spacing `dt` and compares central differences of
/// `λ`, `D`, `Ẽ` with their rate laws, differentiating the inertial gliding
/// velocity the same way. Residuals carry an `O(dt²)` truncation error.
pub fn integrated_form_residuals(traj: &Trajectory, p: &Params, dt: f64) -> IntegratedFormResiduals {
    let samples = traj.resample(dt);
    let mut out = IntegratedFormResiduals { dt, ..Default::default() };
    if samples.len() < 3 {
        return out;
    }
    let lam: Vec<f64> = samples.iter().map(|s| jellett(&s.state, p)).collect();
    let dd: Vec<f64> = samples.iter().map(|s| routh(&s.state, p)).collect();
    let et: Vec<f64> = samples.iter().map(|s| modified_energy(&s.state, p)).collect();
    let kin: Vec<Kinematics> = samples.iter().map(|s| kinematics(&s.state, s.phi, p)).collect();
    let zhat = Vector3::z();
    for i in 1..samples.len() - 1 {
        let h2 = samples[i + 1].t - samples[i - 1].t;
        let dv = (kin[i + 1].v_a - kin[i - 1].v_a) / h2;
        let k = &kin[i];
        let z = samples[i].state.theta.cos();
        let d_law = p.gamma * p.m / (p.alpha * d_of_z(z, p).sqrt()) * zhat.cross(&k.a).dot(&dv);
        let e_law = p.m * k.omega.cross(&k.a).dot(&dv);
        out.t.push(samples[i].t);
        out.lambda_rate.push((lam[i + 1] - lam[i - 1]) / h2);
        out.d_rate.push((dd[i + 1] - dd[i - 1]) / h2 - d_law);
        out.etilde_rate.push((et[i + 1] - et[i - 1]) / h2 - e_law);
    }
    out
}
