//! Equations of motion for the rolling and gliding top.
//!
//! [`euler_rhs`] is the production right-hand side in Euler-angle form.
//! [`vector_rhs`] integrates nothing; it evaluates the Newton–Euler
//! equations `m s̈ = F − mg ẑ`, `L̇ = a × F`, `3̂̇ = L × 3̂ / I1` directly and
//! serves as an independent cross-check of the Euler form.

use nalgebra::Vector3;
use thiserror::Error;

use crate::model::{Frames, Params, State, VectorState};

/// `|sinθ|` below which the Euler-angle equations are refused.
pub const POLE_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("normal-force denominator vanishes ({denominator:e}); the contact model breaks down")]
    SingularNormalForce { denominator: f64 },
    #[error("inclination {theta} is at a pole of the Euler-angle equations")]
    PoleApproach { theta: f64 },
    #[error("non-finite state")]
    NonFinite,
}

/// Vertical reaction force at the contact point (N).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalForce(pub f64);

impl NormalForce {
    pub fn value(self) -> f64 {
        self.0
    }

    /// The contact constraint is one-sided; the model only holds while the
    /// table pushes.
    pub fn holds_contact(self) -> bool {
        self.0 > 0.0
    }
}

pub fn normal_force(s: &State, p: &Params) -> Result<NormalForce, DynamicsError> {
    if !s.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    let (st, ct) = s.theta.sin_cos();
    let mr2 = p.m * p.r * p.r;
    let numerator = p.m * p.g * p.i1
        + p.m
            * p.r
            * p.alpha
            * (ct * (p.i1 * s.phi_dot * s.phi_dot * st * st + p.i1 * s.theta_dot * s.theta_dot) - p.i3 * s.phi_dot * s.omega3 * st * st);
    let denominator = p.i1 + mr2 * p.alpha * p.alpha * st * st - mr2 * p.alpha * st * (1.0 - p.alpha * ct) * p.mu * s.nu_x;
    if denominator.abs() <= 1e-12 * p.i1 {
        return Err(DynamicsError::SingularNormalForce { denominator });
    }
    Ok(NormalForce(numerator / denominator))
}

/// Time derivatives of the [`State`] fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub d_theta: f64,
    pub d_theta_dot: f64,
    pub d_phi_dot: f64,
    pub d_omega3: f64,
    pub d_nu_x: f64,
    pub d_nu_y: f64,
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.d_theta,
            self.d_theta_dot,
            self.d_phi_dot,
            self.d_omega3,
            self.d_nu_x,
            self.d_nu_y,
        ]
    }
}

pub fn euler_rhs(s: &State, p: &Params) -> Result<StateDerivative, DynamicsError> {
    let gn = normal_force(s, p)?.value();
    euler_rhs_with_normal_force(s, p, gn)
}

/// Evaluates the Euler-angle equations with a precomputed normal force.
pub(crate) fn euler_rhs_with_normal_force(s: &State, p: &Params, gn: f64) -> Result<StateDerivative, DynamicsError> {
    let (st, ct) = s.theta.sin_cos();
    if st.abs() < POLE_GUARD {
        return Err(DynamicsError::PoleApproach { theta: s.theta });
    }
    let Params {
        m, r, alpha, i1, i3, mu, ..
    } = *p;
    let State {
        theta_dot,
        phi_dot,
        omega3,
        nu_x,
        nu_y,
        ..
    } = *s;
    let mr2 = m * r * r;
    let one_minus = 1.0 - alpha * ct;
    let offset = alpha - ct;

    let d_theta_dot =
        st / i1 * (i1 * phi_dot * phi_dot * ct - i3 * omega3 * phi_dot - r * alpha * gn) + r * mu * gn * nu_x / i1 * one_minus;
    let d_phi_dot = (i3 * theta_dot * omega3 - 2.0 * i1 * theta_dot * phi_dot * ct - mu * gn * nu_y * r * offset) / (i1 * st);
    let d_omega3 = -mu * gn * nu_y * r * st / i3;
    let d_nu_x = r * st / i1
        * (phi_dot * omega3 * (i3 * one_minus - i1) + gn * r * alpha * one_minus
            - i1 * alpha * (theta_dot * theta_dot + phi_dot * phi_dot * st * st))
        - mu * gn * nu_x / (m * i1) * (i1 + mr2 * one_minus * one_minus)
        + phi_dot * nu_y;
    let d_nu_y = -mu * gn * nu_y / (m * i1 * i3) * (i1 * i3 + mr2 * i3 * offset * offset + mr2 * i1 * st * st)
        + omega3 * theta_dot * r / i1 * (i3 * offset + i1 * ct)
        - phi_dot * nu_x;

    Ok(StateDerivative {
        d_theta: theta_dot,
        d_theta_dot,
        d_phi_dot,
        d_omega3,
        d_nu_x,
        d_nu_y,
    })
}

/// Time derivative of a [`VectorState`], with the normal force the
/// vector-form contact constraint produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorStateDerivative {
    pub angular_momentum: Vector3<f64>,
    pub axis3: Vector3<f64>,
    pub v_a: Vector3<f64>,
    pub normal_force: f64,
}

/// Newton–Euler right-hand side.
///
/// The normal force is obtained by solving the second time derivative of the
/// contact constraint `(s + a)·ẑ = 0`, which is linear in `g_n`; it never
/// calls [`normal_force`].
pub fn vector_rhs(v: &VectorState, p: &Params) -> Result<VectorStateDerivative, DynamicsError> {
    let z = Vector3::z();
    let e3 = v.axis3;
    let l = v.angular_momentum;
    let kappa = 1.0 / p.i3 - 1.0 / p.i1;
    let omega = l / p.i1 + e3 * (kappa * l.dot(&e3));
    let a = (e3 * p.alpha - z) * p.r;
    let e3_dot = l.cross(&e3) / p.i1;
    let a_dot = e3_dot * (p.r * p.alpha);

    // Everything below is affine in g_n: X = X0 + g_n X1.
    let force_dir = z - v.v_a * p.mu;
    let l_dot_unit = a.cross(&force_dir);
    let omega_dot_unit = l_dot_unit / p.i1 + e3 * (kappa * l_dot_unit.dot(&e3));
    let omega_dot_free = e3_dot * (kappa * l.dot(&e3));

    let vdot_free = -z * p.g + omega_dot_free.cross(&a) + omega.cross(&a_dot);
    let vdot_unit = force_dir / p.m + omega_dot_unit.cross(&a);
    if vdot_unit.z.abs() <= 1e-12 / p.m {
        return Err(DynamicsError::SingularNormalForce { denominator: vdot_unit.z });
    }
    let gn = -vdot_free.z / vdot_unit.z;
    let mut v_a_dot = vdot_free + vdot_unit * gn;
    v_a_dot.z = 0.0;

    Ok(VectorStateDerivative {
        angular_momentum: l_dot_unit * gn,
        axis3: e3_dot,
        v_a: v_a_dot,
        normal_force: gn,
    })
}

/// Maps an Euler-form derivative to the inertial-frame rates of
/// `(L, 3̂, v_A)` at azimuth `phi`; this is the tangent map of
/// [`crate::model::euler_to_vector`].
pub fn euler_rate_to_vector(s: &State, ds: &StateDerivative, p: &Params, phi: f64) -> VectorStateDerivative {
    let f = Frames::new(s.theta, phi);
    let (st, ct) = s.theta.sin_cos();
    let l_1 = -p.i1 * ds.d_phi_dot * st - 2.0 * p.i1 * s.phi_dot * s.theta_dot * ct + p.i3 * s.omega3 * s.theta_dot;
    let l_2 = p.i1 * ds.d_theta_dot - p.i1 * s.phi_dot * s.phi_dot * st * ct + p.i3 * s.omega3 * s.phi_dot * st;
    let l_3 = p.i3 * ds.d_omega3;
    let gn = normal_force(s, p).map(NormalForce::value).unwrap_or(f64::NAN);
    VectorStateDerivative {
        angular_momentum: f.e1 * l_1 + f.y_hat * l_2 + f.e3 * l_3,
        axis3: f.e1 * s.theta_dot + f.y_hat * (s.phi_dot * st),
        v_a: f.x_hat * (ds.d_nu_x - s.phi_dot * s.nu_y) + f.y_hat * (ds.d_nu_y + s.phi_dot * s.nu_x),
        normal_force: gn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::euler_to_vector;

    #[test]
    fn normal_force_static_tilt() {
        let p = Params::reference();
        let s = State::new(0.1, 0.0, 0.0, 0.0, 0.0, 0.0);
        let gn = normal_force(&s, &p).unwrap().value();
        let st = 0.1f64.sin();
        let expected = p.m() * p.g() * p.i1() / (p.i1() + p.m() * p.r() * p.r() * 0.09 * st * st);
        assert!((gn - expected).abs() < 1e-15);
        // mg / (1 + σα² sin²θ / γ) with σα² sin²θ / γ = 2.3966e-3.
        assert!((gn - 0.195930).abs() < 1e-6);
        assert!((p.weight() / gn - 1.0 - 2.3966e-3).abs() < 1e-7);
    }

    #[test]
    fn normal_force_hydrostatic_limit() {
        let p = Params::reference();
        let s = State::new(1e-9, 0.0, 0.0, 155.0, 0.0, 0.0);
        let gn = normal_force(&s, &p).unwrap().value();
        assert!((gn - p.weight()).abs() < 1e-12);
        assert!((gn - 0.1964).abs() < 1e-12);
    }

    #[test]
    fn singular_denominator_is_signalled() {
        let p = Params::reference();
        let st = 1.0f64;
        let theta = std::f64::consts::FRAC_PI_2;
        let mr2 = p.m() * p.r() * p.r();
        // I1 + mR²α² − mR²α μ ν_x = 0 at θ = π/2.
        let nu_x = (p.i1() + mr2 * 0.09 * st) / (mr2 * 0.3 * p.mu());
        let s = State::new(theta, 0.0, 0.0, 0.0, nu_x, 0.0);
        assert!(matches!(normal_force(&s, &p), Err(DynamicsError::SingularNormalForce { .. })));
    }

    #[test]
    fn reference_initial_condition_signs() {
        let p = Params::reference();
        let s = State::reference();
        let d = euler_rhs(&s, &p).unwrap();
        let gn = normal_force(&s, &p).unwrap().value();
        assert_eq!(d.d_theta, 0.0);
        assert_eq!(d.d_omega3, 0.0);
        assert_eq!(d.d_phi_dot, 0.0);
        let expected = 0.1f64.sin() / p.i1() * (-p.r() * p.alpha() * gn);
        assert!((d.d_theta_dot - expected).abs() < 1e-12 * expected.abs());
        assert!(d.d_theta_dot < 0.0);
    }

    #[test]
    fn frictionless_spin_is_constant() {
        let p = Params::reference().with_mu(0.0).unwrap();
        let s = State::new(0.7, 2.0, 30.0, 120.0, 0.1, 0.2);
        let d = euler_rhs(&s, &p).unwrap();
        assert_eq!(d.d_omega3, 0.0);
    }

    #[test]
    fn pole_is_refused() {
        let p = Params::reference();
        let s = State::new(1e-12, 0.0, 0.0, 155.0, 0.0, 0.0);
        assert!(matches!(euler_rhs(&s, &p), Err(DynamicsError::PoleApproach { .. })));
        let s = State::new(std::f64::consts::PI, 0.0, 0.0, 155.0, 0.0, 0.0);
        assert!(matches!(euler_rhs(&s, &p), Err(DynamicsError::PoleApproach { .. })));
    }

    #[test]
    fn vector_form_near_vertical_spin_is_quiet() {
        let p = Params::reference();
        let s = State::new(1e-6, 0.0, 0.0, 155.0, 0.0, 0.0);
        let v = euler_to_vector(&s, &p, 0.0);
        let d = vector_rhs(&v, &p).unwrap();
        let l = v.angular_momentum.norm();
        assert!(d.angular_momentum.norm() < 1e-5 * l);
        assert!(d.axis3.norm() < 1e-3);
        assert!(d.axis3.dot(&v.axis3).abs() < 1e-15);
    }

    #[test]
    fn vector_normal_force_matches_closed_form() {
        let p = Params::reference();
        let s = State::new(1.1, -3.0, 45.0, 80.0, -0.12, 0.4);
        let v = euler_to_vector(&s, &p, 0.4);
        let gn_vec = vector_rhs(&v, &p).unwrap().normal_force;
        let gn = normal_force(&s, &p).unwrap().value();
        assert!((gn_vec - gn).abs() < 1e-12 * gn.abs());
    }
}
