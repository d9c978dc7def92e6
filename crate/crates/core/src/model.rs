//! Physical parameters of the top and its instantaneous dynamical state.
//!
//! The top is an axially symmetric sphere of mass `m` and radius `R` whose
//! center of mass sits `R·α` away from the geometric center along the
//! symmetry axis. Orientation uses Euler angles `(θ, φ, ψ)`; the rotating
//! frame `(x̂, ŷ, ẑ)` is the inertial frame turned by `φ` about the vertical,
//! and the symmetry axis is `3̂ = sinθ x̂ + cosθ ẑ` in that frame.

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("symmetry axis is (anti)parallel to the vertical; azimuth is undefined")]
    DegeneratePole,
    #[error("symmetry axis is not a unit vector (|axis3| = {norm})")]
    NotUnitAxis { norm: f64 },
    #[error("gliding velocity has a vertical component {vertical}")]
    VerticalGliding { vertical: f64 },
}

/// Physical constants of a tippe top plus the derived ratios `γ = I1/I3`
/// and `σ = mR²/I3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub(crate) m: f64,
    pub(crate) r: f64,
    pub(crate) alpha: f64,
    pub(crate) i1: f64,
    pub(crate) i3: f64,
    pub(crate) g: f64,
    pub(crate) mu: f64,
    pub(crate) gamma: f64,
    pub(crate) sigma: f64,
}

impl Params {
    /// Validates the raw constants and caches `γ` and `σ`.
    pub fn new(m: f64, r: f64, alpha: f64, i1: f64, i3: f64, g: f64, mu: f64) -> Result<Self, ModelError> {
        positive("m", m)?;
        positive("R", r)?;
        positive("I1", i1)?;
        positive("I3", i3)?;
        positive("g", g)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ModelError::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "0 < alpha < 1",
            });
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(ModelError::OutOfRange {
                name: "mu",
                value: mu,
                expected: "finite and >= 0",
            });
        }
        Ok(Self {
            m,
            r,
            alpha,
            i1,
            i3,
            g,
            mu,
            gamma: i1 / i3,
            sigma: m * r * r / i3,
        })
    }

    /// Toy top used throughout the examples: m = 0.02 kg, R = 0.02 m,
    /// α = 0.3, I3 = 2/5 mR², I1 = 131/350 mR², g = 9.82 m/s², μ = 0.3.
    pub fn reference() -> Self {
        let m = 0.02;
        let r = 0.02;
        let mr2 = m * r * r;
        Self::new(m, r, 0.3, 131.0 / 350.0 * mr2, 0.4 * mr2, 9.82, 0.3).expect("reference parameters are valid")
    }

    /// Same top with a different friction coefficient.
    pub fn with_mu(&self, mu: f64) -> Result<Self, ModelError> {
        Self::new(self.m, self.r, self.alpha, self.i1, self.i3, self.g, mu)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i3(&self) -> f64 {
        self.i3
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `1 − α < γ < 1 + α`: the window in which the inverted spinning state
    /// is the unique stable asymptotic state for large enough `λ`.
    pub fn inversion_window_holds(&self) -> bool {
        1.0 - self.alpha < self.gamma && self.gamma < 1.0 + self.alpha
    }

    /// `1 − α² < γ < 1`: the window in which the effective potential becomes
    /// rational in `cosθ` under the matching choice of `σ`.
    pub fn rational_window_holds(&self) -> bool {
        1.0 - self.alpha * self.alpha < self.gamma && self.gamma < 1.0
    }

    /// Weight `mg` of the top.
    pub fn weight(&self) -> f64 {
        self.m * self.g
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::OutOfRange {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}

/// Residuals of the two candidate forms of the rationality condition.
///
/// `printed` tests `σ(γ+α²−1) = 1−α`; `alternative` tests
/// `σ(γ+α²−1) = 1−γ`. Both are `None` when `γ+α²−1` vanishes, because
/// no finite `σ` can satisfy either quotient form then.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalityReport {
    pub printed_residual: Option<f64>,
    pub alternative_residual: Option<f64>,
    pub printed_holds: bool,
    pub alternative_holds: bool,
}

pub fn rationality_check(p: &Params, tol: f64) -> RationalityReport {
    rationality_residuals(p.alpha, p.gamma, p.sigma, tol)
}

/// Raw-number form of [`rationality_check`], usable outside the validated
/// parameter range (e.g. `σ = 0`).
pub fn rationality_residuals(alpha: f64, gamma: f64, sigma: f64, tol: f64) -> RationalityReport {
    let denom = gamma + alpha * alpha - 1.0;
    if denom.abs() <= 1e-12 {
        return RationalityReport {
            printed_residual: None,
            alternative_residual: None,
            printed_holds: false,
            alternative_holds: false,
        };
    }
    let lhs = sigma * denom;
    let printed = lhs - (1.0 - alpha);
    let alternative = lhs - (1.0 - gamma);
    RationalityReport {
        printed_residual: Some(printed),
        alternative_residual: Some(alternative),
        printed_holds: printed.abs() <= tol,
        alternative_holds: alternative.abs() <= tol,
    }
}

/// The six dynamical variables of the Euler-angle equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub theta: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub omega3: f64,
    pub nu_x: f64,
    pub nu_y: f64,
}

impl State {
    pub fn new(theta: f64, theta_dot: f64, phi_dot: f64, omega3: f64, nu_x: f64, nu_y: f64) -> Self {
        Self {
            theta,
            theta_dot,
            phi_dot,
            omega3,
            nu_x,
            nu_y,
        }
    }

    /// θ(0) = 0.1 rad, ω3(0) = 155 rad/s, everything else at rest.
    pub fn reference() -> Self {
        Self::new(0.1, 0.0, 0.0, 155.0, 0.0, 0.0)
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.theta, self.theta_dot, self.phi_dot, self.omega3, self.nu_x, self.nu_y]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Spin rate about the symmetry axis relative to the precessing frame,
    /// `ψ̇ = ω3 − φ̇ cosθ`.
    pub fn psi_dot(&self) -> f64 {
        self.omega3 - self.phi_dot * self.theta.cos()
    }
}

/// Inertial-frame description: angular momentum about the center of mass,
/// the unit symmetry axis and the gliding velocity of the contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorState {
    pub angular_momentum: Vector3<f64>,
    pub axis3: Vector3<f64>,
    pub v_a: Vector3<f64>,
}

/// Orthonormal frames attached to `(θ, φ)`, expressed in inertial coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frames {
    pub x_hat: Vector3<f64>,
    pub y_hat: Vector3<f64>,
    pub e1: Vector3<f64>,
    pub e3: Vector3<f64>,
}

impl Frames {
    pub fn new(theta: f64, phi: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let x_hat = Vector3::new(cp, sp, 0.0);
        let y_hat = Vector3::new(-sp, cp, 0.0);
        let z_hat = Vector3::z();
        Self {
            x_hat,
            y_hat,
            e1: x_hat * ct - z_hat * st,
            e3: x_hat * st + z_hat * ct,
        }
    }
}

pub fn euler_to_vector(s: &State, p: &Params, phi: f64) -> VectorState {
    let f = Frames::new(s.theta, phi);
    let st = s.theta.sin();
    let angular_momentum = f.e1 * (-p.i1 * s.phi_dot * st) + f.y_hat * (p.i1 * s.theta_dot) + f.e3 * (p.i3 * s.omega3);
    VectorState {
        angular_momentum,
        axis3: f.e3,
        v_a: f.x_hat * s.nu_x + f.y_hat * s.nu_y,
    }
}

/// Inverse of [`euler_to_vector`]; returns the state and the azimuth `φ`.
pub fn vector_to_euler(v: &VectorState, p: &Params) -> Result<(State, f64), ModelError> {
    let norm = v.axis3.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(ModelError::NotUnitAxis { norm });
    }
    if v.axis3.z.abs() > 1.0 - 1e-12 {
        return Err(ModelError::DegeneratePole);
    }
    if v.v_a.z != 0.0 {
        return Err(ModelError::VerticalGliding { vertical: v.v_a.z });
    }
    let horizontal = v.axis3.x.hypot(v.axis3.y);
    let theta = horizontal.atan2(v.axis3.z);
    let phi = v.axis3.y.atan2(v.axis3.x);
    let f = Frames::new(theta, phi);
    let l = &v.angular_momentum;
    let state = State {
        theta,
        theta_dot: l.dot(&f.y_hat) / p.i1,
        phi_dot: -l.dot(&f.e1) / (p.i1 * theta.sin()),
        omega3: l.dot(&v.axis3) / p.i3,
        nu_x: v.v_a.dot(&f.x_hat),
        nu_y: v.v_a.dot(&f.y_hat),
    };
    Ok((state, phi))
}
