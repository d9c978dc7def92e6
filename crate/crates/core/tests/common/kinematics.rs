//! Forward-mode dual numbers and rotating-frame kinematics rebuilt from
//! ω, a and v_A, independent of the library's scalar formulas.

use std::ops::{Add, Mul, Neg, Sub};

use tippe_top::{euler_rhs, Params, State};

#[derive(Debug, Clone, Copy)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn c(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
    pub fn sin(self) -> Self {
        Dual {
            v: self.v.sin(),
            d: self.d * self.v.cos(),
        }
    }
    pub fn cos(self) -> Self {
        Dual {
            v: self.v.cos(),
            d: -self.d * self.v.sin(),
        }
    }
    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Dual {
            v: r,
            d: self.d / (2.0 * r),
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}
impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}
impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

pub type V3 = [Dual; 3];

pub fn dot(a: V3, b: V3) -> Dual {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Rotating-frame kinematics of a state whose components carry their own
/// time derivatives. Frame: x̂ horizontal towards the symmetry axis, ŷ
/// horizontal, ẑ vertical; the frame turns at φ̇ about ẑ.
pub struct Body {
    pub omega: V3,
    pub a: V3,
    pub v_a: V3,
    pub omega3: Dual,
    pub cos: Dual,
}

pub fn body(x: [Dual; 6], p: &Params) -> Body {
    let [theta, theta_dot, phi_dot, omega3, nu_x, nu_y] = x;
    let (sin, cos) = (theta.sin(), theta.cos());
    let r = Dual::c(p.r());
    let alpha = Dual::c(p.alpha());
    // ω = θ̇ ŷ + φ̇ ẑ + ψ̇ 3̂ regrouped as ω3 3̂ − φ̇ sinθ ê1 + θ̇ ŷ, with
    // 3̂ = (sinθ, 0, cosθ) and ê1 = (cosθ, 0, −sinθ); the ψ̇ form cancels
    // badly when φ̇ is large near the pole.
    let w1 = -(phi_dot * sin);
    Body {
        omega: [omega3 * sin + w1 * cos, theta_dot, omega3 * cos - w1 * sin],
        a: [r * alpha * sin, Dual::c(0.0), r * (alpha * cos - Dual::c(1.0))],
        v_a: [nu_x, nu_y, Dual::c(0.0)],
        omega3,
        cos,
    }
}

pub fn angular_momentum(b: &Body, p: &Params) -> V3 {
    let i1 = Dual::c(p.i1());
    let k = Dual::c(p.i3() - p.i1()) * b.omega3;
    let sin = (Dual::c(1.0) - b.cos * b.cos).sqrt();
    let e3 = [sin, Dual::c(0.0), b.cos];
    [i1 * b.omega[0] + k * e3[0], i1 * b.omega[1], i1 * b.omega[2] + k * e3[2]]
}

pub fn rotational(b: &Body, p: &Params) -> Dual {
    let l = angular_momentum(b, p);
    Dual::c(0.5) * dot(b.omega, l)
}

pub fn potential(b: &Body, p: &Params) -> Dual {
    Dual::c(p.m() * p.g() * p.r()) * (Dual::c(1.0) - Dual::c(p.alpha()) * b.cos)
}

/// `E = ½ m |v_A − ω × a|² + ½ ω·L + m g h`.
pub fn energy(b: &Body, p: &Params) -> Dual {
    let wa = cross(b.omega, b.a);
    let v = [b.v_a[0] - wa[0], b.v_a[1] - wa[1], b.v_a[2] - wa[2]];
    Dual::c(0.5 * p.m()) * dot(v, v) + rotational(b, p) + potential(b, p)
}

/// Energy of the same motion with `v_A = 0`.
pub fn rolling_energy(b: &Body, p: &Params) -> Dual {
    let wa = cross(b.omega, b.a);
    Dual::c(0.5 * p.m()) * dot(wa, wa) + rotational(b, p) + potential(b, p)
}

/// `λ = −L·a`, each term kept separately for a scale.
pub fn jellett_terms(b: &Body, p: &Params) -> [Dual; 3] {
    let l = angular_momentum(b, p);
    [-(l[0] * b.a[0]), -(l[1] * b.a[1]), -(l[2] * b.a[2])]
}

pub fn routh_dual(b: &Body, p: &Params) -> Dual {
    let (g, s, a) = (p.gamma(), p.sigma(), p.alpha());
    let am = Dual::c(a) - b.cos;
    let d = Dual::c(g) + Dual::c(s) * am * am + Dual::c(s * g) * (Dual::c(1.0) - b.cos * b.cos);
    Dual::c(p.i3()) * b.omega3 * d.sqrt()
}

pub fn seeded(s: &State, p: &Params) -> [Dual; 6] {
    let ds = euler_rhs(s, p).unwrap().to_array();
    let x = s.to_array();
    std::array::from_fn(|i| Dual { v: x[i], d: ds[i] })
}

pub fn frozen(s: &State) -> [Dual; 6] {
    s.to_array().map(Dual::c)
}

/// `Σ_i |∂f/∂x_i ẋ_i|`: the size of the individual chain-rule terms of
/// `df/dt`, a scale for rates that come out of cancellation.
pub fn chain_rule_scale(f: impl Fn(&Body) -> Dual, s: &State, p: &Params) -> f64 {
    let full = seeded(s, p);
    (0..6)
        .map(|i| {
            let mut x = frozen(s);
            x[i] = full[i];
            f(&body(x, p)).d.abs()
        })
        .sum()
}
