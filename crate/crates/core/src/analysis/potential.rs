//! Effective potential of the main equation `Ẽ = g(z) θ̇² + V(z, D, λ)`
//! with `z = cosθ`, inversion thresholds and the asymptotic constants.

use thiserror::Error;

use crate::model::Params;

use super::diagnostics::d_of_z;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("z = {z} is outside the open interval (-1, 1)")]
    Pole { z: f64 },
    #[error("gamma = {gamma} is outside the window (1 - alpha, 1 + alpha) = ({lo}, {hi})")]
    WindowViolated { gamma: f64, lo: f64, hi: f64 },
    #[error("invalid search bracket [{lo}, {hi}]")]
    BadBracket { lo: f64, hi: f64 },
}

/// `g(z) = ½ I3 (σ((α − z)² + 1 − z²) + γ)`.
pub fn mass_function(z: f64, p: &Params) -> f64 {
    0.5 * p.i3 * (p.sigma * ((p.alpha - z).powi(2) + 1.0 - z * z) + p.gamma)
}

pub fn effective_potential(z: f64, d: f64, lambda: f64, p: &Params) -> Result<f64, PotentialError> {
    if !(z.abs() < 1.0) {
        return Err(PotentialError::Pole { z });
    }
    Ok(effective_potential_unchecked(z, d, lambda, p))
}

pub(crate) fn effective_potential_unchecked(z: f64, d: f64, lambda: f64, p: &Params) -> f64 {
    let (r, g2) = (p.r, p.gamma * p.gamma);
    let num = lambda * d_of_z(z, p).sqrt() + r * d * (p.alpha - z);
    p.m * p.g * r * (1.0 - p.alpha * z)
        + num * num / (2.0 * p.i3 * r * r * g2 * (1.0 - z * z))
        + (r * r * d * d - p.sigma * lambda * lambda) / (2.0 * r * r * p.i1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub lambda_thres: f64,
    pub lambda_up: Option<f64>,
    /// `λ_thres > λ_up`; `None` when `λ_up` is undefined.
    pub ordering_holds: Option<bool>,
    /// Whether `1 − α² < γ < 1 + α`, where the ordering is guaranteed.
    pub ordering_expected: bool,
}

/// Spin thresholds for inversion. `λ_up` needs `γ > 1 − α`, `λ_thres` needs
/// `γ < 1 + α`; outside that window this is an error.
pub fn thresholds(p: &Params) -> Result<Thresholds, PotentialError> {
    let (a, g) = (p.alpha, p.gamma);
    if !p.inversion_window_holds() {
        return Err(PotentialError::WindowViolated {
            gamma: g,
            lo: 1.0 - a,
            hi: 1.0 + a,
        });
    }
    let k = (p.m * p.g * p.r.powi(3) * a * p.i3).sqrt();
    let lambda_thres = k * (1.0 + a).powi(2) / (1.0 + a - g).sqrt();
    let lambda_up = Some(k * (1.0 - a).powi(2) / (a + g - 1.0).sqrt());
    Ok(Thresholds {
        lambda_thres,
        lambda_up,
        ordering_holds: lambda_up.map(|u| lambda_thres > u),
        ordering_expected: 1.0 - a * a < g && g < 1.0 + a,
    })
}

/// Limits approached by the spinning solutions at `θ = 0` (index 0) and
/// `θ = π` (index 1) for a given `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    pub lambda: f64,
    pub l0: f64,
    pub l1: f64,
    pub d0: f64,
    pub d1: f64,
    pub etilde0: f64,
    pub etilde1: f64,
}

impl AsymptoticConstants {
    pub fn omega3_upright(&self, p: &Params) -> f64 {
        self.l0 / p.i3
    }

    pub fn omega3_inverted(&self, p: &Params) -> f64 {
        -self.l1 / p.i3
    }
}

pub fn asymptotic_constants(lambda: f64, p: &Params) -> AsymptoticConstants {
    let (r, a) = (p.r, p.alpha);
    let mgr = p.m * p.g * r;
    AsymptoticConstants {
        lambda,
        l0: lambda / (r * (1.0 - a)),
        l1: lambda / (r * (1.0 + a)),
        d0: lambda * d_of_z(1.0, p).sqrt() / (r * (1.0 - a)),
        d1: -lambda * d_of_z(-1.0, p).sqrt() / (r * (1.0 + a)),
        etilde0: lambda * lambda / (2.0 * r * r * p.i3 * (1.0 - a).powi(2)) + mgr * (1.0 - a),
        etilde1: lambda * lambda / (2.0 * r * r * p.i3 * (1.0 + a).powi(2)) + mgr * (1.0 + a),
    }
}

/// Upper estimate of the nutation period at `(λ, D)`. `None` when
/// `γ + α² < 1` or the estimate is not positive.
pub fn t_upp(lambda: f64, d: f64, p: &Params) -> Option<f64> {
    let (r, a, g) = (p.r, p.alpha, p.gamma);
    let q = g + a * a - 1.0;
    if q < 0.0 {
        return None;
    }
    let den = a * lambda + a * r * d * q.sqrt();
    let t = 21.95 * (r * p.i3 * g * (a + 1.0 - g) / den);
    (t.is_finite() && t > 0.0).then_some(t)
}

/// Offsets of `D` into the interior of `(D1, D0)` used to probe the
/// potential minimum near either pole.
pub fn routh_offsets(delta: f64, p: &Params) -> (f64, f64) {
    let q = (p.gamma + p.alpha * p.alpha - 1.0).sqrt();
    (delta / (p.r * (1.0 - p.alpha) * q), delta / (p.r * (1.0 + p.alpha) * q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMinimum {
    pub z: f64,
    pub value: f64,
    /// `false` when the minimum sits at the bracket boundary.
    pub interior: bool,
}

/// Closest a search is allowed to get to `z = ±1`.
pub const POLE_MARGIN: f64 = 1e-12;
const SCAN_POINTS: usize = 4001;
const Z_TOL: f64 = 1e-10;

/// Minimises `V(·, D, λ)` over `[lo, hi]` (clipped to stay off the poles):
/// a Chebyshev-spaced scan, then golden-section refinement around the best
/// scan point.
pub fn potential_minimum(d: f64, lambda: f64, p: &Params, bracket: (f64, f64)) -> Result<PotentialMinimum, PotentialError> {
    let lo = bracket.0.max(-1.0 + POLE_MARGIN);
    let hi = bracket.1.min(1.0 - POLE_MARGIN);
    if !(lo < hi) {
        return Err(PotentialError::BadBracket {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let v = |z: f64| effective_potential_unchecked(z, d, lambda, p);
    let n = SCAN_POINTS;
    let nodes: Vec<f64> = (0..n)
        .map(|k| {
            let c = -(std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * c
        })
        .collect();
    let (best, _) = nodes
        .iter()
        .enumerate()
        .map(|(i, &z)| (i, v(z)))
        .fold((0, f64::INFINITY), |acc, (i, val)| if val < acc.1 { (i, val) } else { acc });
    let a = nodes[best.saturating_sub(1)];
    let b = nodes[(best + 1).min(n - 1)];
    let z = golden_section(v, a, b);
    let (z, value) = [(z, v(z)), (lo, v(lo)), (hi, v(hi))]
        .into_iter()
        .fold((z, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
    let interior = z - lo > 2.0 * Z_TOL && hi - z > 2.0 * Z_TOL;
    Ok(PotentialMinimum { z, value, interior })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > Z_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::diagnostics::jellett;
    use crate::model::State;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    fn lambda_ref() -> f64 {
        jellett(&State::reference(), &Params::reference())
    }

    #[test]
    fn threshold_values() {
        let p = Params::reference();
        let th = thresholds(&p).unwrap();
        assert!(close(th.lambda_thres, 3.438_880e-6, 1e-6), "{}", th.lambda_thres);
        assert!(close(th.lambda_up.unwrap(), 1.239_523e-6, 1e-6));
        assert_eq!(th.ordering_holds, Some(true));
        assert!(th.ordering_expected);
        assert!((lambda_ref() / th.lambda_thres - 2.005).abs() < 1e-3);
    }

    #[test]
    fn threshold_blows_up_at_window_edge() {
        let (m, r) = (0.02, 0.02);
        let i3 = 0.4 * m * r * r;
        let near = Params::new(m, r, 0.3, i3 * (1.3 - 1e-9), i3, 9.82, 0.3).unwrap();
        assert!(thresholds(&near).unwrap().lambda_thres > 1e-2);
        let outside = Params::new(m, r, 0.3, i3 * 1.35, i3, 9.82, 0.3).unwrap();
        assert!(matches!(thresholds(&outside), Err(PotentialError::WindowViolated { .. })));
    }

    #[test]
    fn asymptotic_values() {
        let p = Params::reference();
        let c = asymptotic_constants(lambda_ref(), &p);
        assert!(close(c.d0, 7.238_852e-4, 1e-6));
        assert!(close(c.d1, -6.023_940e-4, 1e-6));
        assert!(close(c.etilde0, 4.064_287e-2, 1e-6));
        assert!(close(c.etilde1, 1.609_321e-2, 1e-6));
        assert!(close(c.omega3_upright(&p), 153.893_78, 1e-7));
        assert!(close(c.omega3_inverted(&p), -82.865_881, 1e-7));
        let tu = t_upp(c.lambda, c.d0, &p).unwrap();
        assert!(close(tu, 0.173_194_6, 1e-6), "{tu}");
        let lam = c.lambda;
        assert!(close(lam, p.r() * (1.0 - p.alpha()) * c.l0, 1e-15));
        assert!(close(lam, p.r() * (1.0 + p.alpha()) * c.l1, 1e-15));
    }

    #[test]
    fn zero_lambda_leaves_potential_terms() {
        let p = Params::reference();
        let c = asymptotic_constants(0.0, &p);
        assert_eq!((c.l0, c.l1, c.d0), (0.0, 0.0, 0.0));
        assert_eq!(c.d1, 0.0);
        let mgr = p.m() * p.g() * p.r();
        assert!(close(c.etilde0, mgr * 0.7, 1e-15) && close(c.etilde1, mgr * 1.3, 1e-15));
    }

    #[test]
    fn removable_pole_at_asymptotic_routh() {
        let p = Params::reference();
        let c = asymptotic_constants(lambda_ref(), &p);
        // The limits at the poles are the asymptotic modified energies.
        for (z, d, limit) in [(1.0, c.d0, c.etilde0), (-1.0, c.d1, c.etilde1)] {
            let v = |eps: f64| effective_potential(z * (1.0 - eps), d, c.lambda, &p).unwrap();
            assert!((v(1e-3) - v(1e-9)).abs() < 5e-3 * limit);
            assert!(close(v(1e-9), limit, 1e-6));
        }
        assert!(effective_potential(1.0, c.d0, c.lambda, &p).is_err());
        assert!(effective_potential(-1.0, c.d1, c.lambda, &p).is_err());
    }

    #[test]
    fn equator_closed_form() {
        let p = Params::reference();
        let (d, lam) = (5e-4, 6e-6);
        let v = effective_potential(0.0, d, lam, &p).unwrap();
        let (r, g) = (p.r(), p.gamma());
        let want = p.m() * p.g() * r
            + (lam * d_of_z(0.0, &p).sqrt() + r * d * p.alpha()).powi(2) / (2.0 * p.i3() * r * r * g * g)
            + (r * r * d * d - p.sigma() * lam * lam) / (2.0 * r * r * p.i1());
        assert!(close(v, want, 1e-14));
    }

    #[test]
    fn mass_function_ends() {
        let p = Params::reference();
        assert!(close(mass_function(1.0, &p), 0.5 * p.i3() * (p.sigma() * 0.49 + p.gamma()), 1e-15));
        assert!(close(mass_function(-1.0, &p), 0.5 * p.i3() * (p.sigma() * 1.69 + p.gamma()), 1e-15));
    }

    #[test]
    fn minima_near_poles() {
        let p = Params::reference();
        let c = asymptotic_constants(lambda_ref(), &p);
        let (off0, off1) = routh_offsets(1e-8, &p);
        let lower = potential_minimum(c.d1 + off1, c.lambda, &p, (-1.0, 1.0)).unwrap();
        assert!(lower.interior && lower.z <= -0.9, "{lower:?}");
        assert!((lower.z + 0.99308).abs() < 1e-4);
        let upper = potential_minimum(c.d0 - off0, c.lambda, &p, (-1.0, 1.0)).unwrap();
        assert!(upper.interior && upper.z >= 0.9, "{upper:?}");
        assert!((upper.z - 0.99641).abs() < 1e-4);
    }

    #[test]
    fn first_order_condition_at_minimum() {
        let p = Params::reference();
        let c = asymptotic_constants(lambda_ref(), &p);
        let d = 0.5 * (c.d0 + c.d1);
        let m = potential_minimum(d, c.lambda, &p, (-0.999, 0.999)).unwrap();
        assert!(m.interior);
        let h = 1e-6;
        let v = |z| effective_potential(z, d, c.lambda, &p).unwrap();
        let dv = (v(m.z + h) - v(m.z - h)) / (2.0 * h);
        assert!(dv.abs() <= 1e-6 * m.value, "{dv}");
    }

    #[test]
    fn monotone_bracket_reports_boundary() {
        let p = Params::reference();
        let c = asymptotic_constants(lambda_ref(), &p);
        let (off0, _) = routh_offsets(1e-8, &p);
        let m = potential_minimum(c.d0 - off0, c.lambda, &p, (-0.5, 0.0)).unwrap();
        assert!(!m.interior);
        assert!(potential_minimum(c.d0, c.lambda, &p, (0.5, 0.2)).is_err());
    }
}
