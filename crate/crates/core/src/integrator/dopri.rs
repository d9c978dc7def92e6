//! Dormand–Prince 5(4) with PI step-size control and 4th-order continuous
//! extension (Hairer, Nørsett & Wanner, `DOPRI5`).

/// A first-order system `y' = f(t, y)` of fixed dimension.
pub trait OdeSystem<const N: usize> {
    type Error;

    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N], Self::Error>;
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub safety: f64,
    /// PI stabilisation exponent.
    pub beta: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_step: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_step,
            min_step: 1e-14,
            safety: 0.9,
            beta: 0.04,
            max_steps: 10_000_000,
        }
    }
}

/// Continuous extension over one accepted step `[t, t + h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub t: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t_end(&self) -> f64 {
        self.t + self.h
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t && t <= self.t + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        std::array::from_fn(|i| r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i]))))
    }
}

/// Everything the driver knows about one accepted step.
pub struct AcceptedStep<'a, const N: usize> {
    pub segment: &'a DenseSegment<N>,
    pub y_start: &'a [f64; N],
    pub y_end: &'a [f64; N],
    /// Weighted RMS error estimate; `<= 1` for every accepted step.
    pub error_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError<E> {
    /// The right-hand side failed at an accepted point.
    Rhs {
        t: f64,
        error: E,
    },
    /// The step size fell below `min_step`.
    StepUnderflow {
        t: f64,
        h: f64,
    },
    TooManySteps {
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], ctl: &StepControl) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = ctl.abs_tol + ctl.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

/// Integrates from `(t0, y0)` to `t1`, handing every accepted step to
/// `on_step`. Returns the state at the last accepted point.
///
/// A right-hand-side failure inside a trial stage rejects the step and
/// quarters it; only failures at accepted points are reported.
pub fn solve<const N: usize, S, F>(
    system: &S,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
    stats: &mut StepStats,
    mut on_step: F,
) -> Result<(f64, [f64; N]), SolveError<S::Error>>
where
    S: OdeSystem<N>,
    F: FnMut(&AcceptedStep<'_, N>) -> Control,
{
    let mut t = t0;
    let mut y = y0;
    if t1 <= t0 {
        return Ok((t, y));
    }
    let mut k1 = system.rhs(t, &y).map_err(|error| SolveError::Rhs { t, error })?;
    stats.rhs_evals += 1;
    let mut h = initial_step(system, t, &y, &k1, t1, ctl, stats).min(ctl.max_step);
    let expo = 0.2 - 0.75 * ctl.beta;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(SolveError::TooManySteps { t });
        }
        let last = t + h >= t1 - 1e-12 * t1.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        if h < ctl.min_step {
            return Err(SolveError::StepUnderflow { t, h });
        }

        let trial = match try_step(system, t, &y, &k1, h) {
            Ok(v) => v,
            Err(_) => {
                stats.rhs_evals += 6;
                stats.rejected += 1;
                last_rejected = true;
                h *= 0.25;
                continue;
            }
        };
        stats.rhs_evals += 6;
        let en = error_norm(&trial.err, &y, &trial.y_new, ctl);
        if !en.is_finite() {
            stats.rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }
        let fac11 = en.powf(expo);
        if en <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            let segment = dense_segment(t, h, &y, &trial);
            stats.accepted += 1;
            let step = AcceptedStep {
                segment: &segment,
                y_start: &y,
                y_end: &trial.y_new,
                error_norm: en,
            };
            let flow = on_step(&step);
            t = t_new;
            y = trial.y_new;
            k1 = trial.stages[5];
            if flow == Control::Stop || last {
                return Ok((t, y));
            }
            let mut fac = (fac11 / fac_old.powf(ctl.beta) / ctl.safety).clamp(0.1, 5.0);
            fac_old = en.max(1e-4);
            if last_rejected {
                fac = fac.max(1.0);
            }
            h = (h / fac).min(ctl.max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / ctl.safety).min(5.0);
        }
    }
}

struct Trial<const N: usize> {
    y_new: [f64; N],
    err: [f64; N],
    /// k1, k3, k4, k5, k6, k7; k2 does not enter the error or dense output.
    stages: [[f64; N]; 6],
}

fn try_step<const N: usize, S: OdeSystem<N>>(system: &S, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Result<Trial<N>, S::Error> {
    let k2 = system.rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = system.rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = system.rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = system.rhs(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = system.rhs(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = system.rhs(t + h, &y_new)?;
    let err = std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
    Ok(Trial {
        y_new,
        err,
        stages: [*k1, k3, k4, k5, k6, k7],
    })
}

fn dense_segment<const N: usize>(t: f64, h: f64, y: &[f64; N], trial: &Trial<N>) -> DenseSegment<N> {
    let [k1, k3, k4, k5, k6, k7] = &trial.stages;
    let r1 = *y;
    let r2: [f64; N] = std::array::from_fn(|i| trial.y_new[i] - y[i]);
    let r3: [f64; N] = std::array::from_fn(|i| h * k1[i] - r2[i]);
    let r4: [f64; N] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
    let r5: [f64; N] = std::array::from_fn(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
    DenseSegment {
        t,
        h,
        coeffs: [r1, r2, r3, r4, r5],
    }
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    system: &S,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    ctl: &StepControl,
    stats: &mut StepStats,
) -> f64 {
    let scale: [f64; N] = std::array::from_fn(|i| ctl.abs_tol + ctl.rel_tol * y[i].abs());
    let norm = |v: &[f64; N]| ((0..N).map(|i| (v[i] / scale[i]).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let span = t1 - t;
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let d2 = match system.rhs(t + h0, &y1) {
        Ok(f1) => {
            stats.rhs_evals += 1;
            let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
            norm(&diff) / h0
        }
        Err(_) => return h0 * 1e-3,
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem<2> for Decay {
        type Error = ();
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> Result<[f64; 2], ()> {
            Ok([-y[0], -3.0 * y[1]])
        }
    }

    struct Oscillator;
    impl OdeSystem<2> for Oscillator {
        type Error = ();
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> Result<[f64; 2], ()> {
            Ok([y[1], -y[0]])
        }
    }

    #[test]
    fn exponential_decay_closed_form() {
        let ctl = StepControl::new(1e-10, 1e-14, 1.0);
        let mut stats = StepStats::default();
        let mut worst: f64 = 0.0;
        let (t, y) = solve(&Decay, 0.0, [1.0, 2.0], 5.0, &ctl, &mut stats, |step| {
            for k in 0..=10 {
                let tt = step.segment.t + step.segment.h * k as f64 / 10.0;
                let y = step.segment.eval(tt);
                worst = worst.max((y[0] - (-tt).exp()).abs()).max((y[1] - 2.0 * (-3.0 * tt).exp()).abs());
            }
            assert!(step.error_norm <= 1.0);
            Control::Continue
        })
        .unwrap();
        assert_eq!(t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-9);
        assert!(worst < 1e-8, "dense output error {worst}");
    }

    #[test]
    fn dense_output_endpoints() {
        let ctl = StepControl::new(1e-9, 1e-12, 0.5);
        let mut stats = StepStats::default();
        solve(&Oscillator, 0.0, [1.0, 0.0], 3.0, &ctl, &mut stats, |step| {
            let a = step.segment.eval(step.segment.t);
            let b = step.segment.eval(step.segment.t_end());
            for i in 0..2 {
                assert_eq!(a[i], step.y_start[i]);
                assert!((b[i] - step.y_end[i]).abs() < 1e-15);
            }
            Control::Continue
        })
        .unwrap();
        assert!(stats.accepted > 0);
    }

    #[test]
    fn tolerance_refinement_reduces_error() {
        let mut errs = Vec::new();
        for tol in [1e-6, 1e-8, 1e-10] {
            let ctl = StepControl::new(tol, tol * 1e-3, 1.0);
            let mut stats = StepStats::default();
            let (_, y) = solve(&Oscillator, 0.0, [1.0, 0.0], 20.0, &ctl, &mut stats, |_| Control::Continue).unwrap();
            errs.push((y[0] - 20f64.cos()).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn zero_span_is_a_no_op() {
        let ctl = StepControl::new(1e-9, 1e-12, 1.0);
        let mut stats = StepStats::default();
        let mut calls = 0;
        let (t, y) = solve(&Decay, 1.0, [1.0, 1.0], 1.0, &ctl, &mut stats, |_| {
            calls += 1;
            Control::Continue
        })
        .unwrap();
        assert_eq!((t, y, calls), (1.0, [1.0, 1.0], 0));
    }
}
