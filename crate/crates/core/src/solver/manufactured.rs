//! Source terms for manufactured solutions.

use std::sync::Arc;

use super::config::Mode;
use crate::error::{Error, Result};
use crate::model::{signed_power, truncated_coefficient, Evaluator, ProblemSpec};

const SPACE_STEP: f64 = 1e-3;
const TIME_STEP: f64 = 1e-3;
/// Lattice points per axis (and in time) on which positivity is audited.
const AUDIT_POINTS: usize = 9;

/// Fourth-order central first derivative of `f` at `0` with step `h`.
fn central(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Fourth-order one-sided first derivative of `f` at `0`.
fn forward(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-25.0 * f(0.0) + 48.0 * f(h) - 36.0 * f(2.0 * h) + 16.0 * f(3.0 * h) - 3.0 * f(4.0 * h)) / (12.0 * h)
}

/// Source `f = ∂ₜu − Σⱼ ∂ⱼ(c_j |∂ⱼ w_j|^{pⱼ−2} ∂ⱼ w_j)` making `u_exact` a solution.
///
/// Direct mode uses `w_j = u^{mⱼ}` and `c_j = a_j`; truncated mode uses the
/// truncated field on `∂ⱼu`. Derivatives are nested fourth-order finite
/// differences; the time derivative is one-sided near `t = 0`.
pub fn manufactured_rhs(u_exact: Evaluator, spec: &ProblemSpec, mode: Mode) -> Result<Evaluator> {
    audit_positive(&u_exact, spec)?;
    let spec = Arc::new(spec.clone());
    let u = u_exact;
    Ok(Evaluator::without_u(move |x, t| {
        let dim = x.len();
        let dt_u = if t >= 2.0 * TIME_STEP {
            central(|s| u.eval(x, t + s, 0.0), TIME_STEP)
        } else {
            forward(|s| u.eval(x, t + s, 0.0), TIME_STEP)
        };
        let mut div = 0.0;
        for j in 0..dim {
            let p = spec.exponents.p()[j];
            let m = spec.exponents.m()[j];
            let flux = |s: f64| -> f64 {
                let mut z = x.to_vec();
                z[j] += s;
                let z = &z;
                let uc = u.eval(z, t, 0.0);
                let (coef, d) = match mode {
                    Mode::Direct => {
                        let d = central(
                            |r| {
                                let mut w = z.to_vec();
                                w[j] += r;
                                u.eval(&w, t, 0.0).max(0.0).powf(m)
                            },
                            SPACE_STEP,
                        );
                        (spec.coefficients.coeffs[j].eval(z, t, uc), d)
                    }
                    Mode::Truncated(k) => {
                        let d = central(
                            |r| {
                                let mut w = z.to_vec();
                                w[j] += r;
                                u.eval(&w, t, 0.0)
                            },
                            SPACE_STEP,
                        );
                        (truncated_coefficient(&spec, k, j, z, t, uc), d)
                    }
                };
                coef * signed_power(d, p)
            };
            div += central(flux, SPACE_STEP);
        }
        dt_u - div
    }))
}

fn audit_positive(u: &Evaluator, spec: &ProblemSpec) -> Result<()> {
    let dim = spec.dim();
    let total = AUDIT_POINTS.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for it in 0..AUDIT_POINTS {
        let t = spec.horizon * it as f64 / (AUDIT_POINTS - 1) as f64;
        for flat in 0..total {
            let mut rest = flat;
            for j in (0..dim).rev() {
                let i = rest % AUDIT_POINTS;
                rest /= AUDIT_POINTS;
                x[j] = spec.domain.lower()[j]
                    + spec.domain.extent(j) * i as f64 / (AUDIT_POINTS - 1) as f64;
            }
            let value = u.eval(&x, t, 0.0);
            if !(value > 0.0) {
                return Err(Error::NonPositiveExact { x: x.clone(), t, value });
            }
        }
    }
    Ok(())
}
