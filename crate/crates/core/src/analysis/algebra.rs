//! The gap `𝔟[u,v]` and the two elementary inequalities used with it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative padding applied to every swept supremum.
pub const CALIBRATION_PADDING: f64 = 1.1;

/// `𝔟[u,v] = (u^{m+1} − v^{m+1})/(m+1) − v^m (u − v)`.
pub fn b_quantity(u: f64, v: f64, m: f64) -> Result<f64> {
    if !(u >= 0.0 && v >= 0.0) {
        return Err(Error::InvalidParameter(format!("b[u, v] needs u, v >= 0, got ({u}, {v})")));
    }
    if u == v {
        return Ok(0.0);
    }
    if m == 1.0 {
        return Ok(0.5 * (u - v) * (u - v));
    }
    let r = (u - v) / v;
    if v > 0.0 && r.abs() < 0.1 {
        // v^{m+1} Σ_{n≥2} m(m−1)…(m−n+2)/n! rⁿ, free of the cancellation near u = v
        let mut coef = m / 2.0;
        let mut rn = r * r;
        let mut sum = 0.0;
        for n in 2..40u32 {
            sum += coef * rn;
            coef *= (m - f64::from(n) + 1.0) / f64::from(n + 1);
            rn *= r;
        }
        return Ok((v.powf(m + 1.0) * sum).max(0.0));
    }
    let b = (u.powf(m + 1.0) - v.powf(m + 1.0)) / (m + 1.0) - v.powf(m) * (u - v);
    Ok(b.max(0.0))
}

/// `|v^{(m+1)/2} − u^{(m+1)/2}|²`, the quantity `𝔟` is compared with.
pub fn b_reference(u: f64, v: f64, m: f64) -> f64 {
    let e = 0.5 * (m + 1.0);
    (v.powf(e) - u.powf(e)).powi(2)
}

/// Outcome of a constant sweep: the supremum seen, its padded value, and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sup: f64,
    pub constant: f64,
    pub worst: (f64, f64),
}

impl Calibration {
    fn from_sweep(sup: f64, worst: (f64, f64)) -> Self {
        Self {
            sup,
            constant: CALIBRATION_PADDING * sup,
            worst,
        }
    }
}

/// Sweeps `(u, v)` over a `(n+1)²` lattice of `[0, 10]²` and records the
/// largest `max(𝔟/ref, ref/𝔟)`.
pub fn calibrate_b_sandwich(m: f64, n: usize) -> Calibration {
    let mut sup = 0.0;
    let mut worst = (0.0, 0.0);
    for i in 0..=n {
        let u = 10.0 * i as f64 / n as f64;
        for l in 0..=n {
            if i == l {
                continue;
            }
            let v = 10.0 * l as f64 / n as f64;
            let b = b_quantity(u, v, m).expect("lattice is nonnegative");
            let r = b_reference(u, v, m);
            let ratio = b / r;
            let worse = ratio.max(1.0 / ratio);
            if worse > sup {
                sup = worse;
                worst = (u, v);
            }
        }
    }
    Calibration::from_sweep(sup, worst)
}

/// Sandwich constant `c(m)`: the swept supremum on a 401-point lattice, padded by 10%.
pub fn b_sandwich_constant(m: f64) -> f64 {
    calibrate_b_sandwich(m, 400).constant
}

/// Sweeps `(a, b)` over a lattice of `[−10, 10]²` for the largest
/// `|a−b|^γ / ||a|^{γ−1}a − |b|^{γ−1}b|`.
pub fn calibrate_power_inequality(gamma: f64, n: usize) -> Calibration {
    let phi = |s: f64| s.abs().powf(gamma - 1.0) * s;
    let mut sup = 0.0;
    let mut worst = (0.0, 0.0);
    for i in 0..=n {
        let a = -10.0 + 20.0 * i as f64 / n as f64;
        for l in 0..=n {
            if i == l {
                continue;
            }
            let b = -10.0 + 20.0 * l as f64 / n as f64;
            let ratio = (a - b).abs().powf(gamma) / (phi(a) - phi(b)).abs();
            if ratio > sup {
                sup = ratio;
                worst = (a, b);
            }
        }
    }
    Calibration::from_sweep(sup, worst)
}

pub fn power_inequality_constant(gamma: f64) -> f64 {
    calibrate_power_inequality(gamma, 400).constant
}
