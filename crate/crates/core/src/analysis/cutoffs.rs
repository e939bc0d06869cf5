//! Piecewise-linear cutoffs in time and in the solution variable.

use crate::error::{Error, Result};

/// `H_δ(s)`: 0 for `s ≤ 0`, `s/δ` on `(0, δ)`, 1 beyond.
pub fn h_delta(delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(if s <= 0.0 {
        0.0
    } else if s < delta {
        s / delta
    } else {
        1.0
    })
}

/// `G_δ(s) = ∫₀ˢ H_δ`: 0, `s²/(2δ)`, `s − δ/2`.
pub fn g_delta(delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(if s <= 0.0 {
        0.0
    } else if s < delta {
        s * s / (2.0 * delta)
    } else {
        s - 0.5 * delta
    })
}

/// Trapezoid in time: 0 outside `[τ₁, τ₂]`, rising on `[τ₁, τ₁+δ]`, 1, falling on `[τ₂−δ, τ₂]`.
pub fn trapezoid(tau1: f64, tau2: f64, delta: f64, t: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(tau1 < tau2) || !(delta < 0.5 * (tau2 - tau1)) {
        return Err(Error::InvalidParameter(format!(
            "trapezoid needs tau1 < tau2 and delta < (tau2 - tau1)/2, got ({tau1}, {tau2}, {delta})"
        )));
    }
    Ok(if t <= tau1 || t >= tau2 {
        0.0
    } else if t < tau1 + delta {
        (t - tau1) / delta
    } else if t <= tau2 - delta {
        1.0
    } else {
        (tau2 - t) / delta
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("cutoff width must be positive, got {delta}")))
    }
}
