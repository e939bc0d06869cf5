//! Exact and truncated per-axis diffusion fields.
//!
//! The exact field is `A_j = a_j |ξ_j|^{p_j-2} ξ_j` applied to `ξ_j = ∂_j u^{m_j}`.
//! The truncated field used by the regularized problems is
//! `Â^k_j = a_j m_j^{p_j-1} T_k(u)^{(m_j-1)(p_j-1)} |ξ_j|^{p_j-2} ξ_j`
//! applied to `ξ_j = ∂_j u`.

use super::problem::ProblemSpec;

/// `T_k(s) = min{k, max{s, 1/k}}`.
#[inline]
pub fn truncate(k: u32, s: f64) -> f64 {
    debug_assert!(k >= 1);
    let k = f64::from(k);
    s.max(1.0 / k).min(k)
}

/// Derivative of `T_k`; taken as 1 on the closed band.
#[inline]
pub fn truncate_slope(k: u32, s: f64) -> f64 {
    let k = f64::from(k);
    if s >= 1.0 / k && s <= k {
        1.0
    } else {
        0.0
    }
}

/// `|ξ|^{p-2} ξ`, continuously extended by 0 at the origin.
#[inline]
pub fn signed_power(xi: f64, p: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else {
        xi.signum() * xi.abs().powf(p - 1.0)
    }
}

pub fn eval_flux(spec: &ProblemSpec, axis: usize, x: &[f64], t: f64, u: f64, xi: f64) -> f64 {
    let a = spec.coefficients.coeffs[axis].eval(x, t, u);
    a * signed_power(xi, spec.exponents.p()[axis])
}

/// `â^k_j(x, t, u) = a_j(x, t, u) m_j^{p_j-1} T_k(u)^{(m_j-1)(p_j-1)}`.
pub fn truncated_coefficient(spec: &ProblemSpec, k: u32, axis: usize, x: &[f64], t: f64, u: f64) -> f64 {
    let p = spec.exponents.p()[axis];
    let m = spec.exponents.m()[axis];
    let a = spec.coefficients.coeffs[axis].eval(x, t, u);
    if m == 1.0 {
        return a;
    }
    a * m.powf(p - 1.0) * truncate(k, u).powf((m - 1.0) * (p - 1.0))
}

/// Derivative of [`truncated_coefficient`] in `u`.
pub fn truncated_coefficient_du(
    spec: &ProblemSpec,
    k: u32,
    axis: usize,
    x: &[f64],
    t: f64,
    u: f64,
) -> f64 {
    let p = spec.exponents.p()[axis];
    let m = spec.exponents.m()[axis];
    let coeff = &spec.coefficients.coeffs[axis];
    let da = coeff.du(x, t, u);
    if m == 1.0 {
        return da;
    }
    let e = (m - 1.0) * (p - 1.0);
    let scale = m.powf(p - 1.0);
    let tk = truncate(k, u);
    let a = coeff.eval(x, t, u);
    scale * (da * tk.powf(e) + a * e * tk.powf(e - 1.0) * truncate_slope(k, u))
}

pub fn eval_flux_truncated(
    spec: &ProblemSpec,
    k: u32,
    axis: usize,
    x: &[f64],
    t: f64,
    u: f64,
    xi: f64,
) -> f64 {
    truncated_coefficient(spec, k, axis, x, t, u) * signed_power(xi, spec.exponents.p()[axis])
}

/// Growth constant `b_{k,j} = Λ m_j^{p_j-1} k^{(m_j-1)(p_j-1)}`.
pub fn growth_constant(spec: &ProblemSpec, k: u32, axis: usize) -> f64 {
    let p = spec.exponents.p()[axis];
    let m = spec.exponents.m()[axis];
    spec.coefficients.lambda * m.powf(p - 1.0) * f64::from(k).powf((m - 1.0) * (p - 1.0))
}

/// Coercivity constant `c_k = Λ⁻¹ min_j m_j^{p_j-1} k^{-(m_j-1)(p_j-1)}`.
pub fn coercivity_constant(spec: &ProblemSpec, k: u32) -> f64 {
    let p = spec.exponents.p();
    let m = spec.exponents.m();
    let min = (0..spec.dim())
        .map(|j| m[j].powf(p[j] - 1.0) * f64::from(k).powf(-(m[j] - 1.0) * (p[j] - 1.0)))
        .fold(f64::INFINITY, f64::min);
    min / spec.coefficients.lambda
}

/// A Lipschitz constant of `u ↦ â^k_j(x, t, u)` built from the audited
/// Lipschitz constant and ellipticity band of `a_j`.
pub fn truncated_lipschitz(spec: &ProblemSpec, k: u32, axis: usize) -> f64 {
    let p = spec.exponents.p()[axis];
    let m = spec.exponents.m()[axis];
    let kf = f64::from(k);
    let e = (m - 1.0) * (p - 1.0);
    let scale = m.powf(p - 1.0);
    let t_max = kf.powf(e);
    // sup over [1/k, k] of e T^{e-1}
    let slope_max = if e == 0.0 {
        0.0
    } else if e >= 1.0 {
        e * kf.powf(e - 1.0)
    } else {
        e * kf.powf(1.0 - e)
    };
    scale * (spec.coefficients.lipschitz * t_max + spec.coefficients.lambda * slope_max)
}
