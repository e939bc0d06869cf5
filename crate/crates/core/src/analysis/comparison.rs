//! Discrete check of the `L¹`-type comparison inequality between two trajectories.

use serde::{Deserialize, Serialize};

use crate::discretization::TimeSeries;
use crate::error::{Error, Result};
use crate::model::Evaluator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub t1: f64,
    pub times: Vec<f64>,
    /// `∫ (u − v)₊ (t₂)` for each sampled `t₂ ≥ t₁`.
    pub lhs: Vec<f64>,
    /// `∬_{[t₁,t₂]} χ (f_u χ_{u>0} − f_v) + ∫ (u − v)₊ (t₁)`.
    pub rhs: Vec<f64>,
    pub violation: f64,
    /// `max (u − v)₊` over space-time, the pointwise corollary.
    pub max_pointwise_excess: f64,
}

/// Evaluates both sides for every stored `t₂ > t₁`. Values with magnitude at
/// most `zero_tol` count as zero in the indicators. Time integrals use the
/// right-endpoint rule, which is the one a backward-Euler trajectory satisfies
/// step by step.
pub fn comparison_check(
    u: &TimeSeries,
    v: &TimeSeries,
    f_u: &Evaluator,
    f_v: &Evaluator,
    t1: f64,
    zero_tol: f64,
) -> Result<ComparisonReport> {
    if !u.compatible(v) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid();
    let times = u.times();
    let start = times
        .iter()
        .position(|&t| t >= t1 - 1e-12 * (1.0 + t1.abs()))
        .ok_or_else(|| Error::InvalidParameter(format!("t1 = {t1} is past the last stored time")))?;

    let excess = |i: usize| -> f64 {
        u.frame(i)
            .values()
            .iter()
            .zip(v.frame(i).values())
            .zip(grid.weights())
            .map(|((a, b), w)| (a - b).max(0.0) * w)
            .sum()
    };
    let base = excess(start);
    let mut x = vec![0.0; grid.dim()];
    let mut out = ComparisonReport {
        t1: times[start],
        times: vec![times[start]],
        lhs: vec![base],
        rhs: vec![base],
        violation: 0.0,
        max_pointwise_excess: 0.0,
    };
    let mut source = 0.0;
    for i in start + 1..times.len() {
        let t = times[i];
        let dt = t - times[i - 1];
        let mut s = 0.0;
        for (n, (&a, &b)) in u.frame(i).values().iter().zip(v.frame(i).values()).enumerate() {
            let both_zero = a.abs() <= zero_tol && b.abs() <= zero_tol;
            if b < a || both_zero {
                grid.point_into(n, &mut x);
                let fu = if a > zero_tol { f_u.eval(&x, t, a) } else { 0.0 };
                s += (fu - f_v.eval(&x, t, b)) * grid.weight(n);
            }
        }
        source += dt * s;
        let lhs = excess(i);
        let rhs = source + base;
        out.violation = out.violation.max(lhs - rhs);
        out.times.push(t);
        out.lhs.push(lhs);
        out.rhs.push(rhs);
    }
    out.max_pointwise_excess = u
        .frames()
        .iter()
        .zip(v.frames())
        .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| x - y))
        .fold(0.0, f64::max);
    Ok(out)
}
