//! Measured terms of the level energy estimate.

use serde::{Deserialize, Serialize};

use super::degiorgi::m_star;
use crate::discretization::TimeSeries;
use crate::error::{Error, Result};
use crate::model::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub m_level: f64,
    /// `sup_τ ∫ (v^{(m+1)/2} − M^{(m+1)/2})₊²`.
    pub level_energy: f64,
    /// `∬ v^{(mⱼ−m)(pⱼ−1)} |∂ⱼ(v^m − M^m)₊|^{pⱼ}` per axis.
    pub gradient_terms: Vec<f64>,
    /// `∬ |f|^{p̄′} χ_{v > M}`.
    pub source_term: f64,
    pub lhs: f64,
    /// `lhs / source_term`, defined as 0 when both vanish.
    pub ratio: f64,
}

/// Evaluates both sides of the energy estimate for `v = min(k, u)`
/// (`k = None` leaves `u` untruncated).
pub fn energy_check(series: &TimeSeries, spec: &ProblemSpec, k: Option<u32>, m_level: f64) -> Result<EnergyReport> {
    let grid = series.grid();
    let times = series.times();
    let ms = m_star(spec, grid, &times);
    if m_level < ms * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "energy level M = {m_level} is below M_* = {ms}"
        )));
    }
    let m = spec.exponents.m_min();
    let half = 0.5 * (m + 1.0);
    let cap = k.map_or(f64::INFINITY, f64::from);
    let p_conj = spec.bar().p_bar_conj;
    let wt = series.time_weights();
    let mh = m_level.powf(half);
    let mm = m_level.powf(m);

    let mut level_energy: f64 = 0.0;
    let mut gradient_terms = vec![0.0; grid.dim()];
    let mut source_term = 0.0;
    let mut x = vec![0.0; grid.dim()];
    let mut v = vec![0.0; grid.len()];
    let mut w = vec![0.0; grid.len()];
    for (frame, &dt_w) in series.frames().iter().zip(&wt) {
        for (i, &u) in frame.values().iter().enumerate() {
            v[i] = u.min(cap).max(0.0);
            w[i] = (v[i].powf(m) - mm).max(0.0);
        }
        let mut level = 0.0;
        for i in 0..grid.len() {
            level += (v[i].powf(half) - mh).max(0.0).powi(2) * grid.weight(i);
            if v[i] > m_level {
                grid.point_into(i, &mut x);
                source_term += dt_w * grid.weight(i) * spec.source.eval(&x, frame.time(), v[i]).abs().powf(p_conj);
            }
        }
        level_energy = level_energy.max(level);
        for (j, term) in gradient_terms.iter_mut().enumerate() {
            let p = spec.exponents.p()[j];
            let weight_exp = (spec.exponents.m()[j] - m) * (p - 1.0);
            let h = grid.spacing()[j];
            let stride = grid.strides()[j];
            for a in grid.face_nodes(j) {
                let b = a + stride;
                let d = (w[b] - w[a]) / h;
                if d == 0.0 {
                    continue;
                }
                let vbar = 0.5 * (v[a] + v[b]);
                *term += dt_w * grid.face_weight(j, a) * vbar.powf(weight_exp) * d.abs().powf(p);
            }
        }
    }
    let lhs = level_energy + gradient_terms.iter().sum::<f64>();
    let ratio = if lhs == 0.0 && source_term == 0.0 {
        0.0
    } else {
        lhs / source_term
    };
    Ok(EnergyReport {
        m_level,
        level_energy,
        gradient_terms,
        source_term,
        lhs,
        ratio,
    })
}
