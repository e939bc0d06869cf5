//! Constants of the De Giorgi iteration and the level-set quantities it tracks.
//!
//! The De Giorgi exponent is called `dg_delta` throughout to keep it apart
//! from the cutoff width.

use serde::{Deserialize, Serialize};

use crate::discretization::{trapezoid_weights, Grid, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{Exponents, ProblemSpec};

/// Iterates `Y_{j+1} = C b^j Y_j^{1+δ}` with equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricIteration {
    pub sequence: Vec<f64>,
    /// `Y_n < 1e-12 Y_0` (or `Y_0 = 0`).
    pub converged: bool,
    /// `C^{-1/δ} b^{-1/δ²}`.
    pub threshold: f64,
}

pub fn fast_geometric_iterate(c: f64, b: f64, delta: f64, y0: f64, n: usize) -> Result<GeometricIteration> {
    if !(c > 0.0 && b > 1.0 && delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "geometric iteration needs C > 0, b > 1, delta > 0, got ({c}, {b}, {delta})"
        )));
    }
    let threshold = c.powf(-1.0 / delta) * b.powf(-1.0 / (delta * delta));
    let mut sequence = Vec::with_capacity(n + 1);
    sequence.push(y0);
    let mut y = y0;
    for j in 0..n {
        // once Y underflows, b^j may overflow; keep exact zeros
        y = if y == 0.0 { 0.0 } else { c * b.powi(j as i32) * y.powf(1.0 + delta) };
        sequence.push(y);
    }
    let converged = y0 == 0.0 || y < 1e-12 * y0;
    Ok(GeometricIteration {
        sequence,
        converged,
        threshold,
    })
}

/// Auxiliary integrability exponents `q` with `1 < qᵢ ≤ pᵢ` and `q̄ < N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QChoice {
    pub q: Vec<f64>,
    pub q_bar: f64,
}

/// `q = p` when `p̄ < N`. Otherwise `qᵢ = pᵢ` for `i ≥ 2` and `q₁` is solved
/// from a target `q̄ = 0.99 min(p̄, N)`; when that pushes `q₁` to 1 or below,
/// the target moves to the midpoint between the value giving `q₁ = 1` and
/// `min(p̄, N)`. In one dimension no `q̄ < N = 1` exists and `q = p` is kept.
pub fn select_q(exponents: &Exponents) -> QChoice {
    let p = exponents.p();
    let n = p.len() as f64;
    let p_bar = exponents.bar().p_bar;
    if p_bar < n || p.len() == 1 {
        return QChoice { q: p.to_vec(), q_bar: p_bar };
    }
    let rest: f64 = p[1..].iter().map(|x| 1.0 / x).sum();
    let solve = |q_bar: f64| 1.0 / (n / q_bar - rest);
    let cap = p_bar.min(n);
    let mut q_bar = 0.99 * cap;
    let mut q1 = solve(q_bar);
    if !(q1 > 1.0 && q1 <= p[0]) {
        let q_bar_at_one = n / (1.0 + rest);
        q_bar = 0.5 * (q_bar_at_one + cap);
        q1 = solve(q_bar);
    }
    let mut q = p.to_vec();
    q[0] = q1;
    QChoice { q, q_bar }
}

/// `δ = (N q̄/(N+μ)) (1/N − (1/σ)(1/N + 1/p̄))`.
pub fn dg_delta(n: usize, q_bar: f64, mu: f64, sigma: f64, p_bar: f64) -> f64 {
    let n = n as f64;
    n * q_bar / (n + mu) * (1.0 / n - (1.0 / n + 1.0 / p_bar) / sigma)
}

/// `Q = (q̄/(σ(N+μ))) (1 + N/p̄)`.
pub fn dg_q_exponent(n: usize, q_bar: f64, mu: f64, sigma: f64, p_bar: f64) -> f64 {
    let n = n as f64;
    q_bar / (sigma * (n + mu)) * (1.0 + n / p_bar)
}

/// `M_j = M (2 − 2^{−j})^{2/(m+1)}`.
pub fn level(m_level: f64, m: f64, j: usize) -> f64 {
    m_level * (2.0 - 0.5f64.powi(j as i32)).powf(2.0 / (m + 1.0))
}

/// `max(‖u₀‖∞, ‖g‖∞) + 1` sampled at the grid nodes and the given times.
pub fn m_star(spec: &ProblemSpec, grid: &Grid, times: &[f64]) -> f64 {
    let mut x = vec![0.0; grid.dim()];
    let mut sup: f64 = 0.0;
    for i in 0..grid.len() {
        grid.point_into(i, &mut x);
        sup = sup.max(spec.initial.eval(&x, 0.0, 0.0).abs());
        for &t in times {
            sup = sup.max(spec.boundary.eval(&x, t, 0.0).abs());
        }
    }
    sup + 1.0
}

/// `∬ |f|^q` over the grid and the given times.
pub fn source_integral(spec: &ProblemSpec, grid: &Grid, times: &[f64], q: f64) -> f64 {
    let wt = trapezoid_weights(times);
    let mut x = vec![0.0; grid.dim()];
    let mut total = 0.0;
    for (&t, &w) in times.iter().zip(&wt) {
        let mut s = 0.0;
        for i in 0..grid.len() {
            grid.point_into(i, &mut x);
            s += spec.source.eval(&x, t, 0.0).abs().powf(q) * grid.weight(i);
        }
        total += w * s;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiReport {
    pub c_struct: f64,
    pub m_star: f64,
    pub k0: f64,
    /// `K = c (∬|f|^{σp̄′})^Q`.
    pub k_source: f64,
    pub q: Vec<f64>,
    pub q_bar: f64,
    pub dg_delta: f64,
    pub big_q: f64,
    pub b: f64,
    pub m_level: f64,
    pub l_bound: f64,
    pub m: f64,
    pub levels: Vec<f64>,
    pub y: Vec<f64>,
    pub e: Vec<f64>,
}

impl DeGiorgiReport {
    /// Fills `levels`, `y`, `e` from a series for `j = 0..=j_max`.
    pub fn with_measurements(mut self, series: &TimeSeries, j_max: usize) -> Self {
        let lv = measure_levels(series, self.m_level, self.m, self.q_bar, j_max);
        self.levels = lv.levels;
        self.y = lv.y;
        self.e = lv.e;
        self
    }
}

/// Evaluates every constant of the iteration; integrals use the grid nodes
/// and `n_time + 1` equally spaced times.
pub fn degiorgi_constants(spec: &ProblemSpec, grid: &Grid, n_time: usize, c_struct: f64) -> Result<DeGiorgiReport> {
    let bar = spec.bar();
    let n = spec.dim();
    let m = spec.exponents.m_min();
    let q = select_q(&spec.exponents);
    let delta = dg_delta(n, q.q_bar, bar.mu, spec.sigma, bar.p_bar);
    if !(delta > 0.0) {
        return Err(Error::NonPositiveDelta {
            delta,
            bound: spec.sigma_bound(),
        });
    }
    let big_q = dg_q_exponent(n, q.q_bar, bar.mu, spec.sigma, bar.p_bar);
    let b = 2f64.powf(2.0 * m * q.q_bar * (1.0 + delta) / (m + 1.0));
    let n_time = n_time.max(1);
    let times: Vec<f64> = (0..=n_time).map(|i| spec.horizon * i as f64 / n_time as f64).collect();
    let ms = m_star(spec, grid, &times);
    let k_source = c_struct * source_integral(spec, grid, &times, spec.sigma * bar.p_bar_conj).powf(big_q);
    let omega_t = grid.volume() * spec.horizon;
    let k0 = c_struct * source_integral(spec, grid, &times, bar.p_bar_conj).powf(1.0 / bar.p_bar)
        + c_struct * ms.powf(m) * omega_t.powf(1.0 / bar.p_bar);
    let candidate = if k_source > 0.0 {
        c_struct * (k0.powf(q.q_bar * delta) * k_source).powf(1.0 / (m * q.q_bar * (1.0 + delta)))
    } else {
        0.0
    };
    let m_level = ms.max(candidate);
    Ok(DeGiorgiReport {
        c_struct,
        m_star: ms,
        k0,
        k_source,
        q: q.q,
        q_bar: q.q_bar,
        dg_delta: delta,
        big_q,
        b,
        m_level,
        l_bound: 2f64.powf(2.0 / (m + 1.0)) * m_level,
        m,
        levels: Vec::new(),
        y: Vec::new(),
        e: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMeasurements {
    pub levels: Vec<f64>,
    pub y: Vec<f64>,
    pub e: Vec<f64>,
}

/// `Y_j = ∬ (v^{(m+1)/2} − M_j^{(m+1)/2})₊^{2mq̄/(m+1)}` and `|E_j| = |{v > M_j}|`.
pub fn measure_levels(series: &TimeSeries, m_level: f64, m: f64, q_bar: f64, j_max: usize) -> LevelMeasurements {
    let half = 0.5 * (m + 1.0);
    let exp = 2.0 * m * q_bar / (m + 1.0);
    let wt = series.time_weights();
    let grid = series.grid();
    let mut out = LevelMeasurements {
        levels: Vec::with_capacity(j_max + 1),
        y: Vec::with_capacity(j_max + 1),
        e: Vec::with_capacity(j_max + 1),
    };
    for j in 0..=j_max {
        let mj = level(m_level, m, j);
        let mh = mj.powf(half);
        let (mut y, mut e) = (0.0, 0.0);
        for (frame, &w) in series.frames().iter().zip(&wt) {
            for (v, gw) in frame.values().iter().zip(grid.weights()) {
                if *v > mj {
                    let d = v.max(0.0).powf(half) - mh;
                    y += w * gw * d.max(0.0).powf(exp);
                    e += w * gw;
                }
            }
        }
        out.levels.push(mj);
        out.y.push(y);
        out.e.push(e);
    }
    out
}

/// Largest `|E_{j+1}| / (M^{−mq̄} 2^{(j+1)2mq̄/(m+1)} Y_j)`; at most 1 when the
/// level-set bound holds (0 when every `E_{j+1}` is empty).
pub fn level_recursion_ratio(lv: &LevelMeasurements, m_level: f64, m: f64, q_bar: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..lv.y.len().saturating_sub(1) {
        let e_next = lv.e[j + 1];
        if e_next == 0.0 {
            continue;
        }
        let bound = m_level.powf(-m * q_bar)
            * 2f64.powf((j + 1) as f64 * 2.0 * m * q_bar / (m + 1.0))
            * lv.y[j];
        worst = worst.max(if bound > 0.0 { e_next / bound } else { f64::INFINITY });
    }
    worst
}

/// Recursion envelope fitted to measured `Y_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// First index with `Y_j > 0`; the envelope starts there.
    pub start: usize,
    /// Smallest `C` with `Y_{j+1} ≤ C b^j Y_j^{1+δ}` for all measured `j ≥ start`.
    pub fitted_c: f64,
    /// Envelope values aligned with the measured indices.
    pub values: Vec<f64>,
}

impl Envelope {
    /// Whether every measured value sits below the envelope (relative slack `rtol`).
    pub fn dominates(&self, y: &[f64], rtol: f64) -> bool {
        y.iter()
            .enumerate()
            .skip(self.start)
            .all(|(j, &yj)| yj <= self.values[j] * (1.0 + rtol) + f64::MIN_POSITIVE)
    }
}

/// Fits `C` to the measured sequence and iterates the recursion from the first
/// positive entry; `None` when every `Y_j` vanishes.
pub fn fit_envelope(y: &[f64], b: f64, delta: f64) -> Option<Envelope> {
    let start = y.iter().position(|&v| v > 0.0)?;
    let mut fitted: f64 = 0.0;
    for j in start..y.len() - 1 {
        if y[j] > 0.0 {
            fitted = fitted.max(y[j + 1] / (b.powi(j as i32) * y[j].powf(1.0 + delta)));
        }
    }
    let mut values = vec![0.0; y.len()];
    values[start] = y[start];
    if fitted > 0.0 {
        let tail = fast_geometric_iterate(fitted * b.powi(start as i32), b, delta, y[start], y.len() - 1 - start)
            .expect("positive parameters");
        values[start..].copy_from_slice(&tail.sequence);
    }
    Some(Envelope {
        start,
        fitted_c: fitted,
        values,
    })
}
