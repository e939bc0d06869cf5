//! Steklov averages and exponential time mollification of a stored series.
//!
//! The series is read as piecewise linear in time between its frames, and
//! every integral below is exact for that interpolant.

use crate::discretization::{ScalarField, TimeSeries};
use crate::error::{Error, Result};

/// Running integrals `C(t_i) = ∫_{t_0}^{t_i} v` at the stored times, one vector per frame.
fn cumulative(series: &TimeSeries) -> Vec<Vec<f64>> {
    let frames = series.frames();
    let n = frames[0].values().len();
    let mut out = Vec::with_capacity(frames.len());
    let mut acc = vec![0.0; n];
    out.push(acc.clone());
    for w in frames.windows(2) {
        let dt = w[1].time() - w[0].time();
        for ((a, x), y) in acc.iter_mut().zip(w[0].values()).zip(w[1].values()) {
            *a += 0.5 * dt * (x + y);
        }
        out.push(acc.clone());
    }
    out
}

/// Index `k` with `t_k ≤ t ≤ t_{k+1}`, clamped to the last interval.
fn locate(times: &[f64], t: f64) -> usize {
    let k = times.partition_point(|&s| s <= t);
    k.saturating_sub(1).min(times.len() - 2)
}

/// `v(t)` by linear interpolation.
pub fn interpolate(series: &TimeSeries, t: f64) -> Vec<f64> {
    let times = series.times();
    if times.len() == 1 {
        return series.frame(0).values().to_vec();
    }
    let k = locate(&times, t);
    let theta = (t - times[k]) / (times[k + 1] - times[k]);
    let (a, b) = (series.frame(k).values(), series.frame(k + 1).values());
    a.iter().zip(b).map(|(x, y)| x + theta * (y - x)).collect()
}

/// `∫_{t_0}^{t} v` for the interpolant.
fn integral_to(series: &TimeSeries, cum: &[Vec<f64>], times: &[f64], t: f64) -> Vec<f64> {
    let k = locate(times, t);
    let dt = times[k + 1] - times[k];
    let s = t - times[k];
    let (a, b) = (series.frame(k).values(), series.frame(k + 1).values());
    cum[k]
        .iter()
        .zip(a.iter().zip(b))
        .map(|(c, (x, y))| c + s * x + 0.5 * s * s / dt * (y - x))
        .collect()
}

fn check_h(series: &TimeSeries, h: f64, strict_window: bool) -> Result<f64> {
    let times = series.times();
    if times.len() < 2 {
        return Err(Error::InvalidParameter("mollification needs at least two frames".into()));
    }
    let span = times[times.len() - 1] - times[0];
    let ok = h > 0.0 && h.is_finite() && (!strict_window || h < span);
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "mollification width {h} outside (0, {span})"
        )));
    }
    Ok(span)
}

/// Steklov average `[v]_h(t) = (1/h)∫_t^{t+h} v`, or `(1/h)∫_{t−h}^t v` when
/// `reversed`, at arbitrary `t` in the valid window.
pub fn steklov_at(series: &TimeSeries, h: f64, reversed: bool, t: f64) -> Result<Vec<f64>> {
    check_h(series, h, true)?;
    let times = series.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let (a, b) = if reversed { (t - h, t) } else { (t, t + h) };
    let slack = 1e-12 * (1.0 + t1.abs());
    if a < t0 - slack || b > t1 + slack {
        return Err(Error::InvalidParameter(format!("t = {t} outside the Steklov window")));
    }
    let cum = cumulative(series);
    let lo = integral_to(series, &cum, &times, a.max(t0));
    let hi = integral_to(series, &cum, &times, b.min(t1));
    Ok(hi.iter().zip(&lo).map(|(x, y)| (x - y) / h).collect())
}

/// Steklov average at every stored time inside the valid window.
pub fn steklov(series: &TimeSeries, h: f64, reversed: bool) -> Result<TimeSeries> {
    check_h(series, h, true)?;
    let times = series.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let slack = 1e-12 * (1.0 + t1.abs());
    let cum = cumulative(series);
    let grid = series.grid().clone();
    let mut frames = Vec::new();
    for &t in &times {
        let (a, b) = if reversed { (t - h, t) } else { (t, t + h) };
        if a < t0 - slack || b > t1 + slack {
            continue;
        }
        let lo = integral_to(series, &cum, &times, a.max(t0));
        let hi = integral_to(series, &cum, &times, b.min(t1));
        let values = hi.iter().zip(&lo).map(|(x, y)| (x - y) / h).collect();
        frames.push(ScalarField::new(grid.clone(), values, t)?);
    }
    TimeSeries::new(frames)
}

/// `1 − e^{−x}(1+x)` without cancellation for small `x`.
fn exp_moment(x: f64) -> f64 {
    if x < 0.1 {
        // Σ_{n≥2} (−1)^n (n−1) xⁿ / n!
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        for n in 2..20u32 {
            sum += f64::from(n - 1) * term;
            term *= -x / f64::from(n + 1);
        }
        sum
    } else {
        -(-x).exp_m1() - x * (-x).exp()
    }
}

/// Advances `E` from `s` to `s + Δ` across a linear segment from `va` to `vb`.
fn exp_segment(e: &mut [f64], va: &[f64], vb: &[f64], delta: f64, h: f64) {
    if delta <= 0.0 {
        return;
    }
    let x = delta / h;
    let decay = (-x).exp();
    let a = -(-x).exp_m1();
    let b = exp_moment(x) * h / delta;
    for ((ei, &ya), &yb) in e.iter_mut().zip(va).zip(vb) {
        *ei = decay * *ei + yb * a - (yb - ya) * b;
    }
}

/// Forward mollification on explicit times/values; returns values at every time.
fn exp_forward(times: &[f64], values: &[&[f64]], h: f64) -> Vec<Vec<f64>> {
    let mut e = vec![0.0; values[0].len()];
    let mut out = Vec::with_capacity(times.len());
    out.push(e.clone());
    for i in 0..times.len() - 1 {
        exp_segment(&mut e, values[i], values[i + 1], times[i + 1] - times[i], h);
        out.push(e.clone());
    }
    out
}

/// `⟦v⟧(t) = (1/h)∫_0^t e^{(s−t)/h} v(s) ds`, or the reversed
/// `(1/h)∫_t^T e^{(t−s)/h} v(s) ds`, at every stored time.
pub fn exp_mollify(series: &TimeSeries, h: f64, reversed: bool) -> Result<TimeSeries> {
    check_h(series, h, false)?;
    let times = series.times();
    let values: Vec<&[f64]> = series.frames().iter().map(ScalarField::values).collect();
    let out = if reversed {
        let t_end = times[times.len() - 1];
        let rt: Vec<f64> = times.iter().rev().map(|t| t_end - t).collect();
        let rv: Vec<&[f64]> = values.iter().rev().copied().collect();
        let mut r = exp_forward(&rt, &rv, h);
        r.reverse();
        r
    } else {
        exp_forward(&times, &values, h)
    };
    TimeSeries::from_values(series.grid().clone(), &times, out)
}

/// The exponential mollification at an arbitrary time.
pub fn exp_mollify_at(series: &TimeSeries, h: f64, reversed: bool, t: f64) -> Result<Vec<f64>> {
    check_h(series, h, false)?;
    let times = series.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    if !(t >= t0 && t <= t1) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [{t0}, {t1}]")));
    }
    let values: Vec<&[f64]> = series.frames().iter().map(ScalarField::values).collect();
    let (rt, rv, target): (Vec<f64>, Vec<&[f64]>, f64) = if reversed {
        (
            times.iter().rev().map(|s| t1 - s).collect(),
            values.iter().rev().copied().collect(),
            t1 - t,
        )
    } else {
        (times.clone(), values, t - t0 + times[0])
    };
    let k = locate(&rt, target);
    let mut e = exp_forward(&rt[..=k], &rv[..=k], h).pop().expect("nonempty");
    let theta = (target - rt[k]) / (rt[k + 1] - rt[k]);
    let vt: Vec<f64> = rv[k].iter().zip(rv[k + 1]).map(|(a, b)| a + theta * (b - a)).collect();
    exp_segment(&mut e, rv[k], &vt, target - rt[k], h);
    Ok(e)
}
