//! Space-time norms of powers, the `V^{p,m}` distance, and the Troisi constant.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::algebra::CALIBRATION_PADDING;
use crate::discretization::{face_diff_power, integrate_face_power, sobolev_troisi_gap, zero_boundary_field, Grid, ScalarField, TimeSeries};
use crate::error::{Error, Result};
use crate::model::Exponents;

/// `Σ_t w_t ∫ |D_j u^e|^p` over faces of `axis`.
fn series_face_integral(series: &TimeSeries, exponent: f64, axis: usize, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for (frame, w) in series.frames().iter().zip(series.time_weights()) {
        total += w * integrate_face_power(&face_diff_power(frame, exponent, axis)?, p);
    }
    Ok(total)
}

/// `‖D_j u^m‖_{L^{pⱼ}(Ω_T)}` per axis.
pub fn gradient_power_norms(series: &TimeSeries, m: f64, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != series.grid().dim() {
        return Err(Error::Dimension("one exponent per axis expected".into()));
    }
    p.iter()
        .enumerate()
        .map(|(j, &pj)| Ok(series_face_integral(series, m, j, pj)?.powf(1.0 / pj)))
        .collect()
}

/// `q_* = max({m+1} ∪ {mⱼ})`.
pub fn q_star(exponents: &Exponents) -> f64 {
    exponents
        .m()
        .iter()
        .copied()
        .fold(exponents.m_min() + 1.0, f64::max)
}

/// `d(u,v) = ‖u − v‖_{L^{q*}} + Σⱼ ‖D_j u^{mⱼ} − D_j v^{mⱼ}‖_{L^{pⱼ}}`.
pub fn vpm_distance(u: &TimeSeries, v: &TimeSeries, exponents: &Exponents) -> Result<f64> {
    if !u.compatible(v) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid();
    let q = q_star(exponents);
    let wt = u.time_weights();
    let mut value_part = 0.0;
    let mut grad_parts = vec![0.0; exponents.dim()];
    for ((a, b), w) in u.frames().iter().zip(v.frames()).zip(&wt) {
        value_part += w * a
            .values()
            .iter()
            .zip(b.values())
            .zip(grid.weights())
            .map(|((x, y), gw)| (x - y).abs().powf(q) * gw)
            .sum::<f64>();
        for (j, part) in grad_parts.iter_mut().enumerate() {
            let (mj, pj) = (exponents.m()[j], exponents.p()[j]);
            let da = face_diff_power(a, mj, j)?;
            let db = face_diff_power(b, mj, j)?;
            *part += w * grid
                .face_nodes(j)
                .map(|f| (da.get(f) - db.get(f)).abs().powf(pj) * grid.face_weight(j, f))
                .sum::<f64>();
        }
    }
    Ok(value_part.powf(1.0 / q)
        + grad_parts
            .iter()
            .zip(exponents.p())
            .map(|(s, p)| s.powf(1.0 / p))
            .sum::<f64>())
}

/// Largest `lhs/rhs` of the Troisi pair over all rescalings `λu`.
///
/// With `A = ∫|u|^{p̄}` and `B_j = ∫|∂_j u|^{pⱼ}` the ratio is
/// `A λ^{p̄} / Σ B_j λ^{pⱼ}`, log-concave in `log λ`; a golden-section search
/// on `[-40, 40]` finds its maximum.
pub fn troisi_ratio_over_scales(field: &ScalarField, exponents: &Exponents) -> Result<f64> {
    let p_bar = exponents.bar().p_bar;
    let (a, _) = sobolev_troisi_gap(field, exponents)?;
    let b: Vec<f64> = (0..exponents.dim())
        .map(|j| Ok(integrate_face_power(&face_diff_power(field, 1.0, j)?, exponents.p()[j])))
        .collect::<Result<_>>()?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let log_ratio = |s: f64| {
        let denom: f64 = b
            .iter()
            .zip(exponents.p())
            .filter(|(bj, _)| **bj > 0.0)
            .map(|(bj, pj)| bj.ln() + pj * s)
            .fold(f64::NEG_INFINITY, |acc, t| {
                let (hi, lo) = if acc > t { (acc, t) } else { (t, acc) };
                if lo == f64::NEG_INFINITY {
                    hi
                } else {
                    hi + (lo - hi).exp().ln_1p()
                }
            });
        a.ln() + p_bar * s - denom
    };
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (log_ratio(c), log_ratio(d));
    for _ in 0..200 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = log_ratio(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = log_ratio(d);
        }
    }
    Ok(log_ratio(0.5 * (lo + hi)).exp())
}

/// Random zero-boundary field: a sum of low sine modes with uniform
/// coefficients, multiplied by a random amplitude `10^{U(-2,2)}`.
pub fn random_zero_boundary_field(grid: Arc<Grid>, rng: &mut impl Rng) -> ScalarField {
    let dim = grid.dim();
    let modes = 4usize;
    let total = modes.pow(dim as u32);
    let coeffs: Vec<f64> = (0..total).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let amplitude = 10f64.powf(rng.gen_range(-2.0..2.0));
    let lower = grid.lower().to_vec();
    let extent: Vec<f64> = (0..dim).map(|j| grid.upper()[j] - lower[j]).collect();
    zero_boundary_field(grid, move |x| {
        let mut sum = 0.0;
        for (flat, c) in coeffs.iter().enumerate() {
            let mut rest = flat;
            let mut term = *c;
            for j in 0..dim {
                let k = (rest % modes + 1) as f64;
                rest /= modes;
                term *= (k * PI * (x[j] - lower[j]) / extent[j]).sin() / k;
            }
            sum += term;
        }
        amplitude * sum
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TroisiCalibration {
    pub sup: f64,
    pub constant: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Calibrates `C` in `∫|u|^{p̄} ≤ C Σⱼ ∫|∂ⱼu|^{pⱼ}` on a grid: the largest
/// scale-maximized ratio over the single bump and `samples` random fields,
/// padded by 10%.
pub fn calibrate_troisi(grid: Arc<Grid>, exponents: &Exponents, samples: usize, seed: u64) -> Result<TroisiCalibration> {
    let lower = grid.lower().to_vec();
    let upper = grid.upper().to_vec();
    let bump = zero_boundary_field(grid.clone(), |x| {
        (0..x.len())
            .map(|j| (PI * (x[j] - lower[j]) / (upper[j] - lower[j])).sin())
            .product()
    });
    let mut sup = troisi_ratio_over_scales(&bump, exponents)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let field = random_zero_boundary_field(grid.clone(), &mut rng);
        sup = sup.max(troisi_ratio_over_scales(&field, exponents)?);
    }
    Ok(TroisiCalibration {
        sup,
        constant: CALIBRATION_PADDING * sup,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoxDomain;

    #[test]
    fn unit_gradient_norm() {
        let grid = Arc::new(Grid::new(&BoxDomain::unit(1), vec![11]).unwrap());
        let s = TimeSeries::from_fn(grid, &[0.0, 0.5, 2.0], |x, _| 1.0 + x[0]).unwrap();
        let n = gradient_power_norms(&s, 1.0, &[2.0]).unwrap();
        assert!((n[0] * n[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distance_of_shifted_constants() {
        let grid = Arc::new(Grid::new(&BoxDomain::unit(2), vec![5, 5]).unwrap());
        let e = Exponents::new(vec![2.0, 3.0], vec![1.0, 1.5]).unwrap();
        let u = TimeSeries::from_fn(grid.clone(), &[0.0, 1.0], |_, _| 2.0).unwrap();
        let v = TimeSeries::from_fn(grid, &[0.0, 1.0], |_, _| 1.5).unwrap();
        // q* = max(2, 1, 1.5) = 2, |Ω_T| = 1
        assert!((vpm_distance(&u, &v, &e).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(vpm_distance(&u, &u, &e).unwrap(), 0.0);
    }

    #[test]
    fn scale_maximized_ratio_is_scale_free() {
        let grid = Arc::new(Grid::new(&BoxDomain::unit(2), vec![9, 9]).unwrap());
        let e = Exponents::new(vec![2.0, 3.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_zero_boundary_field(grid, &mut rng);
        let r1 = troisi_ratio_over_scales(&f, &e).unwrap();
        let r2 = troisi_ratio_over_scales(&f.map(|v| 7.0 * v), &e).unwrap();
        assert!((r1 - r2).abs() < 1e-8 * r1);
    }
}

/// Space-time `L²` errors of a trajectory against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2Error {
    /// Quadrature over the stored nodes and frames.
    pub nodal: f64,
    /// Error of the multilinear-in-space, linear-in-time reconstruction,
    /// integrated with three Gauss points per cell direction.
    pub reconstructed: f64,
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

pub fn l2_error(series: &TimeSeries, exact: &crate::model::Evaluator) -> L2Error {
    let grid = series.grid();
    let dim = grid.dim();
    let mut x = vec![0.0; dim];
    let mut nodal = 0.0;
    for (frame, w) in series.frames().iter().zip(series.time_weights()) {
        let mut s = 0.0;
        for (i, v) in frame.values().iter().enumerate() {
            grid.point_into(i, &mut x);
            s += (v - exact.eval(&x, frame.time(), 0.0)).powi(2) * grid.weight(i);
        }
        nodal += w * s;
    }

    let cells: Vec<usize> = (0..grid.len())
        .filter(|&i| (0..dim).all(|j| grid.has_face(i, j)))
        .collect();
    let corners = 1usize << dim;
    let gauss_points = 3usize.pow(dim as u32);
    let cell_jac: f64 = grid.spacing().iter().map(|h| 0.5 * h).product();
    let mut recon = 0.0;
    for n in 0..series.len() - 1 {
        let (fa, fb) = (series.frame(n), series.frame(n + 1));
        let (ta, tb) = (fa.time(), fb.time());
        let tj = 0.5 * (tb - ta);
        for &cell in &cells {
            for g in 0..gauss_points {
                let mut rest = g;
                let mut weight = cell_jac * tj;
                let mut local = vec![0.0; dim];
                for j in (0..dim).rev() {
                    let (xi, wi) = GAUSS3[rest % 3];
                    rest /= 3;
                    local[j] = 0.5 * (xi + 1.0);
                    weight *= wi;
                    x[j] = grid.coord(j, grid.axis_index(cell, j)) + local[j] * grid.spacing()[j];
                }
                let mut va = 0.0;
                let mut vb = 0.0;
                for c in 0..corners {
                    let mut node = cell;
                    let mut phi = 1.0;
                    for (j, &l) in local.iter().enumerate() {
                        if c >> j & 1 == 1 {
                            node += grid.strides()[j];
                            phi *= l;
                        } else {
                            phi *= 1.0 - l;
                        }
                    }
                    va += phi * fa.values()[node];
                    vb += phi * fb.values()[node];
                }
                for (tau, wt) in GAUSS3 {
                    let theta = 0.5 * (tau + 1.0);
                    let t = ta + theta * (tb - ta);
                    let v = va + theta * (vb - va);
                    recon += weight * wt * (v - exact.eval(&x, t, 0.0)).powi(2);
                }
            }
        }
    }
    L2Error {
        nodal: nodal.sqrt(),
        reconstructed: recon.sqrt(),
    }
}
