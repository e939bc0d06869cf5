//! Discrete calculus on the nodal grid.

use std::sync::Arc;

use super::field::{same_grid, FaceField, ScalarField, TimeSeries};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::model::Exponents;

/// Nodal power `s^exponent`, rejecting negative bases for fractional exponents.
#[inline]
pub(crate) fn checked_power(value: f64, exponent: f64, node: usize) -> Result<f64> {
    if exponent == 1.0 {
        return Ok(value);
    }
    if value < 0.0 && exponent.fract() != 0.0 {
        return Err(Error::NegativeValue {
            node,
            value,
            exponent,
        });
    }
    Ok(value.powf(exponent))
}

/// Face differences `(u_{i+e_j}^q - u_i^q) / h_j` along `axis`.
///
/// Powers are taken nodewise before differencing, so the discrete chain rule
/// `D(u^q) = (difference of powers)` holds exactly.
pub fn face_diff_power(field: &ScalarField, exponent: f64, axis: usize) -> Result<FaceField> {
    let grid = field.grid().clone();
    if axis >= grid.dim() {
        return Err(Error::Dimension(format!("axis {axis} on a {}-d grid", grid.dim())));
    }
    let powered = field
        .values()
        .iter()
        .enumerate()
        .map(|(node, &v)| checked_power(v, exponent, node))
        .collect::<Result<Vec<_>>>()?;
    let stride = grid.strides()[axis];
    let h = grid.spacing()[axis];
    let mut out = FaceField::zeros(grid.clone(), axis);
    for flat in 0..grid.len() {
        if grid.has_face(flat, axis) {
            out.set(flat, (powered[flat + stride] - powered[flat]) / h);
        }
    }
    Ok(out)
}

/// Conservative divergence `Σ_j (F_{i+½} - F_{i-½}) / h_j` at interior nodes;
/// boundary nodes carry zero.
pub fn divergence(fluxes: &[FaceField]) -> Result<ScalarField> {
    let grid = fluxes
        .first()
        .ok_or_else(|| Error::Dimension("no flux components".into()))?
        .grid()
        .clone();
    if fluxes.len() != grid.dim() {
        return Err(Error::Dimension(format!(
            "{} flux components on a {}-d grid",
            fluxes.len(),
            grid.dim()
        )));
    }
    for (axis, f) in fluxes.iter().enumerate() {
        if !same_grid(f.grid(), &grid) {
            return Err(Error::GridMismatch);
        }
        if f.axis() != axis {
            return Err(Error::Dimension(format!("component {axis} holds axis {}", f.axis())));
        }
    }
    let mut values = vec![0.0; grid.len()];
    for (flat, value) in values.iter_mut().enumerate() {
        if grid.is_boundary(flat) {
            continue;
        }
        *value = fluxes
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let s = grid.strides()[j];
                (f.get(flat) - f.get(flat - s)) / grid.spacing()[j]
            })
            .sum();
    }
    ScalarField::new(grid, values, 0.0)
}

/// Net outward flux through the faces bounding the interior nodes; equals the
/// divergence summed over interior nodes times the cell volume.
pub fn boundary_flux_sum(fluxes: &[FaceField]) -> f64 {
    let grid = fluxes[0].grid();
    let mut total = 0.0;
    for (j, f) in fluxes.iter().enumerate() {
        let transverse: f64 = grid
            .spacing()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, h)| h)
            .product();
        let last = grid.counts()[j] - 2;
        for flat in 0..grid.len() {
            let interior_elsewhere = (0..grid.dim())
                .filter(|&i| i != j)
                .all(|i| {
                    let idx = grid.axis_index(flat, i);
                    idx > 0 && idx + 1 < grid.counts()[i]
                });
            if !interior_elsewhere {
                continue;
            }
            let idx = grid.axis_index(flat, j);
            if idx == last {
                total += f.get(flat) * transverse;
            } else if idx == 0 {
                total -= f.get(flat) * transverse;
            }
        }
    }
    total
}

/// `Σ |u|^q w_i` with trapezoid weights.
pub fn integrate_power(field: &ScalarField, exponent: f64) -> f64 {
    let grid = field.grid();
    field
        .values()
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| pow_abs(*v, exponent) * w)
        .sum()
}

/// `Σ |F|^q` over faces with face quadrature weights.
pub fn integrate_face_power(face: &FaceField, exponent: f64) -> f64 {
    let grid = face.grid();
    grid.face_nodes(face.axis())
        .map(|f| pow_abs(face.get(f), exponent) * grid.face_weight(face.axis(), f))
        .sum()
}

#[inline]
pub(crate) fn pow_abs(v: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else if q == 1.0 {
        v.abs()
    } else if q == 2.0 {
        v * v
    } else {
        v.abs().powf(q)
    }
}

/// Space-time integral `∬ |u|^q` with trapezoid weights in space and time.
pub fn integrate_series_power(series: &TimeSeries, exponent: f64) -> f64 {
    series
        .frames()
        .iter()
        .zip(series.time_weights())
        .map(|(f, w)| integrate_power(f, exponent) * w)
        .sum()
}

/// Space-time `L^q` norm.
pub fn series_lp_norm(series: &TimeSeries, q: f64) -> f64 {
    integrate_series_power(series, q).powf(1.0 / q)
}

/// Returns `(∫|u|^{p̄}, Σ_j ∫|∂_j u|^{p_j})` for a field vanishing on the boundary.
pub fn sobolev_troisi_gap(field: &ScalarField, exponents: &Exponents) -> Result<(f64, f64)> {
    let grid = field.grid();
    if exponents.dim() != grid.dim() {
        return Err(Error::Dimension("exponents and grid differ in dimension".into()));
    }
    if let Some(node) = (0..grid.len()).find(|&i| grid.is_boundary(i) && field.values()[i] != 0.0) {
        return Err(Error::NonzeroBoundary {
            node,
            value: field.values()[node],
        });
    }
    let lhs = integrate_power(field, exponents.bar().p_bar);
    let mut rhs = 0.0;
    for (j, &p) in exponents.p().iter().enumerate() {
        rhs += integrate_face_power(&face_diff_power(field, 1.0, j)?, p);
    }
    Ok((lhs, rhs))
}

/// Zero field on `grid` with the interior set by `f`.
pub fn zero_boundary_field(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> ScalarField {
    let mut field = ScalarField::from_fn(grid.clone(), 0.0, f);
    for (flat, v) in field.values_mut().iter_mut().enumerate() {
        if grid.is_boundary(flat) {
            *v = 0.0;
        }
    }
    field
}
