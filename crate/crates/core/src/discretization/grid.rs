use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BoxDomain;

/// Tensor-product nodal grid on a box, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    boundary: Vec<bool>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    counts: Vec<usize>,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(&BoxDomain::new(spec.lower, spec.upper)?, spec.counts)
    }
}

impl From<Grid> for GridSpec {
    fn from(grid: Grid) -> Self {
        GridSpec {
            lower: grid.lower,
            upper: grid.upper,
            counts: grid.counts,
        }
    }
}

impl Grid {
    pub fn new(domain: &BoxDomain, counts: Vec<usize>) -> Result<Self> {
        let dim = domain.dim();
        if counts.len() != dim {
            return Err(Error::Dimension(format!(
                "{} node counts for a {dim}-d box",
                counts.len()
            )));
        }
        if let Some(&c) = counts.iter().find(|&&c| c < 3) {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 nodes per axis, got {c}"
            )));
        }
        let spacing: Vec<f64> = (0..dim)
            .map(|j| domain.extent(j) / (counts[j] - 1) as f64)
            .collect();
        let mut strides = vec![1usize; dim];
        for j in (0..dim.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * counts[j + 1];
        }
        let len: usize = counts.iter().product();
        let mut boundary = vec![false; len];
        let mut weights = vec![0.0; len];
        let cell: f64 = spacing.iter().product();
        let mut idx = vec![0usize; dim];
        for flat in 0..len {
            let mut w = cell;
            let mut on_boundary = false;
            for j in 0..dim {
                idx[j] = (flat / strides[j]) % counts[j];
                if idx[j] == 0 || idx[j] == counts[j] - 1 {
                    on_boundary = true;
                    w *= 0.5;
                }
            }
            boundary[flat] = on_boundary;
            weights[flat] = w;
        }
        Ok(Self {
            lower: domain.lower().to_vec(),
            upper: domain.upper().to_vec(),
            counts,
            spacing,
            strides,
            boundary,
            weights,
        })
    }

    pub fn domain(&self) -> BoxDomain {
        BoxDomain::new(self.lower.clone(), self.upper.clone()).expect("grid box is valid")
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Index of `flat` along `axis`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.counts[axis]
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.counts[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.spacing[axis]
        }
    }

    /// Writes the coordinates of node `flat` into `out`.
    pub fn point_into(&self, flat: usize, out: &mut [f64]) {
        for (j, slot) in out.iter_mut().enumerate().take(self.dim()) {
            *slot = self.coord(j, self.axis_index(flat, j));
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.point_into(flat, &mut out);
        out
    }

    /// Midpoint of the face between `flat` and its successor along `axis`.
    pub fn face_point_into(&self, axis: usize, lower_node: usize, out: &mut [f64]) {
        self.point_into(lower_node, out);
        out[axis] += 0.5 * self.spacing[axis];
    }

    #[inline]
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.boundary[flat]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Trapezoid quadrature weight of node `flat`.
    #[inline]
    pub fn weight(&self, flat: usize) -> f64 {
        self.weights[flat]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.upper[j] - self.lower[j]).product()
    }

    /// True when `flat` has a successor along `axis`, i.e. it is the lower node of a face.
    #[inline]
    pub fn has_face(&self, flat: usize, axis: usize) -> bool {
        self.axis_index(flat, axis) + 1 < self.counts[axis]
    }

    /// Lower nodes of every face along `axis`.
    pub fn face_nodes(&self, axis: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&flat| self.has_face(flat, axis))
    }

    /// Quadrature weight of a face: `h_axis` times the trapezoid weights of the other axes.
    pub fn face_weight(&self, axis: usize, lower_node: usize) -> f64 {
        let mut w = self.spacing[axis];
        for j in 0..self.dim() {
            if j == axis {
                continue;
            }
            let i = self.axis_index(lower_node, j);
            w *= self.spacing[j];
            if i == 0 || i + 1 == self.counts[j] {
                w *= 0.5;
            }
        }
        w
    }

    pub fn interior_count(&self) -> usize {
        self.counts.iter().map(|c| c - 2).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_weights() {
        let grid = Grid::new(&BoxDomain::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(), vec![3, 5]).unwrap();
        assert_eq!(grid.len(), 15);
        assert_eq!(grid.strides(), &[5, 1]);
        assert_eq!(grid.spacing(), &[0.5, 0.5]);
        assert_eq!(grid.point(7), vec![0.5, 1.0]);
        assert!(!grid.is_boundary(7));
        assert!(grid.is_boundary(5));
        assert_eq!(grid.interior_count(), 3);
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for axis in 0..2 {
            let faces: f64 = grid.face_nodes(axis).map(|f| grid.face_weight(axis, f)).sum();
            assert!((faces - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(Grid::new(&BoxDomain::unit(2), vec![3, 2]).is_err());
        assert!(Grid::new(&BoxDomain::unit(2), vec![3]).is_err());
    }
}
