use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::model::Evaluator;

/// Nodal values on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    time: f64,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value {} at node {node}",
                values[node]
            )));
        }
        Ok(Self { grid, values, time })
    }

    pub fn constant(grid: Arc<Grid>, value: f64, time: f64) -> Self {
        let len = grid.len();
        Self {
            grid,
            values: vec![value; len],
            time,
        }
    }

    /// Samples `f(x, t, 0)` at every node.
    pub fn sample(grid: Arc<Grid>, time: f64, f: &Evaluator) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.point_into(flat, &mut x);
                f.eval(&x, time, 0.0)
            })
            .collect();
        Self { grid, values, time }
    }

    pub fn from_fn(grid: Arc<Grid>, time: f64, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.point_into(flat, &mut x);
                f(&x)
            })
            .collect();
        Self { grid, values, time }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            time: self.time,
        }
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        same_grid(&self.grid, &other.grid)
    }
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Values on the faces normal to one axis, stored at the face's lower node.
/// Slots of nodes without a successor along the axis hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    grid: Arc<Grid>,
    axis: usize,
    values: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: Arc<Grid>, axis: usize) -> Self {
        let len = grid.len();
        Self {
            grid,
            axis,
            values: vec![0.0; len],
        }
    }

    /// Fills each face with `f(face midpoint)`.
    pub fn from_fn(grid: Arc<Grid>, axis: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = Self::zeros(grid.clone(), axis);
        let mut x = vec![0.0; grid.dim()];
        for flat in 0..grid.len() {
            if grid.has_face(flat, axis) {
                grid.face_point_into(axis, flat, &mut x);
                out.values[flat] = f(&x);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    /// Value of the face whose lower node is `flat`.
    #[inline]
    pub fn get(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    #[inline]
    pub fn set(&mut self, flat: usize, value: f64) {
        self.values[flat] = value;
    }

    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    /// Face values in lower-node order.
    pub fn face_values(&self) -> Vec<f64> {
        self.grid.face_nodes(self.axis).map(|f| self.values[f]).collect()
    }
}

/// Discrete space-time trajectory `t_0 = 0 < t_1 < ... < t_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: Arc<Grid>,
    frames: Vec<ScalarField>,
}

impl TimeSeries {
    pub fn new(frames: Vec<ScalarField>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty time series".into()))?;
        let grid = first.grid.clone();
        for pair in frames.windows(2) {
            if !(pair[1].time > pair[0].time) {
                return Err(Error::InvalidParameter(format!(
                    "times not strictly increasing: {} then {}",
                    pair[0].time, pair[1].time
                )));
            }
        }
        if frames.iter().any(|f| !same_grid(&f.grid, &grid)) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, frames })
    }

    pub fn from_values(grid: Arc<Grid>, times: &[f64], values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension("times and frames differ in length".into()));
        }
        let frames = times
            .iter()
            .zip(values)
            .map(|(&t, v)| ScalarField::new(grid.clone(), v, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames)
    }

    /// Samples `f(x, t)` on `grid` at every time in `times`.
    pub fn from_fn(grid: Arc<Grid>, times: &[f64], f: impl Fn(&[f64], f64) -> f64) -> Result<Self> {
        let frames = times
            .iter()
            .map(|&t| ScalarField::from_fn(grid.clone(), t, |x| f(x, t)))
            .collect();
        Self::new(frames)
    }

    pub(crate) fn from_frames_unchecked(grid: Arc<Grid>, frames: Vec<ScalarField>) -> Self {
        Self { grid, frames }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn frames(&self) -> &[ScalarField] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &ScalarField {
        &self.frames[i]
    }

    pub fn last(&self) -> &ScalarField {
        self.frames.last().expect("series is nonempty")
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time).collect()
    }

    /// Step sizes `t_{n+1} - t_n`.
    pub fn steps(&self) -> Vec<f64> {
        self.frames.windows(2).map(|w| w[1].time - w[0].time).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            frames: self.frames.iter().map(|fr| fr.map(&f)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.frames.iter().map(ScalarField::min).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.frames.iter().map(ScalarField::max).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid weights in time for the stored frames.
    pub fn time_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.times())
    }

    /// Whether `other` lives on the same grid with the same time stamps.
    pub fn compatible(&self, other: &TimeSeries) -> bool {
        same_grid(&self.grid, &other.grid)
            && self.len() == other.len()
            && self
                .frames
                .iter()
                .zip(&other.frames)
                .all(|(a, b)| (a.time - b.time).abs() <= 1e-12 * (1.0 + a.time.abs()))
    }
}

/// Trapezoid weights of a strictly increasing 1-D node set.
pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let dt = times[i + 1] - times[i];
        w[i] += 0.5 * dt;
        w[i + 1] += 0.5 * dt;
    }
    w
}
