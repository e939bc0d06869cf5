use std::io;

use thiserror::Error;

use crate::solver::StepFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p[{axis}] = {value} must exceed 1")]
    InvalidGrowthExponent { axis: usize, value: f64 },

    #[error("exponent m[{axis}] = {value} must be at least 1")]
    InvalidPowerExponent { axis: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative value {value} at node {node} with fractional exponent {exponent}")]
    NegativeValue { node: usize, value: f64, exponent: f64 },

    #[error("field does not vanish on the boundary (node {node}, value {value})")]
    NonzeroBoundary { node: usize, value: f64 },

    #[error("grids do not match")]
    GridMismatch,

    #[error("De Giorgi exponent is not positive (delta = {delta}); sigma must exceed 1 + N/p_bar = {bound}")]
    NonPositiveDelta { delta: f64, bound: f64 },

    #[error("manufactured solution is not positive at x = {x:?}, t = {t} (value {value})")]
    NonPositiveExact { x: Vec<f64>, t: f64, value: f64 },

    #[error("time step {step} failed: {failure}")]
    StepFailed { step: usize, failure: Box<StepFailure> },

    #[error("closeness condition fails on axis {axis}: m_j = {m_j} >= p_j' * m = {bound}")]
    ClosenessViolated { axis: usize, m_j: f64, bound: f64 },

    #[error("checkpoint format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
