//! Truncated solves over an increasing list of levels `k`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Mode, SolverConfig};
use super::step::{solve_problem, SolveReport};
use crate::analysis::vpm_distance;
use crate::discretization::{Grid, TimeSeries};
use crate::error::{Error, Result};
use crate::model::ProblemSpec;

/// First cascade member whose solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeFailure {
    pub k: u32,
    pub message: String,
}

/// Members `u_k` of the cascade and the diagnostics between consecutive ones.
///
/// When a member fails, the result holds the members before it and
/// `failure` is set.
#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub ks: Vec<u32>,
    pub series: Vec<TimeSeries>,
    pub reports: Vec<SolveReport>,
    /// `max (u_{k'} − u_k)₊` over space-time for consecutive `k < k'`.
    pub ordering_gaps: Vec<f64>,
    /// `d(u_k, u_{k'})` in the `V^{p,m}` metric for consecutive pairs.
    pub distances: Vec<f64>,
    pub ordering_tol: f64,
    pub failure: Option<CascadeFailure>,
}

impl CascadeResult {
    /// Largest completed `k`, used as the limit proxy.
    pub fn limit(&self) -> Option<&TimeSeries> {
        self.series.last()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn max_ordering_gap(&self) -> f64 {
        self.ordering_gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn ordered(&self) -> bool {
        self.max_ordering_gap() <= self.ordering_tol
    }
}

/// Positive part of `upper - lower`, maximized over all nodes and times.
pub fn max_positive_gap(lower: &TimeSeries, upper: &TimeSeries) -> f64 {
    lower
        .frames()
        .iter()
        .zip(upper.frames())
        .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| y - x))
        .fold(0.0, f64::max)
}

pub fn regularization_cascade(
    spec: &ProblemSpec,
    grid: Arc<Grid>,
    config: &SolverConfig,
    ks: &[u32],
) -> Result<CascadeResult> {
    if let Some(axis) = spec.exponents.closeness_violation() {
        let m = spec.exponents.m_min();
        return Err(Error::ClosenessViolated {
            axis,
            m_j: spec.exponents.m()[axis],
            bound: spec.exponents.conjugate(axis) * m,
        });
    }
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] == 0 {
        return Err(Error::InvalidParameter(format!(
            "cascade levels must be positive and strictly increasing, got {ks:?}"
        )));
    }
    let outcomes: Vec<Result<(TimeSeries, SolveReport)>> = ks
        .par_iter()
        .map(|&k| solve_problem(spec, grid.clone(), &config.clone().with_mode(Mode::Truncated(k))))
        .collect();

    let mut series = Vec::new();
    let mut reports = Vec::new();
    let mut failure = None;
    for (&k, outcome) in ks.iter().zip(outcomes) {
        match outcome {
            Ok((s, r)) => {
                series.push(s);
                reports.push(r);
            }
            Err(e) => {
                failure = Some(CascadeFailure { k, message: e.to_string() });
                break;
            }
        }
    }
    let ordering_gaps = series.windows(2).map(|w| max_positive_gap(&w[0], &w[1])).collect();
    let distances = series
        .windows(2)
        .map(|w| vpm_distance(&w[0], &w[1], &spec.exponents))
        .collect::<Result<Vec<_>>>()?;
    Ok(CascadeResult {
        ks: ks[..series.len()].to_vec(),
        series,
        reports,
        ordering_gaps,
        distances,
        ordering_tol: config.ordering_tol(spec.horizon),
        failure,
    })
}
