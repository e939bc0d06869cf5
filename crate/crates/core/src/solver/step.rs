//! Backward-Euler step with a damped Newton solve and Picard fallback.
//!
//! Residual at an interior node (scaled by Δt):
//!
//! `R_i = u_i - u_i^n - Δt (Σ_j (F_{j,i+½} - F_{j,i-½}) / h_j + f_i(t^{n+1}))`
//!
//! with face flux `F = c(x_f, t, ū) |D|^{p_j-2} D`, `ū` the mean of the two
//! nodal values, and `D` the face difference of `u` (truncated mode, with
//! `c = â^k_j`) or of `u^{m_j}` (direct mode, with `c = a_j`). Boundary rows
//! pin the Dirichlet value.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::banded::BandMatrix;
use super::config::{InitialGuess, Mode, SolverConfig};
use crate::discretization::{Grid, ScalarField, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{signed_power, truncated_coefficient, truncated_coefficient_du, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub newton_iterations: usize,
    pub picard_iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub picard_used: bool,
    /// Direct mode only: some Newton iterate went negative and was clamped.
    pub clamped: bool,
}

impl StepReport {
    pub fn iterations(&self) -> usize {
        self.newton_iterations + self.picard_iterations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub time: f64,
    pub residual_history: Vec<f64>,
    pub picard_used: bool,
    pub reason: String,
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at t = {} after {} iterations (last residual {:.3e}, picard {})",
            self.reason,
            self.time,
            self.residual_history.len().saturating_sub(1),
            self.residual_history.last().copied().unwrap_or(f64::NAN),
            self.picard_used
        )
    }
}

impl std::error::Error for StepFailure {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub steps: Vec<StepReport>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(StepReport::iterations).sum()
    }

    pub fn max_final_residual(&self) -> f64 {
        self.steps.iter().map(|s| s.final_residual).fold(0.0, f64::max)
    }

    pub fn fallback_events(&self) -> usize {
        self.steps.iter().filter(|s| s.picard_used).count()
    }

    pub fn clamp_events(&self) -> usize {
        self.steps.iter().filter(|s| s.clamped).count()
    }
}

/// Precomputed face geometry of a grid.
struct Faces {
    dim: usize,
    axis: Vec<usize>,
    lower: Vec<usize>,
    upper: Vec<usize>,
    points: Vec<f64>,
}

impl Faces {
    fn new(grid: &Grid) -> Self {
        let dim = grid.dim();
        let mut faces = Faces {
            dim,
            axis: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            points: Vec::new(),
        };
        let mut x = vec![0.0; dim];
        for axis in 0..dim {
            let stride = grid.strides()[axis];
            for flat in grid.face_nodes(axis) {
                // faces between two boundary nodes never enter an interior row
                if grid.is_boundary(flat) && grid.is_boundary(flat + stride) {
                    continue;
                }
                grid.face_point_into(axis, flat, &mut x);
                faces.axis.push(axis);
                faces.lower.push(flat);
                faces.upper.push(flat + stride);
                faces.points.extend_from_slice(&x);
            }
        }
        faces
    }

    fn len(&self) -> usize {
        self.axis.len()
    }

    fn point(&self, f: usize) -> &[f64] {
        &self.points[f * self.dim..(f + 1) * self.dim]
    }
}

/// Discrete operator for one time step.
struct StepOperator<'a> {
    spec: &'a ProblemSpec,
    grid: &'a Grid,
    faces: &'a Faces,
    mode: Mode,
    t: f64,
    dt: f64,
    eps_reg: f64,
    prev: &'a [f64],
    source: Vec<f64>,
    boundary: Vec<f64>,
}

impl StepOperator<'_> {
    fn power(&self, axis: usize, u: f64) -> (f64, f64) {
        match self.mode {
            Mode::Truncated(_) => (u, 1.0),
            Mode::Direct => {
                let m = self.spec.exponents.m()[axis];
                if m == 1.0 {
                    (u, 1.0)
                } else {
                    let u = u.max(0.0);
                    (u.powf(m), m * u.powf(m - 1.0))
                }
            }
        }
    }

    fn coefficient(&self, axis: usize, x: &[f64], u: f64) -> f64 {
        match self.mode {
            Mode::Truncated(k) => truncated_coefficient(self.spec, k, axis, x, self.t, u),
            Mode::Direct => self.spec.coefficients.coeffs[axis].eval(x, self.t, u),
        }
    }

    fn coefficient_du(&self, axis: usize, x: &[f64], u: f64) -> f64 {
        match self.mode {
            Mode::Truncated(k) => truncated_coefficient_du(self.spec, k, axis, x, self.t, u),
            Mode::Direct => self.spec.coefficients.coeffs[axis].du(x, self.t, u),
        }
    }

    fn residual(&self, u: &[f64], out: &mut [f64]) -> f64 {
        let grid = self.grid;
        for i in 0..u.len() {
            out[i] = if grid.is_boundary(i) {
                u[i] - self.boundary[i]
            } else {
                u[i] - self.prev[i] - self.dt * self.source[i]
            };
        }
        for f in 0..self.faces.len() {
            let axis = self.faces.axis[f];
            let (a, b) = (self.faces.lower[f], self.faces.upper[f]);
            let h = grid.spacing()[axis];
            let p = self.spec.exponents.p()[axis];
            let x = self.faces.point(f);
            let (wa, _) = self.power(axis, u[a]);
            let (wb, _) = self.power(axis, u[b]);
            let d = (wb - wa) / h;
            let flux = self.coefficient(axis, x, 0.5 * (u[a] + u[b])) * signed_power(d, p);
            let scaled = self.dt * flux / h;
            if !grid.is_boundary(a) {
                out[a] -= scaled;
            }
            if !grid.is_boundary(b) {
                out[b] += scaled;
            }
        }
        sup_norm(out)
    }

    /// Newton Jacobian, or the lagged-coefficient Picard matrix when `picard`.
    fn jacobian(&self, u: &[f64], picard: bool, mat: &mut BandMatrix) {
        mat.clear();
        let grid = self.grid;
        for i in 0..u.len() {
            mat.add(i, i, 1.0);
        }
        let eps2 = self.eps_reg * self.eps_reg;
        for f in 0..self.faces.len() {
            let axis = self.faces.axis[f];
            let (a, b) = (self.faces.lower[f], self.faces.upper[f]);
            let h = grid.spacing()[axis];
            let p = self.spec.exponents.p()[axis];
            let x = self.faces.point(f);
            let (wa, dwa) = self.power(axis, u[a]);
            let (wb, dwb) = self.power(axis, u[b]);
            let d = (wb - wa) / h;
            let ubar = 0.5 * (u[a] + u[b]);
            let c = self.coefficient(axis, x, ubar);
            let secant = if p == 2.0 { 1.0 } else { (d * d + eps2).powf(0.5 * (p - 2.0)) };
            let (slope, dc_term) = if picard {
                (secant, 0.0)
            } else {
                let dc = self.coefficient_du(axis, x, ubar);
                ((p - 1.0) * secant, 0.5 * dc * signed_power(d, p))
            };
            let dfa = dc_term - c * slope * dwa / h;
            let dfb = dc_term + c * slope * dwb / h;
            let s = self.dt / h;
            if !grid.is_boundary(a) {
                mat.add(a, a, -s * dfa);
                mat.add(a, b, -s * dfb);
            }
            if !grid.is_boundary(b) {
                mat.add(b, a, s * dfa);
                mat.add(b, b, s * dfb);
            }
        }
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| {
        if x.is_nan() {
            f64::NAN
        } else {
            acc.max(x.abs())
        }
    })
}

/// Reusable per-grid state for a sequence of steps.
pub struct Stepper<'a> {
    spec: &'a ProblemSpec,
    grid: Arc<Grid>,
    faces: Faces,
    config: SolverConfig,
    eps_reg: f64,
}

const STALL_WINDOW: usize = 5;
const STALL_REDUCTION: f64 = 0.9;
const MAX_BACKTRACKS: usize = 30;

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a ProblemSpec, grid: Arc<Grid>, config: &SolverConfig, data_scale: f64) -> Result<Self> {
        config.validate()?;
        if grid.dim() != spec.dim() {
            return Err(Error::Dimension("grid and problem differ in dimension".into()));
        }
        let min_extent = (0..spec.dim())
            .map(|j| spec.domain.extent(j))
            .fold(f64::INFINITY, f64::min);
        let eps_reg = config.eps_reg.unwrap_or(1e-8 * data_scale / min_extent);
        Ok(Self {
            spec,
            faces: Faces::new(&grid),
            grid,
            config: config.clone(),
            eps_reg,
        })
    }

    pub fn eps_reg(&self) -> f64 {
        self.eps_reg
    }

    fn initial_iterate(&self, prev: &[f64], boundary: &[f64]) -> Vec<f64> {
        let grid = &self.grid;
        let mut u: Vec<f64> = prev.to_vec();
        let mut x = vec![0.0; grid.dim()];
        for (i, v) in u.iter_mut().enumerate() {
            if grid.is_boundary(i) {
                *v = boundary[i];
            } else if let InitialGuess::Perturbed { amplitude } = self.config.initial_guess {
                grid.point_into(i, &mut x);
                let bump: f64 = (0..grid.dim())
                    .map(|j| {
                        (std::f64::consts::PI * (x[j] - grid.lower()[j])
                            / (grid.upper()[j] - grid.lower()[j]))
                            .sin()
                    })
                    .product();
                *v += amplitude * bump;
            }
        }
        if self.config.mode == Mode::Direct {
            u.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        u
    }

    /// Advances `prev` to `t_next`.
    pub fn step(&self, prev: &ScalarField, t_next: f64, index: usize) -> Result<(ScalarField, StepReport), StepFailure> {
        let grid = &self.grid;
        let spec = self.spec;
        let cfg = &self.config;
        let dt = t_next - prev.time();
        let shift = cfg.mode.shift();
        let mut x = vec![0.0; grid.dim()];
        let mut source = vec![0.0; grid.len()];
        let mut boundary = vec![0.0; grid.len()];
        for i in 0..grid.len() {
            grid.point_into(i, &mut x);
            if grid.is_boundary(i) {
                boundary[i] = spec.boundary.eval(&x, t_next, 0.0) + shift;
            } else {
                source[i] = spec.source.eval(&x, t_next, 0.0);
            }
        }
        let op = StepOperator {
            spec,
            grid,
            faces: &self.faces,
            mode: cfg.mode,
            t: t_next,
            dt,
            eps_reg: self.eps_reg,
            prev: prev.values(),
            source,
            boundary,
        };
        let fail = |history: Vec<f64>, picard_used: bool, reason: &str| StepFailure {
            time: t_next,
            residual_history: history,
            picard_used,
            reason: reason.to_string(),
        };

        let n = grid.len();
        let band = grid.strides()[0];
        let mut u = self.initial_iterate(prev.values(), &op.boundary);
        let mut r = vec![0.0; n];
        let mut trial_r = vec![0.0; n];
        let mut norm = op.residual(&u, &mut r);
        let mut history = vec![norm];
        let mut picard = false;
        let mut newton_iters = 0usize;
        let mut picard_iters = 0usize;
        let mut clamped = false;
        let mut mat = BandMatrix::zeros(n, band, band);
        let picard_budget = if cfg.picard_fallback { cfg.newton_max } else { 0 };

        while !(norm <= cfg.newton_tol) {
            if !norm.is_finite() {
                return Err(fail(history, picard, "non-finite residual"));
            }
            if !picard {
                let k = history.len() - 1;
                let stalled = k >= STALL_WINDOW && norm > STALL_REDUCTION * history[k - STALL_WINDOW];
                if stalled || newton_iters >= cfg.newton_max {
                    if picard_budget == 0 {
                        return Err(fail(history, false, "newton did not converge"));
                    }
                    picard = true;
                }
            } else if picard_iters >= picard_budget {
                return Err(fail(history, true, "newton and picard fallback did not converge"));
            }

            op.jacobian(&u, picard, &mut mat);
            let lu = match mat.clone().factorize() {
                Ok(lu) => lu,
                Err(sp) => {
                    return Err(fail(history, picard, &format!("singular linearization at column {}", sp.column)))
                }
            };
            let mut delta: Vec<f64> = r.iter().map(|v| -v).collect();
            lu.solve_in_place(&mut delta);

            let mut lambda = cfg.damping;
            let mut best: Option<(f64, Vec<f64>, bool)> = None;
            for _ in 0..MAX_BACKTRACKS {
                let mut trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
                let mut trial_clamped = false;
                if cfg.mode == Mode::Direct {
                    for v in trial.iter_mut() {
                        if *v < 0.0 {
                            *v = 0.0;
                            trial_clamped = true;
                        }
                    }
                }
                let trial_norm = op.residual(&trial, &mut trial_r);
                let improves = trial_norm < (1.0 - 1e-4 * lambda) * norm;
                if best.as_ref().is_none_or(|(b, _, _)| trial_norm < *b) {
                    best = Some((trial_norm, trial, trial_clamped));
                }
                if improves {
                    break;
                }
                lambda *= 0.5;
            }
            let (best_norm, best_u, best_clamped) = best.expect("at least one trial");
            u = best_u;
            clamped |= best_clamped;
            norm = op.residual(&u, &mut r);
            debug_assert!((norm - best_norm).abs() <= 1e-12 * (1.0 + norm) || norm.is_nan());
            history.push(norm);
            if picard {
                picard_iters += 1;
            } else {
                newton_iters += 1;
            }
        }

        if cfg.mode == Mode::Direct && u.iter().any(|&v| v < -cfg.newton_tol) {
            return Err(fail(history, picard, "converged state is negative"));
        }
        let field = ScalarField::new(grid.clone(), u, t_next)
            .map_err(|e| fail(history.clone(), picard, &e.to_string()))?;
        let report = StepReport {
            step: index,
            time: t_next,
            newton_iterations: newton_iters,
            picard_iterations: picard_iters,
            final_residual: norm,
            residual_history: history,
            picard_used: picard,
            clamped,
        };
        Ok((field, report))
    }
}

/// Largest nodal magnitude of the initial and boundary data, plus one.
fn data_scale(spec: &ProblemSpec, grid: &Grid) -> f64 {
    let mut x = vec![0.0; grid.dim()];
    let mut scale: f64 = 0.0;
    for i in 0..grid.len() {
        grid.point_into(i, &mut x);
        scale = scale
            .max(spec.initial.eval(&x, 0.0, 0.0).abs())
            .max(spec.boundary.eval(&x, 0.0, 0.0).abs());
    }
    scale + 1.0
}

/// One backward-Euler step from `prev` (at `prev.time()`) to `t_next`.
pub fn implicit_step(
    prev: &ScalarField,
    t_next: f64,
    spec: &ProblemSpec,
    config: &SolverConfig,
) -> Result<(ScalarField, StepReport)> {
    let grid = prev.grid().clone();
    let scale = prev.values().iter().fold(0.0f64, |a, v| a.max(v.abs())) + 1.0;
    let stepper = Stepper::new(spec, grid, config, scale)?;
    stepper
        .step(prev, t_next, 0)
        .map_err(|failure| Error::StepFailed { step: 0, failure: Box::new(failure) })
}

/// Initial field: `u0` in the interior, `g(·, 0)` on the boundary, both shifted by `1/k`.
pub fn initial_field(spec: &ProblemSpec, grid: Arc<Grid>, mode: Mode) -> ScalarField {
    let shift = mode.shift();
    let mut x = vec![0.0; grid.dim()];
    let values = (0..grid.len())
        .map(|i| {
            grid.point_into(i, &mut x);
            let v = if grid.is_boundary(i) {
                spec.boundary.eval(&x, 0.0, 0.0)
            } else {
                spec.initial.eval(&x, 0.0, 0.0)
            };
            v + shift
        })
        .collect();
    ScalarField::new(grid, values, 0.0).expect("finite initial data")
}

/// Solves on `[0, T]`; fails with the index of the first failing step.
pub fn solve_problem(spec: &ProblemSpec, grid: Arc<Grid>, config: &SolverConfig) -> Result<(TimeSeries, SolveReport)> {
    let start = Instant::now();
    let stepper = Stepper::new(spec, grid.clone(), config, data_scale(spec, &grid))?;
    let steps = config.steps_for(spec.horizon);
    let dt = spec.horizon / steps as f64;
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(initial_field(spec, grid.clone(), config.mode));
    let mut reports = Vec::with_capacity(steps);
    for n in 0..steps {
        let t_next = if n + 1 == steps { spec.horizon } else { (n + 1) as f64 * dt };
        let (next, report) = stepper
            .step(frames.last().expect("nonempty"), t_next, n)
            .map_err(|failure| Error::StepFailed { step: n, failure: Box::new(failure) })?;
        frames.push(next);
        reports.push(report);
    }
    Ok((
        TimeSeries::from_frames_unchecked(grid, frames),
        SolveReport {
            mode: config.mode,
            steps: reports,
            wall_time: start.elapsed(),
        },
    ))
}
