use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which discrete problem a solve targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Doubly nonlinear form: fluxes act on differences of `u^{m_j}`.
    Direct,
    /// Regularized problem with truncation level `k` and data shifted by `1/k`.
    Truncated(u32),
}

impl Mode {
    /// Data shift `1/k`, zero in direct mode.
    pub fn shift(self) -> f64 {
        match self {
            Mode::Direct => 0.0,
            Mode::Truncated(k) => 1.0 / f64::from(k),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Direct => write!(f, "direct"),
            Mode::Truncated(k) => write!(f, "k={k}"),
        }
    }
}

/// Starting iterate of each Newton solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// The previous time level with the new boundary values.
    Previous,
    /// Previous level plus `amplitude * Π sin` on the interior.
    Perturbed { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    /// Sup-norm tolerance on the Δt-scaled residual.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Initial step length of the damped Newton update, in `(0, 1]`.
    pub damping: f64,
    /// Jacobian-only flux regularization; `None` picks `1e-8 * data scale`.
    pub eps_reg: Option<f64>,
    pub picard_fallback: bool,
    pub mode: Mode,
    pub initial_guess: InitialGuess,
}

impl SolverConfig {
    pub fn new(dt: f64, mode: Mode) -> Self {
        Self {
            dt,
            newton_tol: 1e-10,
            newton_max: 50,
            damping: 1.0,
            eps_reg: None,
            picard_fallback: true,
            mode,
            initial_guess: InitialGuess::Previous,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParameter("newton_tol must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping {} outside (0, 1]",
                self.damping
            )));
        }
        if self.newton_max == 0 {
            return Err(Error::InvalidParameter("newton_max must be positive".into()));
        }
        if let Mode::Truncated(0) = self.mode {
            return Err(Error::InvalidParameter("truncation level k must be at least 1".into()));
        }
        if matches!(self.eps_reg, Some(e) if e < 0.0) {
            return Err(Error::InvalidParameter("eps_reg must be nonnegative".into()));
        }
        Ok(())
    }

    /// Number of steps covering `[0, horizon]`; the step is shrunk to fit.
    pub fn steps_for(&self, horizon: f64) -> usize {
        ((horizon / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Ordering tolerance `newton_tol (1 + T/Δt)` for comparison checks.
    pub fn ordering_tol(&self, horizon: f64) -> f64 {
        self.newton_tol * (1.0 + horizon / self.dt)
    }
}
