use serde::{Deserialize, Serialize};

use super::expr::Evaluator;
use super::exponents::{BarExponents, Exponents};
use crate::error::{Error, Result};

/// Axis-aligned box `Π_j [lower_j, upper_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Dimension("box bounds differ in length".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidParameter(format!(
                "degenerate box {lower:?} .. {upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.extent(j)).product()
    }
}

/// Diffusion coefficients `a_j(x, t, u)` with their audited structural bounds.
#[derive(Debug, Clone)]
pub struct CoefficientSpec {
    pub coeffs: Vec<Evaluator>,
    /// Ellipticity band: `Λ⁻¹ ≤ a_j ≤ Λ`.
    pub lambda: f64,
    /// Lipschitz constant of each `a_j` in `u`.
    pub lipschitz: f64,
}

/// Full continuous Cauchy–Dirichlet problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: BoxDomain,
    pub horizon: f64,
    pub exponents: Exponents,
    pub coefficients: CoefficientSpec,
    /// Source `f(x, t) ≥ 0`.
    pub source: Evaluator,
    /// Lateral boundary values `g(x, t)`.
    pub boundary: Evaluator,
    /// Initial values `u0(x)`.
    pub initial: Evaluator,
    /// Integrability exponent of the source.
    pub sigma: f64,
    /// Lower bound of `g`; zero means `g ≡ 0`.
    pub eps0: f64,
}

impl ProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        domain: BoxDomain,
        horizon: f64,
        exponents: Exponents,
        coefficients: CoefficientSpec,
        source: Evaluator,
        boundary: Evaluator,
        initial: Evaluator,
        sigma: f64,
        eps0: f64,
    ) -> Result<Self> {
        let n = exponents.dim();
        if domain.dim() != n || coefficients.coeffs.len() != n {
            return Err(Error::Dimension(format!(
                "box is {}-d, exponents {}-d, {} coefficients",
                domain.dim(),
                n,
                coefficients.coeffs.len()
            )));
        }
        if !(horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
        }
        if !(coefficients.lambda > 0.0) || coefficients.lipschitz < 0.0 {
            return Err(Error::InvalidParameter(
                "lambda must be positive and the Lipschitz constant nonnegative".into(),
            ));
        }
        if eps0 < 0.0 {
            return Err(Error::InvalidParameter("eps0 must be nonnegative".into()));
        }
        Ok(Self {
            domain,
            horizon,
            exponents,
            coefficients,
            source,
            boundary,
            initial,
            sigma,
            eps0,
        })
    }

    pub fn dim(&self) -> usize {
        self.exponents.dim()
    }

    pub fn bar(&self) -> BarExponents {
        self.exponents.bar()
    }

    /// The lower bound `1 + N/p̄` on `σ`.
    pub fn sigma_bound(&self) -> f64 {
        1.0 + self.dim() as f64 / self.bar().p_bar
    }

    pub fn with_source(mut self, source: Evaluator) -> Self {
        self.source = source;
        self
    }

    pub fn with_boundary(mut self, boundary: Evaluator, eps0: f64) -> Self {
        self.boundary = boundary;
        self.eps0 = eps0;
        self
    }

    pub fn with_initial(mut self, initial: Evaluator) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}
