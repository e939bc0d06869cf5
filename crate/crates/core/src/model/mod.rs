//! Continuous problem description: exponents, data, and diffusion fields.

mod admissibility;
mod exponents;
mod expr;
mod flux;
mod problem;

pub use admissibility::{check_admissibility, AdmissibilityReport, ConditionCheck, SIGMA_BOUNDARY_RTOL};
pub use exponents::{compute_bar_exponents, BarExponents, Exponents, SobolevConjugate};
pub use expr::{Evaluator, Expr, Point};
pub use flux::{
    coercivity_constant, eval_flux, eval_flux_truncated, growth_constant, signed_power, truncate,
    truncate_slope, truncated_coefficient, truncated_coefficient_du, truncated_lipschitz,
};
pub use problem::{BoxDomain, CoefficientSpec, ProblemSpec};
