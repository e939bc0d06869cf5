//! Implicit time stepping for the direct and truncated discrete problems.

mod banded;
mod cascade;
mod config;
mod manufactured;
mod step;

pub use banded::{BandLu, BandMatrix, SingularPivot};
pub use cascade::{max_positive_gap, regularization_cascade, CascadeFailure, CascadeResult};
pub use config::{InitialGuess, Mode, SolverConfig};
pub use manufactured::manufactured_rhs;
pub use step::{implicit_step, initial_field, solve_problem, SolveReport, StepFailure, StepReport, Stepper};
