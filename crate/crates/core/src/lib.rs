//! Implicit solver and verification tools for anisotropic doubly nonlinear
//! parabolic equations
//!
//! `∂ₜu − Σⱼ ∂ⱼ(aⱼ(x,t,u) |∂ⱼu^{mⱼ}|^{pⱼ−2} ∂ⱼu^{mⱼ}) = f`
//!
//! on a box with Dirichlet data, together with the truncated problems whose
//! solutions `u_k` decrease to it.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod discretization;
mod error;
pub mod model;
pub mod presets;
pub mod solver;

pub use error::{Error, Result};
