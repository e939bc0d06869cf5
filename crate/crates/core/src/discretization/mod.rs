//! Tensor-product grid, nodal fields, and the discrete operators built on them.

mod field;
mod grid;
pub mod io;
mod ops;

pub use field::{trapezoid_weights, FaceField, ScalarField, TimeSeries};
pub use grid::Grid;
pub use ops::{
    boundary_flux_sum, divergence, face_diff_power, integrate_face_power, integrate_power,
    integrate_series_power, series_lp_norm, sobolev_troisi_gap, zero_boundary_field,
};
