//! Algebraic inequalities, cutoffs, time mollifiers, and the measured
//! quantities behind the boundedness, energy, and comparison arguments.

mod algebra;
mod comparison;
mod cutoffs;
mod degiorgi;
mod energy;
mod mollifiers;
mod norms;

pub use algebra::{
    b_quantity, b_reference, b_sandwich_constant, calibrate_b_sandwich, calibrate_power_inequality,
    power_inequality_constant, Calibration, CALIBRATION_PADDING,
};
pub use comparison::{comparison_check, ComparisonReport};
pub use cutoffs::{g_delta, h_delta, trapezoid};
pub use degiorgi::{
    degiorgi_constants, dg_delta, dg_q_exponent, fast_geometric_iterate, fit_envelope, level,
    level_recursion_ratio, m_star, measure_levels, select_q, source_integral, DeGiorgiReport, Envelope,
    GeometricIteration, LevelMeasurements, QChoice,
};
pub use energy::{energy_check, EnergyReport};
pub use mollifiers::{exp_mollify, exp_mollify_at, interpolate, steklov, steklov_at};
pub use norms::{
    calibrate_troisi, gradient_power_norms, q_star, random_zero_boundary_field, troisi_ratio_over_scales,
    l2_error, vpm_distance, L2Error, TroisiCalibration,
};

/// Version tag of every JSON report.
pub const REPORT_SCHEMA: &str = "anisodnl-report/1";
