//! Exact solutions, error norms, convergence rates and the level driver.

mod cases;
mod driver;
mod norms;
mod rates;

pub use cases::TestCase;
pub use driver::{first_admissible_level, run_convergence, ConvergenceRow, ExperimentConfig, RhsMode, ERROR_QUAD_ORDER, STIFFNESS_QUAD_ORDER};
pub use norms::{error_norms, error_norms_with, h1_error, l2_error, ErrorNorms};
pub use rates::{dof_slope, eoc, predicted_rates, RatePrediction, H1_SLOPE_TOL, L2_SLOPE_TOL, SLOPE_WINDOW};
