//! Experiment plumbing: error measures, convergence tables and sweeps.

pub mod config;
pub mod metrics;
pub mod run;
pub mod table;

pub use config::{CompareConfig, ErrorEstimator, ExperimentConfig, NormKind, Scheme};
pub use metrics::{
    convergence_rate, convergence_rate_between, discrete_l2_1d, discrete_l2_2d, exact_error_1d, exact_error_2d,
    nodal_max_error, oscillation_amplitude, total_variation, two_mesh_error_1d, two_mesh_error_2d, RateModel,
};
pub use run::{compare, compare_with, run_convergence, run_convergence_with, solve_on, Case, Computed, Meshes, Solved};
pub use table::{Comparison, ConvergenceRow, ConvergenceTable, CSV_COLUMNS};
