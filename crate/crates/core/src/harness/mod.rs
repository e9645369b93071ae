//! Seeded multi-trial experiments: configuration, execution, aggregation
//! and CSV output.

pub mod config;
pub mod output;
pub mod run;
pub mod summary;

pub use config::{DatasetConfig, Dims, ExperimentConfig, OracleParams, RidgeParams, Scenario, ThetaSource};
pub use output::{
    read_records, read_records_file, read_summary, read_summary_file, write_bounds, write_bounds_file,
    write_records, write_records_file, write_summary, write_summary_file, BoundRow,
};
pub use run::{algorithms, bound_curve, run_trial, subset_sweep, Algorithm, AlgorithmSpec, Experiment, World};
pub use summary::{aggregate, final_rows, lookup, mean_stderr, RegretRecord, SummaryRow};
