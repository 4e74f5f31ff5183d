//! Experiment runner: order sequences, orbit streaming, empirical measures
//! against Haar measure, closed-form cross-checks and deterministic CSV.

mod config;
mod run;

pub use config::{generate_orders, BallSpec, ExperimentConfig, OrderSpec, CONFIG_KEYS};
pub use run::{
    ball_counts, base_point, decimal, discrepancy, run_experiment, run_to_string, write_csv,
    ResultRow, CSV_HEADER, DECIMAL_DIGITS,
};
