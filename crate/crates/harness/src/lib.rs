//! Experiment runner for the CSPA and Banditron learners: single trials,
//! hyperparameter sweeps, noise studies and learning-curve CSV output.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv_out;
mod error;
pub mod experiment;
pub mod sweep;
pub mod trial;

pub use csv_out::{emit_csv, parse_csv, CsvRow, TrialRecord};
pub use error::{HarnessError, Result};
pub use experiment::{presets, Algorithm, ExperimentSpec, Hyper, Source, DEFAULT_WINDOW};
pub use sweep::{mean_stddev, noise_study, sweep, sweep_on, NoiseCell, SweepRow, SweepTable};
pub use trial::{run_trial, run_trial_on, TrialMetrics};
