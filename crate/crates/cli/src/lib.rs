//! Experiment harness around `helmsrc-core`: configuration files, synthetic
//! boundary data, reconstruction pipelines and CSV/JSON/SVG export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod export;
pub mod plot;
pub mod synth;

pub use config::{load_config, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiments::{
    run_adjoint, run_eigen_experiment, run_forward, run_nonradiating_demo, run_reconstruction,
    run_table1, RunReport,
};
pub use synth::generate_synthetic_data;
