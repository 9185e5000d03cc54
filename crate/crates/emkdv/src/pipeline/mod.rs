//! Configuration, orchestration, and deterministic export.

pub mod config;
pub mod export;
pub mod run;

pub use config::ExperimentConfig;
pub use run::{
    run_asymptote, run_compare, run_painleve, run_phase, run_scatter, run_simulate, ComparisonRecord,
    PipelineReport,
};
