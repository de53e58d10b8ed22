//! Experiment configuration, Monte-Carlo NMSE sweeps, and step-size grid
//! search.

mod config;
mod grid;
mod sweep;

pub use config::{
    auto_beta0, AlsSettings, ChannelMode, EstimatorKind, ExperimentConfig,
};
pub use grid::{grid_search_beta, GridCell, GridResult};
pub use sweep::{run_sweep, sweep_csv_string, write_sweep_csv, SweepReport, SweepRow};
