//! End-to-end experiments: configuration, the estimation pipeline, result
//! files, parameter sweeps and the property suites behind `graphpsd check`.

pub mod checks;
mod config;
pub mod output;
mod run;
mod sweep;

pub use config::{ExperimentConfig, FilterSpec, GraphSource, ObjectiveSpec, SamplerSpec};
pub use output::{emit_plot_data, parse_dat, write_outputs};
pub use run::{prepare, run_experiment, ExperimentError, ExperimentResult, Prepared, StageTiming};
pub use sweep::{
    compression_sweep, rank_scan_csv, rank_scan_prepared, rank_threshold_scan, smallest_rank_ok,
    sweep_csv, RankScanRow, SweepRow,
};
