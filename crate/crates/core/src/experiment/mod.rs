//! Seeded parameter sweeps, overlap metrics and result emission.

mod config;
mod local_limit;
mod metrics;
mod output;
mod record;
mod run;

pub use config::{Axis, CellParams, ExperimentConfig, Format, Grid, Kind, Options};
pub use local_limit::{local_limit_check, total_variation, LocalLimitParams, LocalLimitReport};
pub use metrics::overlap;
pub use output::{read_json, write_csv, write_json, write_results, SCHEMA_VERSION};
pub use record::{Metrics, ResultRecord, VERSION};
pub use run::{cell_seed, run_experiment, run_kind};
