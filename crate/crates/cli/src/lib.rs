//! Configuration-driven batch pipeline over `infcast-core`.

pub mod config;
pub mod fixture;
pub mod pipeline;
pub mod table;

pub use config::{PipelineConfig, Problem};
pub use pipeline::{load_dataset, run, run_config, Dataset, ErrorKind, Overrides, PipelineError, RunSummary};
