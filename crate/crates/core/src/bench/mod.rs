//! Experiment harness: CSV ingestion, splits, preprocessing, cell runs and reports.

pub mod config;
pub mod experiment;
pub mod io;
pub mod preprocess;
pub mod report;
pub mod split;

pub use config::{ExperimentConfig, FeatureChoice, ModelKind, ModelSpec, Setting};
pub use experiment::{run_experiment, Manifest, ResultRow, ResultsTable, RunOutput, METRICS};
pub use io::{ingest_dynamic, ingest_static, Cell, ColumnKind, RawDynamic, RawStatic, Schema};
pub use preprocess::Preprocessor;
pub use report::{report, Report};
pub use split::{split_stratified, validate_dataset, Splits, Verdict};
