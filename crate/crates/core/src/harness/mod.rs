//! Stream ingestion, synthetic streams, experiment replay and metrics.

pub mod config;
pub mod experiment;
pub mod metrics;
pub mod stream;
pub mod synthetic;

pub use config::{Algorithm, ExperimentConfig, LifetimeSpec, SyntheticSpec};
pub use experiment::{load_batches, run_batches, run_experiment, write_metrics, ExperimentResult};
pub use metrics::{without_wall_clock, MetricsRecord, MetricsWriter, Summary, HEADER};
pub use stream::{parse_reader, parse_stream, serialize_single, Batch, ParsedStream};
pub use synthetic::generate_synthetic;
