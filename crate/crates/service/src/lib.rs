//! Pipeline orchestration, the read-only JSON API, SVG export and synthetic
//! data for the rumorlens engine.

pub mod api;
pub mod cache;
pub mod config;
pub mod export;
pub mod pipeline;
pub mod server;
pub mod synth;

pub use api::{Api, Request, Response};
pub use config::Config;
pub use pipeline::{build_dataset, load_dataset, run_pipeline, BuildReport, Dataset, PipelineError};

/// The service's name for an immutable, query-ready dataset.
pub type DatasetHandle = std::sync::Arc<Dataset>;
