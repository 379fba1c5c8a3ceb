//! Experiment presets, pipeline drivers and run manifests for the `daylight` tool.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipelines;

pub use config::{validate_config, ExperimentConfig, NormalizedConfig, Preset};
pub use error::{ExperimentError, Result};
