//! Experiment harness for treentropy: JSON-configured runs that emit CSV and
//! JSON artifacts, and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod output;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{execute, Artifact, Outcome};
