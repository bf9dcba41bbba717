//! Configuration-driven runs of `reservoir-core`: single scenarios,
//! parameter sweeps and figure data, written as CSV with a JSON manifest.

pub mod config;
pub mod error;
pub mod figures;
pub mod format;
pub mod scenario;
pub mod sweep;

pub use config::{Artifact, Method, ScenarioConfig};
pub use error::{CliError, Result};
pub use scenario::{run_scenario, RunManifest};
