//! Reproducible experiments over `sievelab-core`: TOML-configured scenarios
//! with CSV/JSON reports, an extremal-set search under residue capacity
//! constraints, and the acceptance suite behind `sievelab verify`.

pub mod config;
pub mod error;
pub mod extremal;
pub mod output;
pub mod scenario;
pub mod suite;

pub use error::{LabError, LabResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
