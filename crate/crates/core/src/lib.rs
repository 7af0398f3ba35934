pub mod classifiers;
pub mod curves;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod reporting;
pub mod seed;
mod serde_threshold;

pub use error::{Error, Result};
