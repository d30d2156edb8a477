//! Predictive representativity auditing for classifiers.
//!
//! Compares how well a model performs on a subgroup against the population
//! it belongs to, either through per-record divergences between the true and
//! predicted label distributions or through standard classification metrics.

pub mod divergence;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pr;
pub mod report;
pub mod stats;
pub mod synth;
pub mod transport;

pub use error::{Error, Result};
