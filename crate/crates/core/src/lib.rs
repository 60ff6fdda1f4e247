//! Two-branch GRU + 1-D CNN classifier for IoT botnet flow records, written
//! with hand-derived backpropagation, plus the confusion-matrix statistics
//! used to report it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataio;
pub mod error;
pub mod layers;
pub mod metrics;
pub mod network;
pub mod numerics;
pub mod training;

pub use error::{Error, ErrorCategory, Result};
