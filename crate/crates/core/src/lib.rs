//! Quality benchmarking for tabular software effort estimation datasets.
//!
//! A dataset is parsed from CSV or ARFF ([`dataset`]), paired with an optional
//! submission manifest ([`manifest`]) and run through the accuracy assessors
//! ([`accuracy`]: noise, outliers, inconsistency, incompleteness, redundancy)
//! and the relevance/provenance assessors ([`relevance`], [`provenance`]).
//! [`report`] assembles the results into one row of the quality matrix and
//! renders it as JSON, markdown or CSV.

pub mod accuracy;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod fisma;
pub mod formula;
pub mod manifest;
pub mod provenance;
pub mod relevance;
pub mod report;
pub mod stats;

pub use dataset::{AttributeSpec, Cell, Dataset, Kind, Role};
pub use error::{Error, Result};
pub use manifest::TemplateManifest;
pub use report::{assemble_report, QualityReport};

/// Version string echoed into every report.
pub const TOOL_VERSION: &str = concat!("dqbench ", env!("CARGO_PKG_VERSION"));
