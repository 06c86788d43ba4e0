//! Community-aware synthetic network generation.
//!
//! Given a reference network and a disjoint clustering, the pipeline samples
//! a degree-corrected SBM replica and repairs every cluster so it keeps the
//! reference cluster's minimum cut, minimum degree and degree sequence. The
//! [`eval`] module measures how closely a synthetic network tracks its
//! reference.

pub mod clustering;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod mincut;
pub mod pipeline;
pub mod planted;
pub mod reccs;
pub mod scalar;
pub mod sbm;
pub mod splitter;
pub mod stats;

pub use clustering::{ClusterId, Clustering};
pub use error::{Error, Result};
pub use graph::{CsrGraph, Edge, EdgeSet, NodeId};
pub use mincut::{global_min_cut, MinCut};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput, RunReport};
pub use reccs::Variant;
pub use scalar::Scalar;

pub type MetricReport = eval::MetricReport<f64>;
pub type NetworkStats = eval::NetworkStats<f64>;
pub type Matrix = eval::Matrix<f64>;
pub type MetricReportF32 = eval::MetricReport<f32>;
pub type NetworkStatsF32 = eval::NetworkStats<f32>;
