//! Automated spectral clustering for multi-scale data.
//!
//! The scale parameter is estimated from the data (PCA-based global σ² or
//! k-nearest-neighbour local σᵢ), the cluster count from the eigengap of the
//! normalized Laplacian, and an iterative eigengap search refines clusters
//! along a divisive tree until every leaf is spectrally indivisible.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affinity;
pub mod cli;
pub mod dataset;
pub mod eigengap;
pub mod error;
pub mod ies;
pub mod kmeans;
pub mod linalg;
pub mod njw;
pub mod scaling;
pub mod synthetic;
pub mod validation;

pub use error::{Error, Result};
pub use ies::{ClusterTreeNode, ClusteringOutcome, IesConfig, LeafReason, Method, ScaleMode};
pub use linalg::Matrix;
pub use scaling::ScalingEstimate;
