//! Outlier-robust sparse mean estimation for heavy-tailed data.
//!
//! The estimator in [`pipeline::robust_sparse_mean`] runs four stages:
//!
//! 1. median-of-means grouping, which turns an `eps`-corrupted sample into a
//!    1%-corrupted sample of group means with scale `sigma = 1/sqrt(m)`;
//! 2. a coordinate-wise median-of-means preliminary estimate;
//! 3. clamping every grouped point to an l-infinity box of radius
//!    `4 sigma sqrt(k)` around that estimate;
//! 4. a downweighting filter driven by the X_k norm of the weighted
//!    covariance ([`sparse_norms::xk_norm`]).
//!
//! Around it sit seeded data and adversary generators ([`genlab`]),
//! brute-force oracles for the structural conditions the estimator relies on
//! ([`diagnostics`]), and the experiment runner behind the `sparsemean`
//! binary ([`experiment`]).

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod filter;
pub mod genlab;
pub mod pipeline;
pub mod preprocess;
pub mod sparse_norms;
pub mod topk;
pub mod types;

pub use data::DataMatrix;
pub use error::{Error, Result};

pub use pipeline::{error_2k, robust_sparse_mean, PipelineResult};
pub use sparse_norms::{xk_entrywise_bound, xk_norm, XkSolverOptions};
pub use topk::{hard_threshold_topk, l2k_norm};
pub use types::{EstimateReport, EstimatorConfig, WeightVector, XkCertificate};
