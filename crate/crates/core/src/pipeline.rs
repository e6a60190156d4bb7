//! The end-to-end estimator: grouping, coordinate-wise median-of-means,
//! truncation, filtering and top-k rounding.

use serde::{Deserialize, Serialize};

use crate::data::{check_dim, DataMatrix};
use crate::error::{Error, Result};
use crate::filter::{stability_filter, FilterTrace};
use crate::preprocess::{coordinatewise_median_of_means, group_count, group_means, mom_bucket_count, truncate_set};
use crate::topk::{hard_threshold_topk, l2k_norm};
use crate::types::{EstimateReport, EstimatorConfig};

/// Smallest number of groups the pipeline accepts.
pub const MIN_GROUPS: usize = 16;

const MOM_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub report: EstimateReport,
    /// `report.mu_hat` with all but its k largest-magnitude entries zeroed.
    pub mu_sparse: Vec<f64>,
    pub trace: FilterTrace,
}

/// Estimates the mean of an `eps`-corrupted sample in l2,k norm.
pub fn robust_sparse_mean(t: &DataMatrix, cfg: &EstimatorConfig) -> Result<PipelineResult> {
    cfg.validate(Some(t.d()))?;
    let g = group_count(t.n(), cfg.eps, cfg.group_factor);
    if g < MIN_GROUPS {
        return Err(Error::Parameter(format!(
            "n = {} gives {g} groups at eps = {}; at least {MIN_GROUPS} are required",
            t.n(),
            cfg.eps
        )));
    }

    let grouped = group_means(t, cfg.eps, cfg.group_factor, cfg.seed)?;
    let sigma = cfg.scale * grouped.sigma;
    let points = &grouped.grouped;

    let buckets = mom_bucket_count(points.n(), t.d(), cfg.mom_corruption, cfg.tau / 2.0, cfg.mom_bucket_factor);
    let mu_tilde = coordinatewise_median_of_means(points, buckets, cfg.seed ^ MOM_SEED_SALT)?;

    let radius = cfg.trunc_factor * sigma * (cfg.k as f64).sqrt();
    let truncated = truncate_set(points, radius, &mu_tilde)?;

    let filtered = stability_filter(&truncated, cfg.k, sigma, cfg)?;
    let mu_sparse = hard_threshold_topk(&filtered.mu_hat, cfg.k)?;

    let mut warnings = grouped.warnings;
    warnings.extend(filtered.warnings);
    let report = EstimateReport {
        mu_hat: filtered.mu_hat,
        mu_tilde,
        sigma,
        removed_mass: filtered.removed_mass,
        iterations: filtered.iterations,
        converged: filtered.converged,
        warnings,
    };
    Ok(PipelineResult { report, mu_sparse, trace: filtered.trace })
}

/// `l2k_norm(mu_hat - mu_true, k)`.
pub fn error_2k(mu_hat: &[f64], mu_true: &[f64], k: usize) -> Result<f64> {
    check_dim(mu_hat.len(), mu_true.len())?;
    let diff: Vec<f64> = mu_hat.iter().zip(mu_true).map(|(a, b)| a - b).collect();
    l2k_norm(&diff, k)
}
