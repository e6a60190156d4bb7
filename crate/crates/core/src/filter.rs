//! Downweighting filter driven by X_k certificates.
//!
//! Each round computes the weighted mean and covariance, asks
//! [`xk_norm`] for the worst sparse direction `M`, and stops once
//! `|Sigma_w|_{X_k} <= stop_constant * sigma^2`. Otherwise every point is
//! scored by `(x - mu_w)^T M (x - mu_w)` and its weight is multiplied by
//! `1 - score / max_score`, which zeroes the top-scoring point. The weighted
//! average score equals the certificate value, so each round removes mass
//! where the excess variance lives.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{check_dim, DataMatrix};
use crate::error::{Error, Result};
use crate::sparse_norms::{xk_norm, XkSolverOptions};
use crate::types::{EstimatorConfig, WeightVector};

/// The filter never removes more than this fraction of its initial mass.
pub const MASS_CAP: f64 = 0.1;

const CHUNK: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterStep {
    /// `|Sigma_w . M|` for the certificate of this round.
    pub xk_value: f64,
    /// Weighted average score `sum w_i tau_i / sum w_i`.
    pub mean_score: f64,
    pub max_score: f64,
    /// Mass removed in this round, as a fraction of the initial mass.
    pub removed_mass_delta: f64,
    pub cumulative_removed: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterTrace {
    pub steps: Vec<FilterStep>,
}

#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub mu_hat: Vec<f64>,
    pub weights: WeightVector,
    pub trace: FilterTrace,
    pub converged: bool,
    pub removed_mass: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

pub(crate) fn weighted_mean(t: &DataMatrix, w: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    let Some(first) = w.iter().position(|&v| v > 0.0) else {
        return Err(Error::Estimation("all weights are zero".into()));
    };
    let anchor = t.row(first);
    let mut acc = vec![0.0; t.d()];
    for (row, &wi) in t.rows().zip(w) {
        if wi > 0.0 {
            for ((a, x), c) in acc.iter_mut().zip(row).zip(anchor) {
                *a += wi * (x - c);
            }
        }
    }
    Ok(acc.iter().zip(anchor).map(|(a, c)| c + a / total).collect())
}

/// `sum_i w_i (x_i - mu)(x_i - mu)^T / sum_i w_i`.
pub(crate) fn weighted_covariance(t: &DataMatrix, w: &[f64], mu: &[f64]) -> DMatrix<f64> {
    let d = t.d();
    let total: f64 = w.iter().sum();
    let mut cov = DMatrix::zeros(d, d);
    let active: Vec<usize> = (0..t.n()).filter(|&i| w[i] > 0.0).collect();
    for chunk in active.chunks(CHUNK) {
        let mut block = DMatrix::zeros(d, chunk.len());
        for (c, &i) in chunk.iter().enumerate() {
            let s = (w[i] / total).sqrt();
            for (j, (x, m)) in t.row(i).iter().zip(mu).enumerate() {
                block[(j, c)] = s * (x - m);
            }
        }
        let block_t = block.transpose();
        cov.gemm(1.0, &block, &block_t, 1.0);
    }
    (&cov + cov.transpose()) * 0.5
}

/// Quadratic-form scores `(x_i - mu)^T M (x_i - mu)` for every row.
///
/// Only the rows and columns of `M` with a nonzero entry are touched, so
/// sparse certificates score in `O(n s^2)` for support size `s`.
pub fn score_points(t: &DataMatrix, w: &WeightVector, mu: &[f64], m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_dim(w.len(), t.n())?;
    check_dim(mu.len(), t.d())?;
    if m.nrows() != t.d() || m.ncols() != t.d() {
        return Err(Error::Input("score matrix has the wrong shape".into()));
    }
    let support: Vec<usize> = (0..t.d()).filter(|&i| m.row(i).iter().any(|v| *v != 0.0)).collect();
    if support.is_empty() {
        return Ok(vec![0.0; t.n()]);
    }
    let ms = m.select_rows(&support).select_columns(&support);
    let ms = (&ms + ms.transpose()) * 0.5;
    let s = support.len();
    let mut scores = Vec::with_capacity(t.n());
    let rows: Vec<usize> = (0..t.n()).collect();
    for chunk in rows.chunks(CHUNK) {
        let mut y = DMatrix::zeros(s, chunk.len());
        for (c, &i) in chunk.iter().enumerate() {
            let row = t.row(i);
            for (a, &j) in support.iter().enumerate() {
                y[(a, c)] = row[j] - mu[j];
            }
        }
        let z = &ms * &y;
        scores.extend(y.column_iter().zip(z.column_iter()).map(|(yc, zc)| yc.dot(&zc)));
    }
    Ok(scores)
}

/// Runs the filter on `t` with scale `sigma`.
pub fn stability_filter(t: &DataMatrix, k: usize, sigma: f64, cfg: &EstimatorConfig) -> Result<FilterOutcome> {
    if k == 0 || k > t.d() {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {}]", t.d())));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    let n = t.n();
    let max_iters = cfg.max_filter_iters.unwrap_or(n);
    let opts = XkSolverOptions::new(cfg.solver_tol, cfg.solver_max_iters);
    let threshold = cfg.stop_constant * sigma * sigma;

    let mut w = vec![1.0 / n as f64; n];
    let mut removed = 0.0;
    let mut trace = FilterTrace::default();
    let mut warnings = Vec::new();
    let mut iterations = 0;

    let converged = loop {
        if w.iter().all(|&v| v <= 0.0) {
            return Err(Error::Estimation("filter zeroed every weight".into()));
        }
        if iterations >= max_iters {
            warnings.push(format!("filter stopped after {iterations} iterations without converging"));
            break false;
        }
        let mu = weighted_mean(t, &w)?;
        let cov = weighted_covariance(t, &w, &mu);
        let cert = xk_norm(&cov, k, &opts)?;
        iterations += 1;

        let weights = WeightVector::from_raw(w.clone());
        let scores = score_points(t, &weights, &mu, &cert.m)?;
        let total: f64 = w.iter().sum();
        let mean_score = w.iter().zip(&scores).map(|(a, b)| a * b).sum::<f64>() / total;
        let (argmax, max_score) = (0..n)
            .filter(|&i| w[i] > 0.0)
            .map(|i| (i, scores[i]))
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });

        let mut step = FilterStep {
            xk_value: cert.value,
            mean_score,
            max_score,
            removed_mass_delta: 0.0,
            cumulative_removed: removed,
        };
        if cert.value <= threshold {
            trace.steps.push(step);
            break true;
        }
        if !(max_score > 0.0) {
            trace.steps.push(step);
            warnings.push("no point has a positive score; cannot downweight further".into());
            break false;
        }

        let mut next: Vec<f64> = w
            .iter()
            .zip(&scores)
            .map(|(&wi, &s)| if wi > 0.0 { (wi * (1.0 - s.max(0.0) / max_score)).max(0.0) } else { 0.0 })
            .collect();
        next[argmax] = 0.0;
        let delta = total - next.iter().sum::<f64>();
        if removed + delta > MASS_CAP {
            trace.steps.push(step);
            warnings.push(format!(
                "removed-mass cap {MASS_CAP} reached after {iterations} iterations (certificate value {:.4} > {:.4})",
                cert.value, threshold
            ));
            break false;
        }
        removed += delta;
        step.removed_mass_delta = delta;
        step.cumulative_removed = removed;
        trace.steps.push(step);
        w = next;
    };

    let mu_hat = weighted_mean(t, &w)?;
    Ok(FilterOutcome {
        mu_hat,
        weights: WeightVector::new(w)?,
        trace,
        converged,
        removed_mass: removed,
        iterations,
        warnings,
    })
}
