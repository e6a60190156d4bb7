//! Small-instance oracles for the structural conditions behind the
//! estimator: subset stability, weights-to-subset rounding and
//! coordinate regularity.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{check_dim, DataMatrix};
use crate::error::{Error, Result};
use crate::sparse_norms::{binomial, next_combination, xk_norm, XkSolverOptions};
use crate::topk::l2k_norm;
use crate::types::WeightVector;

/// Largest number of subsets [`check_stability`] will enumerate.
pub const MAX_STABILITY_SUBSETS: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Indices of the subset with the largest violation ratio.
    pub worst_subset: Vec<usize>,
    /// `|mu_{S'} - mu|_{2,k}` on `worst_subset`.
    pub worst_mean_dev: f64,
    /// `|Sigma_bar_{S'} - sigma^2 I|_{X_k}` on `worst_subset`.
    pub worst_cov_dev: f64,
    /// `max(mean_dev / (sigma delta), cov_dev / (sigma^2 delta^2 / eps))`.
    pub worst_ratio: f64,
    pub subsets_checked: u64,
}

/// Number of subsets of an `n`-set with at least `min_size` elements.
fn large_subset_count(n: usize, min_size: usize) -> u128 {
    (0..=n - min_size).map(|j| binomial(n, j)).sum()
}

fn min_subset_size(n: usize, eps: f64) -> usize {
    ((1.0 - eps) * n as f64 - 1e-9).ceil().max(0.0) as usize
}

fn subset_deviations(
    s: &DataMatrix,
    subset: &[usize],
    mu: &[f64],
    sigma: f64,
    k: usize,
    opts: &XkSolverOptions,
) -> Result<(f64, f64)> {
    let d = s.d();
    let size = subset.len() as f64;
    let mut sum = vec![0.0; d];
    let mut second = DMatrix::<f64>::zeros(d, d);
    for &i in subset {
        let row = s.row(i);
        for (acc, x) in sum.iter_mut().zip(row) {
            *acc += x;
        }
        let centered = nalgebra::DVector::from_iterator(d, row.iter().zip(mu).map(|(x, m)| x - m));
        second.ger(1.0, &centered, &centered, 1.0);
    }
    let mean_dev: Vec<f64> = sum.iter().zip(mu).map(|(s, m)| s / size - m).collect();
    // Centered at the reference mu, not at the subset's own mean.
    let cov = second / size - DMatrix::identity(d, d) * (sigma * sigma);
    let cov_dev = xk_norm(&cov, k, opts)?.value;
    Ok((l2k_norm(&mean_dev, k)?, cov_dev))
}

/// Exhaustively checks `(eps, delta, k)`-stability of `s` with respect to
/// `mu` and `sigma`: every subset with at least `(1 - eps)|S|` points must
/// have its mean within `sigma delta` of `mu` in l2,k norm and its
/// `mu`-centered second moment within `sigma^2 delta^2 / eps` of
/// `sigma^2 I` in X_k norm.
pub fn check_stability(
    s: &DataMatrix,
    mu: &[f64],
    sigma: f64,
    eps: f64,
    delta: f64,
    k: usize,
) -> Result<StabilityVerdict> {
    check_dim(mu.len(), s.d())?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("eps must lie in (0, 0.5), got {eps}")));
    }
    if eps > delta {
        return Err(Error::Parameter(format!("need eps <= delta, got eps = {eps}, delta = {delta}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Parameter("sigma must be positive".into()));
    }
    if k == 0 || k > s.d() {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {}]", s.d())));
    }
    let n = s.n();
    let min_size = min_subset_size(n, eps).max(1);
    let count = large_subset_count(n, min_size);
    if count > MAX_STABILITY_SUBSETS {
        return Err(Error::Capacity(format!(
            "{count} subsets of size >= {min_size} out of {n} exceeds {MAX_STABILITY_SUBSETS}"
        )));
    }

    let opts = XkSolverOptions { tol: 1e-7, max_iters: 20_000, ..XkSolverOptions::default() };
    let mean_limit = sigma * delta;
    let cov_limit = sigma * sigma * delta * delta / eps;
    let mut verdict = StabilityVerdict {
        stable: true,
        worst_subset: Vec::new(),
        worst_mean_dev: 0.0,
        worst_cov_dev: 0.0,
        worst_ratio: f64::NEG_INFINITY,
        subsets_checked: 0,
    };
    let mut keep = vec![true; n];
    for removed in 0..=n - min_size {
        let mut idx: Vec<usize> = (0..removed).collect();
        loop {
            keep.fill(true);
            for &i in &idx {
                keep[i] = false;
            }
            let subset: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
            let (mean_dev, cov_dev) = subset_deviations(s, &subset, mu, sigma, k, &opts)?;
            let ratio = (mean_dev / mean_limit).max(cov_dev / cov_limit);
            verdict.subsets_checked += 1;
            if ratio > verdict.worst_ratio {
                verdict.worst_ratio = ratio;
                verdict.worst_subset = subset;
                verdict.worst_mean_dev = mean_dev;
                verdict.worst_cov_dev = cov_dev;
            }
            if removed == 0 || !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    // Boundary cases such as delta = sqrt(eps) should not flip on rounding.
    verdict.stable = verdict.worst_ratio <= 1.0 + 1e-9;
    Ok(verdict)
}

/// Rounds a capped-simplex weighting to the `ceil((1 - 2 eps) n)` indices
/// of largest weight (ties keep the lower index), returned in ascending
/// order.
pub fn weights_to_subset(s: &DataMatrix, w: &WeightVector, eps: f64) -> Result<Vec<usize>> {
    check_dim(w.len(), s.n())?;
    if !(eps >= 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("eps must lie in [0, 0.5), got {eps}")));
    }
    if !w.in_capped_simplex(eps) {
        return Err(Error::Input(format!("weights are not in the capped simplex for eps = {eps}")));
    }
    let n = s.n();
    let size = ((1.0 - 2.0 * eps) * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let ws = w.as_slice();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| ws[b].total_cmp(&ws[a]).then(a.cmp(&b)));
    idx.truncate(size);
    idx.sort_unstable();
    Ok(idx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    /// `true` certifies the coordinate-regularity program is feasible;
    /// `false` is inconclusive.
    pub feasible: bool,
    /// Retained indices, ascending.
    pub subset: Vec<usize>,
}

fn far_coordinates(s: &DataMatrix, mu: &[f64], a: f64) -> Vec<Vec<usize>> {
    s.rows().map(|row| (0..s.d()).filter(|&j| (row[j] - mu[j]).abs() >= a / 2.0).collect()).collect()
}

/// Checks the coordinate-regularity constraints verbatim: `|S'| >= 0.99 n`
/// and, for every coordinate, at most `3 alpha n` points of `S'` with
/// `|x_j - mu_j| >= a/2`.
pub fn regularity_holds(s: &DataMatrix, mu: &[f64], a: f64, alpha: f64, subset: &[usize]) -> Result<bool> {
    check_dim(mu.len(), s.d())?;
    let n = s.n() as f64;
    if (subset.len() as f64) < 0.99 * n {
        return Ok(false);
    }
    let mut counts = vec![0usize; s.d()];
    for &i in subset {
        let row = s.row(i);
        for j in 0..s.d() {
            if (row[j] - mu[j]).abs() >= a / 2.0 {
                counts[j] += 1;
            }
        }
    }
    Ok(counts.iter().all(|&c| c as f64 <= 3.0 * alpha * n))
}

/// Greedy, sound-but-incomplete feasibility search for the coordinate
/// regularity program: repeatedly drops the point that is far on the most
/// violated coordinates, within a budget of `0.01 n` points.
pub fn check_coordinate_regularity(s: &DataMatrix, mu: &[f64], a: f64, alpha: f64) -> Result<RegularityVerdict> {
    check_dim(mu.len(), s.d())?;
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("a must be positive, got {a}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = s.n();
    let far = far_coordinates(s, mu, a);
    let mut counts = vec![0usize; s.d()];
    for coords in &far {
        for &j in coords {
            counts[j] += 1;
        }
    }
    let limit = 3.0 * alpha * n as f64;
    let budget = (0.01 * n as f64 + 1e-9).floor() as usize;
    let candidates: Vec<usize> = (0..n).filter(|&i| !far[i].is_empty()).collect();
    let mut kept = vec![true; n];
    let mut removed = 0;

    let feasible = loop {
        let violated: Vec<bool> = counts.iter().map(|&c| c as f64 > limit).collect();
        if !violated.iter().any(|&v| v) {
            break true;
        }
        if removed >= budget {
            break false;
        }
        let best = candidates
            .iter()
            .filter(|&&i| kept[i])
            .map(|&i| (i, far[i].iter().filter(|&&j| violated[j]).count()))
            .fold((usize::MAX, 0), |acc, (i, hits)| if hits > acc.1 { (i, hits) } else { acc });
        if best.1 == 0 {
            break false;
        }
        kept[best.0] = false;
        removed += 1;
        for &j in &far[best.0] {
            counts[j] -= 1;
        }
    };
    Ok(RegularityVerdict { feasible, subset: (0..n).filter(|&i| kept[i]).collect() })
}
