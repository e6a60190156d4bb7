//! Weights, configuration, certificates and reports shared across stages.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-sample nonnegative weights; the filter's mutable state.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Input("empty weight vector".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Input("weights must be finite and nonnegative".into()));
        }
        if w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Input("weights sum to zero".into()));
        }
        Ok(Self { w })
    }

    /// Uniform weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Membership in the capped simplex: entries at most `1/((1-eps) n)`
    /// and summing to one, both within 1e-9.
    pub fn in_capped_simplex(&self, eps: f64) -> bool {
        let n = self.w.len() as f64;
        let cap = 1.0 / ((1.0 - eps) * n);
        (self.total() - 1.0).abs() <= 1e-9 && self.w.iter().all(|&v| v <= cap + 1e-9)
    }

    pub(crate) fn from_raw(w: Vec<f64>) -> Self {
        Self { w }
    }
}

/// Every tunable of the estimation pipeline and the filter.
///
/// Field names are the JSON keys accepted by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Corruption fraction, in `(0, 0.01]`.
    pub eps: f64,
    /// Failure probability, in `(0, 1)`.
    #[serde(default = "defaults::tau")]
    pub tau: f64,
    /// Sparsity, in `[1, d]`.
    pub k: usize,
    /// Number of groups is `floor(group_factor * eps * n)`.
    #[serde(default = "defaults::group_factor")]
    pub group_factor: f64,
    /// Truncation radius is `trunc_factor * sigma * sqrt(k)`.
    #[serde(default = "defaults::trunc_factor")]
    pub trunc_factor: f64,
    /// Filter stops once the certificate value is at most `stop_constant * sigma^2`.
    #[serde(default = "defaults::stop_constant")]
    pub stop_constant: f64,
    /// Filter iteration cap; `None` means the number of filtered points.
    #[serde(default)]
    pub max_filter_iters: Option<usize>,
    #[serde(default = "defaults::solver_tol")]
    pub solver_tol: f64,
    #[serde(default = "defaults::solver_max_iters")]
    pub solver_max_iters: usize,
    #[serde(default)]
    pub seed: u64,
    /// Corruption level handed to the coordinate-wise median-of-means stage.
    #[serde(default = "defaults::mom_corruption")]
    pub mom_corruption: f64,
    /// Known bound on the clean standard deviation along sparse directions.
    /// The filter works with `sigma = scale / sqrt(m)`.
    #[serde(default = "defaults::scale")]
    pub scale: f64,
    /// Multiplier in the bucket-count schedule of the coordinate-wise
    /// median-of-means stage.
    #[serde(default = "defaults::mom_bucket_factor")]
    pub mom_bucket_factor: f64,
}

pub(crate) mod defaults {
    pub fn tau() -> f64 {
        0.1
    }
    pub fn group_factor() -> f64 {
        100.0
    }
    pub fn trunc_factor() -> f64 {
        4.0
    }
    pub fn stop_constant() -> f64 {
        1.5
    }
    pub fn solver_tol() -> f64 {
        1e-4
    }
    pub fn solver_max_iters() -> usize {
        2000
    }
    pub fn mom_corruption() -> f64 {
        0.01
    }
    pub fn scale() -> f64 {
        1.0
    }
    pub fn mom_bucket_factor() -> f64 {
        8.0
    }
}

impl EstimatorConfig {
    pub fn new(eps: f64, k: usize) -> Self {
        Self {
            eps,
            tau: defaults::tau(),
            k,
            group_factor: defaults::group_factor(),
            trunc_factor: defaults::trunc_factor(),
            stop_constant: defaults::stop_constant(),
            max_filter_iters: None,
            solver_tol: defaults::solver_tol(),
            solver_max_iters: defaults::solver_max_iters(),
            seed: 0,
            mom_corruption: defaults::mom_corruption(),
            scale: defaults::scale(),
            mom_bucket_factor: defaults::mom_bucket_factor(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Range checks on every field; `d` is checked against `k` when given.
    pub fn validate(&self, d: Option<usize>) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 0.01) {
            return Err(Error::Parameter(format!("eps must lie in (0, 0.01], got {}", self.eps)));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Parameter(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        if self.k == 0 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        if let Some(d) = d {
            if self.k > d {
                return Err(Error::Parameter(format!("k = {} exceeds dimension {d}", self.k)));
            }
        }
        let positive = [
            ("group_factor", self.group_factor),
            ("trunc_factor", self.trunc_factor),
            ("stop_constant", self.stop_constant),
            ("solver_tol", self.solver_tol),
            ("mom_bucket_factor", self.mom_bucket_factor),
            ("scale", self.scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.mom_corruption >= 0.0 && self.mom_corruption < 0.5) {
            return Err(Error::Parameter("mom_corruption must lie in [0, 0.5)".into()));
        }
        if self.solver_max_iters == 0 || self.max_filter_iters == Some(0) {
            return Err(Error::Parameter("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// A feasible point `m` of the sparse spectrahedron together with the
/// attained objective `|A . m|`.
#[derive(Clone, Debug)]
pub struct XkCertificate {
    pub m: DMatrix<f64>,
    pub value: f64,
}

impl XkCertificate {
    /// Checks PSD (min eigenvalue >= -1e-8 |M|_F), unit trace within 1e-8
    /// and entrywise l1 norm at most `k (1 + 1e-6)`.
    pub fn check_feasible(&self, k: usize) -> Result<()> {
        let m = &self.m;
        if !m.is_square() {
            return Err(Error::Input("certificate is not square".into()));
        }
        let trace = m.trace();
        if (trace - 1.0).abs() > 1e-8 {
            return Err(Error::Input(format!("certificate trace {trace} != 1")));
        }
        let l1: f64 = m.iter().map(|v| v.abs()).sum();
        if l1 > k as f64 * (1.0 + 1e-6) {
            return Err(Error::Input(format!("certificate l1 norm {l1} exceeds {k}")));
        }
        let sym = (m + m.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        if min_eig < -1e-8 * m.norm() {
            return Err(Error::Input(format!("certificate has eigenvalue {min_eig} < 0")));
        }
        Ok(())
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        self.m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Output of one estimation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mu_hat: Vec<f64>,
    /// Coordinate-wise median-of-means estimate on the grouped points.
    pub mu_tilde: Vec<f64>,
    /// `1 / sqrt(m)` for group size `m`.
    pub sigma: f64,
    /// Fraction of the filter's initial weight removed.
    pub removed_mass: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}
