//! Seeded clean-data generators and contamination adversaries.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::{check_dim, DataMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CleanFamily {
    /// `N(mu, I)` with a k-sparse `mu`.
    GaussianSparseMean,
    /// Uniform on `{mu +- r e_j}` with `r = d^(1/t)`; covariance `(r^2/d) I`.
    AxisSpike,
    /// i.i.d. Student-t coordinates rescaled to unit variance, plus `mu`.
    BoundedFourth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanParams {
    /// Magnitude of each nonzero entry of the sparse mean.
    pub mag: f64,
    /// Moment order for `axis_spike`.
    pub t: f64,
    /// Degrees of freedom for `bounded_fourth`.
    pub dof: f64,
    /// Standard deviation multiplier for `gaussian_sparse_mean` and
    /// `bounded_fourth`; zero gives constant data.
    pub noise: f64,
}

impl Default for CleanParams {
    fn default() -> Self {
        Self { mag: 1.0, t: 4.0, dof: 5.0, noise: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleanSpec {
    pub family: CleanFamily,
    pub d: usize,
    pub k: usize,
    pub n: usize,
    #[serde(default)]
    pub params: CleanParams,
    #[serde(default)]
    pub seed: u64,
}

impl CleanSpec {
    pub fn new(family: CleanFamily, n: usize, d: usize, k: usize, seed: u64) -> Self {
        Self { family, d, k, n, params: CleanParams::default(), seed }
    }

    pub fn with_mag(mut self, mag: f64) -> Self {
        self.params.mag = mag;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Config("n and d must be positive".into()));
        }
        if self.k == 0 || self.k > self.d {
            return Err(Error::Config(format!("k = {} must lie in [1, {}]", self.k, self.d)));
        }
        if !self.params.mag.is_finite() {
            return Err(Error::Config("mag must be finite".into()));
        }
        if !(self.params.noise >= 0.0 && self.params.noise.is_finite()) {
            return Err(Error::Config("noise must be finite and nonnegative".into()));
        }
        match self.family {
            CleanFamily::AxisSpike if !(self.params.t >= 2.0) => {
                Err(Error::Config(format!("axis_spike needs t >= 2, got {}", self.params.t)))
            }
            CleanFamily::BoundedFourth if !(self.params.dof > 4.0) => {
                Err(Error::Config(format!("bounded_fourth needs dof > 4, got {}", self.params.dof)))
            }
            _ => Ok(()),
        }
    }
}

/// `r = d^(1/t)` for the axis-spike family.
pub fn axis_spike_radius(d: usize, t: f64) -> f64 {
    (d as f64).powf(1.0 / t)
}

fn sparse_mean(d: usize, k: usize, mag: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut mu = vec![0.0; d];
    for j in index::sample(rng, d, k) {
        mu[j] = if rng.random::<bool>() { mag } else { -mag };
    }
    mu
}

/// Draws `spec.n` clean samples and returns them with the true mean.
pub fn sample_clean(spec: &CleanSpec) -> Result<(DataMatrix, Vec<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d) = (spec.n, spec.d);
    let mu = sparse_mean(d, spec.k, spec.params.mag, &mut rng);
    let noise = spec.params.noise;
    let mut values = Vec::with_capacity(n * d);
    match spec.family {
        CleanFamily::GaussianSparseMean => {
            for _ in 0..n {
                values.extend(mu.iter().map(|m| m + noise * rng.sample::<f64, _>(StandardNormal)));
            }
        }
        CleanFamily::AxisSpike => {
            let r = axis_spike_radius(d, spec.params.t);
            for _ in 0..n {
                let start = values.len();
                values.extend_from_slice(&mu);
                let j = rng.random_range(0..d);
                values[start + j] += if rng.random::<bool>() { r } else { -r };
            }
        }
        CleanFamily::BoundedFourth => {
            let dof = spec.params.dof;
            let t = StudentT::new(dof).map_err(|e| Error::Config(e.to_string()))?;
            let unit = noise * ((dof - 2.0) / dof).sqrt();
            for _ in 0..n {
                values.extend(mu.iter().map(|m| m + unit * t.sample(&mut rng)));
            }
        }
    }
    Ok((DataMatrix::new(n, d, values)?, mu))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    None,
    /// Every replaced row sits at `mu + scale * u` for one random k-sparse unit `u`.
    SparseShift,
    /// Replaced rows are uniform on `[-range, range]^d`.
    DenseNoise,
    /// Replaced rows sit at `mu + y`, `y` = `alpha` on the first k coordinates.
    LbPair,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdversaryParams {
    /// Shift length for `sparse_shift`; `1/sqrt(eps)` when absent.
    pub scale: Option<f64>,
    /// Half-width for `dense_noise`; 10 when absent.
    pub range: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub eps: f64,
    #[serde(default)]
    pub params: AdversaryParams,
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind, eps: f64) -> Self {
        Self { kind, eps, params: AdversaryParams::default() }
    }

    pub fn none() -> Self {
        Self::new(AdversaryKind::None, 0.0)
    }
}

/// `ceil(eps * n)`, robust to products that land a hair above an integer.
pub fn corrupted_count(n: usize, eps: f64) -> usize {
    ((eps * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Random k-sparse unit vector with entries `+-1/sqrt(k)`.
pub fn random_sparse_unit(d: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut u = vec![0.0; d];
    let v = 1.0 / (k as f64).sqrt();
    for j in index::sample(rng, d, k) {
        u[j] = if rng.random::<bool>() { v } else { -v };
    }
    u
}

/// Replaces exactly `ceil(eps * n)` rows, chosen at random, according to
/// the adversary. All other rows are left untouched.
pub fn corrupt(s: &DataMatrix, mu_true: &[f64], adv: &AdversarySpec, k: usize, seed: u64) -> Result<DataMatrix> {
    check_dim(mu_true.len(), s.d())?;
    if !(adv.eps >= 0.0 && adv.eps < 0.5) {
        return Err(Error::Parameter(format!("adversary eps must lie in [0, 0.5), got {}", adv.eps)));
    }
    if k == 0 || k > s.d() {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {}]", s.d())));
    }
    let count = corrupted_count(s.n(), adv.eps);
    if count == 0 || adv.kind == AdversaryKind::None {
        return Ok(s.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..s.n()).collect();
    rows.shuffle(&mut rng);
    rows.truncate(count);
    rows.sort_unstable();

    let d = s.d();
    let mut values = s.values().to_vec();
    match adv.kind {
        AdversaryKind::None => unreachable!(),
        AdversaryKind::SparseShift => {
            let scale = adv.params.scale.unwrap_or(1.0 / adv.eps.sqrt());
            let u = random_sparse_unit(d, k, &mut rng);
            for &i in &rows {
                for j in 0..d {
                    values[i * d + j] = mu_true[j] + scale * u[j];
                }
            }
        }
        AdversaryKind::DenseNoise => {
            let range = adv.params.range.unwrap_or(10.0);
            let dist = Uniform::new_inclusive(-range, range).map_err(|e| Error::Parameter(e.to_string()))?;
            for &i in &rows {
                for v in &mut values[i * d..(i + 1) * d] {
                    *v = dist.sample(&mut rng);
                }
            }
        }
        AdversaryKind::LbPair => {
            let alpha = 1.0 / (k as f64 * adv.eps).sqrt();
            for &i in &rows {
                for j in 0..d {
                    values[i * d + j] = mu_true[j] + if j < k { alpha } else { 0.0 };
                }
            }
        }
    }
    DataMatrix::new(s.n(), d, values)
}

/// Analytic parameters of the two-point lower-bound construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundPair {
    /// Value on each of the first k coordinates of the far point.
    pub alpha: f64,
    /// l2,k distance between the two means.
    pub mean_gap_2k: f64,
    /// Total variation distance between the two distributions.
    pub tv: f64,
}

/// The pair `D1 = delta_0`, `D2 = (1 - eps) delta_0 + eps delta_y`, valid for
/// `k >= 1/sqrt(eps)`.
pub fn lb_pair_description(d: usize, k: usize, eps: f64) -> Result<LowerBoundPair> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("eps must lie in (0, 0.5), got {eps}")));
    }
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {d}]")));
    }
    if (k as f64) < 1.0 / eps.sqrt() - 1e-9 {
        return Err(Error::Parameter(format!(
            "construction needs k >= 1/sqrt(eps) = {:.4}, got {k}",
            1.0 / eps.sqrt()
        )));
    }
    Ok(LowerBoundPair { alpha: 1.0 / (k as f64 * eps).sqrt(), mean_gap_2k: eps.sqrt(), tv: eps })
}
