//! Median-of-means grouping, coordinate-wise median-of-means and
//! l-infinity truncation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{check_dim, DataMatrix};
use crate::error::{Error, Result};

/// Group means of a randomly partitioned sample.
#[derive(Clone, Debug)]
pub struct GroupedData {
    /// One row per group.
    pub grouped: DataMatrix,
    /// Group size.
    pub m: usize,
    /// `1 / sqrt(m)`.
    pub sigma: f64,
    /// Rows left over after forming equal groups.
    pub dropped: usize,
    pub warnings: Vec<String>,
}

/// Number of groups `floor(group_factor * eps * n)`.
pub fn group_count(n: usize, eps: f64, group_factor: f64) -> usize {
    // Nudge so that products like 100 * 0.01 * 200 land on the integer.
    (group_factor * eps * n as f64 * (1.0 + 1e-12)).floor() as usize
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Mean of the rows `idx`, anchored at the first row so constant inputs
/// come back bit-exact.
fn block_mean(t: &DataMatrix, idx: &[usize], out: &mut [f64]) {
    let anchor = t.row(idx[0]);
    out.fill(0.0);
    for &i in &idx[1..] {
        for ((o, x), a) in out.iter_mut().zip(t.row(i)).zip(anchor) {
            *o += x - a;
        }
    }
    let m = idx.len() as f64;
    for (o, a) in out.iter_mut().zip(anchor) {
        *o = a + *o / m;
    }
}

fn block_means(t: &DataMatrix, blocks: usize, seed: u64) -> (DataMatrix, usize, usize) {
    let n = t.n();
    let d = t.d();
    let size = n / blocks;
    let idx = shuffled_indices(n, seed);
    let mut values = vec![0.0; blocks * d];
    for (b, out) in values.chunks_exact_mut(d).enumerate() {
        block_mean(t, &idx[b * size..(b + 1) * size], out);
    }
    let grouped = DataMatrix::new(blocks, d, values).expect("means of finite rows are finite");
    (grouped, size, n - blocks * size)
}

/// Randomly partitions the rows into `g = floor(group_factor * eps * n)`
/// groups of size `m = floor(n / g)` and replaces each group by its mean.
/// Leftover rows are dropped and reported as a warning.
pub fn group_means(t: &DataMatrix, eps: f64, group_factor: f64, seed: u64) -> Result<GroupedData> {
    if !(eps > 0.0 && eps <= 0.01) {
        return Err(Error::Parameter(format!("eps must lie in (0, 0.01], got {eps}")));
    }
    if !(group_factor > 0.0) {
        return Err(Error::Parameter("group_factor must be positive".into()));
    }
    let g = group_count(t.n(), eps, group_factor);
    if g < 1 {
        return Err(Error::Parameter(format!("n = {} too small for eps = {eps}", t.n())));
    }
    let (grouped, m, dropped) = block_means(t, g, seed);
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(format!("grouping dropped {dropped} of {} rows to form {g} groups of {m}", t.n()));
    }
    Ok(GroupedData { grouped, m, sigma: 1.0 / (m as f64).sqrt(), dropped, warnings })
}

/// Median with the midpoint convention for even counts.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    let len = values.len();
    let mid = len / 2;
    let (_, &mut upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    if len % 2 == 1 {
        upper
    } else {
        let lower = values[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lower + (upper - lower) / 2.0
    }
}

/// Coordinate-wise median of `num_buckets` bucket means over a seeded
/// random partition. Leftover rows are dropped.
pub fn coordinatewise_median_of_means(t: &DataMatrix, num_buckets: usize, seed: u64) -> Result<Vec<f64>> {
    if num_buckets == 0 || num_buckets > t.n() {
        return Err(Error::Parameter(format!("num_buckets = {num_buckets} must lie in [1, {}]", t.n())));
    }
    let (means, _, _) = block_means(t, num_buckets, seed);
    let mut column = vec![0.0; num_buckets];
    Ok((0..t.d())
        .map(|j| {
            for (c, row) in column.iter_mut().zip(means.rows()) {
                *c = row[j];
            }
            median(&mut column)
        })
        .collect())
}

/// Bucket count for the coordinate-wise stage:
/// `ceil(factor * (corruption * g + ln(2 d / tau)))`, capped at `g`.
pub fn mom_bucket_count(g: usize, d: usize, corruption: f64, tau: f64, factor: f64) -> usize {
    let raw = factor * (corruption * g as f64 + (2.0 * d as f64 / tau).ln());
    (raw.ceil().max(1.0) as usize).min(g)
}

/// Clamps each coordinate of `x` to `[b_i - a, b_i + a]`.
pub fn truncate(x: &[f64], a: f64, b: &[f64]) -> Vec<f64> {
    x.iter().zip(b).map(|(&xi, &bi)| xi.clamp(bi - a, bi + a)).collect()
}

/// Row-wise [`truncate`].
pub fn truncate_set(t: &DataMatrix, a: f64, b: &[f64]) -> Result<DataMatrix> {
    check_dim(b.len(), t.d())?;
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("truncation radius must be positive, got {a}")));
    }
    let values = t.rows().flat_map(|row| truncate(row, a, b)).collect();
    DataMatrix::new(t.n(), t.d(), values)
}
