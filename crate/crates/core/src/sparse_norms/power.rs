//! Truncated power iteration for k-sparse leading eigenvectors.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::topk::topk_indices;

pub(crate) struct SparseAtom {
    pub v: DVector<f64>,
    pub value: f64,
}

impl SparseAtom {
    pub fn support(&self) -> Vec<usize> {
        (0..self.v.len()).filter(|&i| self.v[i] != 0.0).collect()
    }
}

fn truncate_normalize(y: &DVector<f64>, k: usize) -> Option<DVector<f64>> {
    let keep = topk_indices(y.as_slice(), k).ok()?;
    let mut v = DVector::zeros(y.len());
    for i in keep {
        v[i] = y[i];
    }
    let norm = v.norm();
    (norm > 0.0).then(|| v / norm)
}

/// Row scores `B_jj + (sum of the k-1 largest |B_ij|, i != j)`, used to rank
/// coordinates for starts and for the working set.
pub(crate) fn row_scores(b: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let d = b.nrows();
    (0..d)
        .map(|j| {
            let mut off: Vec<f64> = (0..d).filter(|&i| i != j).map(|i| b[(i, j)].abs()).collect();
            off.sort_by(|a, b| b.total_cmp(a));
            b[(j, j)] + off.iter().take(k.saturating_sub(1)).sum::<f64>()
        })
        .collect()
}

pub(crate) fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Runs truncated power iteration from `2 * restarts` top-scored axis starts
/// and `restarts` seeded Gaussian starts. Atoms come back best first.
pub(crate) fn sparse_atoms(b: &DMatrix<f64>, k: usize, restarts: usize, scores: &[f64]) -> Vec<SparseAtom> {
    let d = b.nrows();
    // Gershgorin shift makes B + cI PSD so each step is an ascent step.
    let shift = (0..d)
        .map(|i| b[(i, i)] - (0..d).filter(|&j| j != i).map(|j| b[(i, j)].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .min(0.0)
        .abs();

    let mut starts: Vec<DVector<f64>> = ranked(scores)
        .into_iter()
        .take(2 * restarts.max(1))
        .map(|j| {
            let mut e = DVector::zeros(d);
            e[j] = 1.0;
            // Seed with the row so the first step already sees the off-diagonal mass.
            let row = b.column(j) + e.clone() * shift;
            truncate_normalize(&row.into_owned(), k).unwrap_or(e)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..restarts {
        let g = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
        if let Some(v) = truncate_normalize(&g, k) {
            starts.push(v);
        }
    }

    let mut atoms: Vec<SparseAtom> = starts
        .into_iter()
        .map(|mut v| {
            for _ in 0..200 {
                let y = b * &v + &v * shift;
                let Some(next) = truncate_normalize(&y, k) else { break };
                let change = (&next - &v).norm();
                v = next;
                if change < 1e-12 {
                    break;
                }
            }
            let value = v.dot(&(b * &v));
            SparseAtom { v, value }
        })
        .collect();
    atoms.sort_by(|a, b| b.value.total_cmp(&a.value));
    atoms
}
