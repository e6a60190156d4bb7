use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Refuse enumerations larger than this.
pub const MAX_SUBSETS: u128 = 1_000_000;

/// Result of exhaustive sparse eigenvalue search.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseEigen {
    pub value: f64,
    /// Zero-based indices of the maximizing principal submatrix.
    pub support: Vec<usize>,
    /// Unit eigenvector embedded in `R^d`.
    pub vector: Vec<f64>,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - k + pos {
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Maximum of `v^T A v` over k-sparse unit vectors, by enumerating every
/// k-subset of coordinates and taking the top eigenvalue of the principal
/// submatrix. Ties keep the lexicographically first support.
pub fn sparse_max_eigenvalue_bruteforce(a: &DMatrix<f64>, k: usize) -> Result<SparseEigen> {
    let d = a.nrows();
    if !a.is_square() {
        return Err(Error::Input("matrix must be square".into()));
    }
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {d}]")));
    }
    let count = binomial(d, k);
    if count > MAX_SUBSETS {
        return Err(Error::Capacity(format!("C({d}, {k}) = {count} subsets exceeds {MAX_SUBSETS}")));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<SparseEigen> = None;
    loop {
        let sub = DMatrix::from_fn(k, k, |i, j| 0.5 * (a[(idx[i], idx[j])] + a[(idx[j], idx[i])]));
        let eig = sub.symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let value = eig.eigenvalues[top];
        if best.as_ref().is_none_or(|b| value > b.value) {
            let mut vector = vec![0.0; d];
            for (i, &j) in idx.iter().enumerate() {
                vector[j] = eig.eigenvectors[(i, top)];
            }
            best = Some(SparseEigen { value, support: idx.clone(), vector });
        }
        if !next_combination(&mut idx, d) {
            break;
        }
    }
    Ok(best.expect("at least one subset"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 4), 4845);
        assert_eq!(binomial(7, 7), 1);
        assert!(binomial(100, 50) > MAX_SUBSETS);
    }

    #[test]
    fn examples() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let r = sparse_max_eigenvalue_bruteforce(&a, 2).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(r.support.contains(&2));

        // Eigenvalues of [[1, .5], [.5, 1]] are 1.5 and 0.5.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let r = sparse_max_eigenvalue_bruteforce(&a, 2).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
        let v = &r.vector;
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12 && (v[0] - v[1]).abs() < 1e-12);

        let r = sparse_max_eigenvalue_bruteforce(&DMatrix::identity(6, 6), 1).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn refuses_large_enumerations() {
        let a = DMatrix::identity(60, 60);
        assert!(matches!(sparse_max_eigenvalue_bruteforce(&a, 10), Err(Error::Capacity(_))));
    }
}
