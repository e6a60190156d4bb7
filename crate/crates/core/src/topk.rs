//! The l2,k norm and top-k hard thresholding.

use crate::error::{Error, Result};

fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {d}]")));
    }
    Ok(())
}

/// Indices of the `k` largest-magnitude entries. Ties keep the lower index.
pub fn topk_indices(v: &[f64], k: usize) -> Result<Vec<usize>> {
    check_k(k, v.len())?;
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    Ok(idx)
}

/// l2 norm of the `k` largest-magnitude entries of `v`.
pub fn l2k_norm(v: &[f64], k: usize) -> Result<f64> {
    check_k(k, v.len())?;
    let mut sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    if k < sq.len() {
        sq.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    }
    Ok(sq[..k].iter().sum::<f64>().sqrt())
}

/// Zeroes all but the `k` largest-magnitude entries of `v`.
pub fn hard_threshold_topk(v: &[f64], k: usize) -> Result<Vec<f64>> {
    let keep = topk_indices(v, k)?;
    let mut out = vec![0.0; v.len()];
    for i in keep {
        out[i] = v[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn l2k_examples() {
        assert_eq!(l2k_norm(&[3.0, -4.0, 1.0, 0.0], 2).unwrap(), 5.0);
        assert_eq!(l2k_norm(&[0.0, 1.0, 0.0], 1).unwrap(), 1.0);
        assert_eq!(l2k_norm(&[1.0; 4], 4).unwrap(), 2.0);
        assert!(l2k_norm(&[1.0, 2.0], 0).is_err());
        assert!(l2k_norm(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(hard_threshold_topk(&[3.0, -4.0, 1.0, 0.0], 1).unwrap(), vec![0.0, -4.0, 0.0, 0.0]);
        assert_eq!(hard_threshold_topk(&[0.0, 0.0], 2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(hard_threshold_topk(&[2.0, 2.0, 1.0], 2).unwrap(), vec![2.0, 2.0, 0.0]);
        assert_eq!(hard_threshold_topk(&[1.0, -2.0, 2.0, 2.0], 2).unwrap(), vec![0.0, -2.0, 2.0, 0.0]);
    }

    fn l2(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn vec_and_k() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
        (1usize..12).prop_flat_map(|d| {
            (prop::collection::vec(-100.0f64..100.0, d), prop::collection::vec(-100.0f64..100.0, d), 1..=d)
        })
    }

    proptest! {
        #[test]
        fn norm_properties((u, v, k) in vec_and_k()) {
            let n = l2k_norm(&v, k).unwrap();
            prop_assert!(n <= l2(&v) + 1e-9);
            let t = hard_threshold_topk(&v, k).unwrap();
            prop_assert!((n - l2(&t)).abs() <= 1e-9 * (1.0 + n));
            prop_assert!(t.iter().filter(|x| **x != 0.0).count() <= k);
            prop_assert_eq!(hard_threshold_topk(&t, k).unwrap(), t.clone());
            let s: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            prop_assert!(l2k_norm(&s, k).unwrap() <= l2k_norm(&u, k).unwrap() + n + 1e-9);
        }

        #[test]
        fn rounding_guarantee((mu_dense, noise, k) in vec_and_k()) {
            // k-sparse truth: keep the first k entries of mu_dense.
            let mut mu = mu_dense.clone();
            for x in mu.iter_mut().skip(k) {
                *x = 0.0;
            }
            let est: Vec<f64> = mu.iter().zip(&noise).map(|(a, b)| a + b * 0.1).collect();
            let rounded = hard_threshold_topk(&est, k).unwrap();
            let diff: Vec<f64> = rounded.iter().zip(&mu).map(|(a, b)| a - b).collect();
            let err: Vec<f64> = est.iter().zip(&mu).map(|(a, b)| a - b).collect();
            prop_assert!(l2(&diff) <= 3.0 * l2k_norm(&err, k).unwrap() + 1e-9);
        }
    }
}
