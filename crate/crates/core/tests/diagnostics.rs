use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sparsemean::diagnostics::{check_coordinate_regularity, check_stability, regularity_holds, weights_to_subset};
use sparsemean::genlab::{sample_clean, CleanFamily, CleanSpec};
use sparsemean::{xk_norm, DataMatrix, WeightVector, XkSolverOptions};

/// A random point of the capped simplex `{w : sum w = 1, 0 <= w_i <= 1/((1-eps)n)}`.
fn capped_weights(n: usize, eps: f64, rng: &mut impl Rng) -> WeightVector {
    let cap = 1.0 / ((1.0 - eps) * n as f64);
    let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3) + 1e-6).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    loop {
        let excess: f64 = w.iter().map(|x| (x - cap).max(0.0)).sum();
        if excess <= 1e-15 {
            break;
        }
        w.iter_mut().for_each(|x| *x = x.min(cap));
        let room: f64 = w.iter().map(|x| cap - x).sum();
        w.iter_mut().for_each(|x| *x += excess * (cap - *x) / room);
    }
    WeightVector::new(w).unwrap()
}

fn gaussian_points(n: usize, d: usize, rng: &mut impl Rng) -> DataMatrix {
    DataMatrix::new(n, d, (0..n * d).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

#[test]
fn rounded_subset_keeps_heavy_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.random_range(2..=20);
        let eps = rng.random_range(0.01..0.25);
        let w = capped_weights(n, eps, &mut rng);
        assert!(w.in_capped_simplex(eps));
        let s = gaussian_points(n, 1, &mut rng);
        let subset = weights_to_subset(&s, &w, eps).unwrap();
        assert_eq!(subset.len(), ((1.0 - 2.0 * eps) * n as f64 - 1e-9).ceil() as usize);
        assert!(subset.windows(2).all(|p| p[0] < p[1]));
        let floor = 1.0 / (2.0 * (1.0 - eps) * n as f64);
        for &i in &subset {
            assert!(w.as_slice()[i] >= floor - 1e-12);
        }
    }
}

#[test]
fn rounded_subset_of_low_variance_weighting_is_stable() {
    let (n, d, k, eps) = (8, 2, 1, 0.125);
    let delta = 4.0 * (2f64.sqrt() + 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    while checked < 20 {
        let s = gaussian_points(n, d, &mut rng);
        let w = capped_weights(n, eps, &mut rng);
        let mut second = nalgebra::DMatrix::<f64>::zeros(d, d);
        for (row, wi) in s.rows().zip(w.as_slice()) {
            let x = nalgebra::DVector::from_column_slice(row);
            second += &x * x.transpose() * *wi;
        }
        if xk_norm(&second, k, &XkSolverOptions::default()).unwrap().value > 2.0 {
            continue;
        }
        let subset = weights_to_subset(&s, &w, eps).unwrap();
        assert_eq!(subset.len(), 6);
        let kept = s.select_rows(&subset).unwrap();
        let verdict = check_stability(&kept, &[0.0; 2], 1.0, eps, delta, k).unwrap();
        assert!(verdict.stable, "{verdict:?}");
        checked += 1;
    }
}

#[test]
fn stability_is_monotone_in_delta_and_eps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..15 {
        let s = gaussian_points(9, 3, &mut rng);
        let mu = [0.0; 3];
        let deltas = [0.3, 0.6, 1.0, 2.0, 4.0];
        let verdicts: Vec<bool> =
            deltas.iter().map(|&d| check_stability(&s, &mu, 1.0, 0.2, d, 2).unwrap().stable).collect();
        for pair in verdicts.windows(2) {
            assert!(!pair[0] || pair[1]);
        }
        for delta in deltas {
            let loose = check_stability(&s, &mu, 1.0, 0.1, delta, 2).unwrap();
            let strict = check_stability(&s, &mu, 1.0, 0.3, delta, 2).unwrap();
            assert!(!strict.stable || loose.stable);
            assert!(strict.subsets_checked >= loose.subsets_checked);
        }
    }
}

#[test]
fn stability_centers_at_the_reference_mean() {
    // Two points at 1 and 3: each subset's own covariance is small, but the
    // second moment around 0 is not.
    let s = DataMatrix::from_rows(&[vec![1.0], vec![3.0]]).unwrap();
    let v = check_stability(&s, &[0.0], 1.0, 0.1, 0.5, 1).unwrap();
    assert_eq!(v.subsets_checked, 1);
    assert!((v.worst_cov_dev - 4.0).abs() < 1e-12);
    assert!((v.worst_mean_dev - 2.0).abs() < 1e-12);
}

#[test]
fn heavy_tailed_regularity_monte_carlo() {
    let k = 16usize;
    let a = 4.0 * (k as f64).sqrt();
    let alpha = (k as f64).powf(-1.5) / 3.0;
    let mut feasible = 0;
    for seed in 0..100 {
        let spec = CleanSpec::new(CleanFamily::BoundedFourth, 1_000_000, k, k, seed);
        let (data, mu) = sample_clean(&spec).unwrap();
        let v = check_coordinate_regularity(&data, &mu, a, alpha).unwrap();
        if v.feasible {
            assert!(regularity_holds(&data, &mu, a, alpha, &v.subset).unwrap());
            feasible += 1;
        }
    }
    assert!(feasible >= 95, "{feasible}/100");
}

proptest! {
    #[test]
    fn feasible_verdicts_are_verified(seed in 0u64..500, n in 20usize..300, alpha in 0.001f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = DataMatrix::new(n, 3, (0..n * 3).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect()).unwrap();
        let v = check_coordinate_regularity(&s, &[0.0; 3], 4.0, alpha).unwrap();
        if v.feasible {
            prop_assert!(regularity_holds(&s, &[0.0; 3], 4.0, alpha, &v.subset).unwrap());
        }
        prop_assert!(v.subset.len() as f64 >= 0.99 * n as f64 - 1.0);
    }
}
