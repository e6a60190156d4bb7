use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sparsemean::filter::{score_points, stability_filter, FilterOutcome, MASS_CAP};
use sparsemean::genlab::{sample_clean, CleanFamily, CleanSpec};
use sparsemean::{l2k_norm, DataMatrix, EstimatorConfig, WeightVector};

fn err(a: &[f64], b: &[f64], k: usize) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2k_norm(&diff, k).unwrap()
}

fn assert_trace_invariants(out: &FilterOutcome) {
    let mut last = 0.0;
    for step in &out.trace.steps {
        assert!(step.xk_value >= 0.0);
        let rel = (step.mean_score - step.xk_value).abs() / step.xk_value.max(1e-300);
        assert!(rel <= 1e-6, "mean score {} vs certificate {}", step.mean_score, step.xk_value);
        assert!(step.cumulative_removed >= last);
        assert!(step.cumulative_removed <= MASS_CAP + 1e-12);
        last = step.cumulative_removed;
    }
    assert!(out.removed_mass <= MASS_CAP + 1e-12);
}

#[test]
fn removes_planted_axis_outliers() {
    let (n, d, k) = (5000, 50, 3);
    let cfg = EstimatorConfig::new(0.01, k);
    let mut wins = 0;
    for seed in 0..20 {
        let spec = CleanSpec::new(CleanFamily::GaussianSparseMean, n, d, k, seed);
        let (clean, mu) = sample_clean(&spec).unwrap();
        let mut rows: Vec<Vec<f64>> = clean.rows().map(|r| r.to_vec()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
        for i in rand::seq::index::sample(&mut rng, n, n / 100) {
            rows[i] = mu.clone();
            rows[i][0] += 10.0 * (k as f64).sqrt();
        }
        let t = DataMatrix::from_rows(&rows).unwrap();
        let out = stability_filter(&t, k, 1.0, &cfg).unwrap();
        assert_trace_invariants(&out);
        wins += usize::from(err(&out.mu_hat, &mu, k) <= 0.5 * err(&t.mean(), &mu, k));
    }
    assert!(wins >= 18, "{wins}/20");
}

#[test]
fn raw_spike_sample_hits_mass_cap() {
    let (d, n) = (400, 50);
    let r = (d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![0.0; d];
            row[rng.random_range(0..d)] = if rng.random::<bool>() { r } else { -r };
            row
        })
        .collect();
    let t = DataMatrix::from_rows(&rows).unwrap();
    let out = stability_filter(&t, 4, 1.0, &EstimatorConfig::new(0.01, 4)).unwrap();
    assert!(!out.converged);
    assert!(out.warnings.iter().any(|w| w.contains("removed-mass cap")));
    assert_trace_invariants(&out);
}

#[test]
fn clean_gaussian_loses_little_mass() {
    let (n, d, k) = (2000, 50, 3);
    assert!(n as f64 >= 20.0 * (k * k) as f64 * (d as f64).ln());
    let cfg = EstimatorConfig::new(0.01, k);
    let mut ok = 0;
    for seed in 0..100 {
        let (t, _) = sample_clean(&CleanSpec::new(CleanFamily::GaussianSparseMean, n, d, k, seed)).unwrap();
        let out = stability_filter(&t, k, 1.0, &cfg).unwrap();
        ok += usize::from(out.removed_mass <= 0.02);
    }
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn deterministic() {
    let (t, _) = sample_clean(&CleanSpec::new(CleanFamily::BoundedFourth, 3000, 30, 2, 4)).unwrap();
    let cfg = EstimatorConfig::new(0.01, 2);
    let a = stability_filter(&t, 2, 0.5, &cfg).unwrap();
    let b = stability_filter(&t, 2, 0.5, &cfg).unwrap();
    assert_eq!(a.mu_hat, b.mu_hat);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.weights, b.weights);
}

#[test]
fn rejects_bad_arguments() {
    let t = DataMatrix::constant(10, &[1.0, 2.0]).unwrap();
    let cfg = EstimatorConfig::new(0.01, 1);
    assert!(stability_filter(&t, 3, 1.0, &cfg).is_err());
    assert!(stability_filter(&t, 1, 0.0, &cfg).is_err());
}

proptest! {
    #[test]
    fn scores_are_nearly_nonnegative(seed in 0u64..1000, d in 2usize..7, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..n * d).map(|_| 10.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        let t = DataMatrix::new(n, d, values).unwrap();
        let b = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let psd = &b * b.transpose();
        let m = &psd / psd.trace();
        let mu: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let w = WeightVector::uniform(n).unwrap();
        let scores = score_points(&t, &w, &mu, &m).unwrap();
        let spread = t.rows().map(|r| r.iter().zip(&mu).map(|(x, c)| (x - c).powi(2)).sum::<f64>()).fold(0.0, f64::max);
        for s in scores {
            prop_assert!(s >= -1e-8 * m.norm() * spread);
        }
    }
}
