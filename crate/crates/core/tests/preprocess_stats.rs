use sparsemean::genlab::{sample_clean, CleanFamily, CleanSpec};
use sparsemean::preprocess::{coordinatewise_median_of_means, group_means, truncate_set};
use sparsemean::DataMatrix;

fn axis_variances(t: &DataMatrix) -> Vec<f64> {
    let mean = t.mean();
    let mut var = vec![0.0; t.d()];
    for row in t.rows() {
        for j in 0..t.d() {
            var[j] += (row[j] - mean[j]).powi(2);
        }
    }
    var.iter().map(|v| v / t.n() as f64).collect()
}

#[test]
fn median_of_means_monte_carlo() {
    let mut hits = 0;
    for seed in 0..100 {
        let spec = CleanSpec::new(CleanFamily::GaussianSparseMean, 2000, 10, 3, seed).with_mag(2.0);
        let (data, mu) = sample_clean(&spec).unwrap();
        let est = coordinatewise_median_of_means(&data, 40, seed + 1000).unwrap();
        let linf = est.iter().zip(&mu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        hits += usize::from(linf <= 0.5);
    }
    assert!(hits >= 95, "{hits}/100 within 0.5");
}

#[test]
fn grouping_divides_variance_by_group_size() {
    let spec = CleanSpec::new(CleanFamily::BoundedFourth, 40_000, 5, 2, 4);
    let (data, _) = sample_clean(&spec).unwrap();
    let grouped = group_means(&data, 0.005, 100.0, 9).unwrap();
    assert_eq!(grouped.grouped.n(), 20_000);
    assert_eq!(grouped.m, 2);
    let before = axis_variances(&data);
    let after = axis_variances(&grouped.grouped);
    for (b, a) in before.iter().zip(&after) {
        let ratio = a * grouped.m as f64 / b;
        assert!((1.0 / 1.5..=1.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn group_size_examples() {
    let data = DataMatrix::new(10_000, 1, (0..10_000).map(f64::from).collect()).unwrap();
    let g = group_means(&data, 0.001, 100.0, 0).unwrap();
    assert_eq!((g.grouped.n(), g.m), (1000, 10));
    assert!((g.sigma - 0.316228).abs() < 1e-6);
    assert!(g.warnings.is_empty());
}

#[test]
fn truncated_axis_spike_lies_in_box() {
    let (d, k) = (400, 4);
    let mut spec = CleanSpec::new(CleanFamily::AxisSpike, 5000, d, k, 2).with_mag(0.0);
    spec.params.t = 2.0;
    let (data, _) = sample_clean(&spec).unwrap();
    let grouped = group_means(&data, 0.01, 10.0, 3).unwrap();
    let a = 4.0 * grouped.sigma * (k as f64).sqrt();
    let center = vec![0.0; d];
    let out = truncate_set(&grouped.grouped, a, &center).unwrap();
    assert_eq!((out.n(), out.d()), (grouped.grouped.n(), d));
    for row in out.rows() {
        assert!(row.iter().all(|x| x.abs() <= a));
    }
    assert_eq!(truncate_set(&grouped.grouped, 1e12, &center).unwrap(), grouped.grouped);
}
