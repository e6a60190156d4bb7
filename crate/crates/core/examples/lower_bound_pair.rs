//! The two-point construction that no estimator can tell apart: a point
//! mass at the origin, and the same with an `eps` fraction moved to a
//! spread-out sparse point.

use sparsemean::genlab::{corrupt, lb_pair_description, AdversaryKind, AdversarySpec};
use sparsemean::{error_2k, robust_sparse_mean, DataMatrix, EstimatorConfig};

fn main() -> sparsemean::Result<()> {
    let (n, d, k, eps) = (20_000, 40, 10, 0.01);
    let pair = lb_pair_description(d, k, eps)?;
    println!("alpha = {:.6}, mean gap = {}, tv = {}", pair.alpha, pair.mean_gap_2k, pair.tv);

    let mu = vec![0.0; d];
    let clean = DataMatrix::constant(n, &mu)?;
    let shifted = corrupt(&clean, &mu, &AdversarySpec::new(AdversaryKind::LbPair, eps), k, 9)?;
    let cfg = EstimatorConfig::new(eps, k).with_seed(9);
    for (name, data) in [("D1", &clean), ("D2", &shifted)] {
        let est = robust_sparse_mean(data, &cfg)?;
        println!(
            "{name}: error_2k against the origin = {:.4}, sample-mean gap = {:.4}",
            error_2k(&est.report.mu_hat, &mu, k)?,
            error_2k(&data.mean(), &mu, k)?
        );
    }
    Ok(())
}
