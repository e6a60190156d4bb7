//! Runs the filter on axis-spike data with and without the l-infinity
//! clamp and reports what the clamp changes.

use sparsemean::filter::stability_filter;
use sparsemean::genlab::{axis_spike_radius, sample_clean, CleanFamily, CleanSpec};
use sparsemean::preprocess::{group_means, truncate_set};
use sparsemean::{error_2k, robust_sparse_mean, EstimatorConfig};

fn main() -> sparsemean::Result<()> {
    let (n, d, k, eps) = (60_000, 256, 4, 0.01);
    let mut spec = CleanSpec::new(CleanFamily::AxisSpike, n, d, k, 1).with_mag(0.0);
    spec.params.t = 4.0;
    let (data, mu) = sample_clean(&spec)?;
    let cfg = EstimatorConfig::new(eps, k).with_seed(1);

    let with = robust_sparse_mean(&data, &cfg)?;
    println!("spike radius r = {:.3}", axis_spike_radius(d, 4.0));
    println!(
        "with truncation:    error_2k = {:.4}, converged = {}, removed = {:.4}",
        error_2k(&with.report.mu_hat, &mu, k)?,
        with.report.converged,
        with.report.removed_mass
    );

    let grouped = group_means(&data, eps, cfg.group_factor, cfg.seed)?;
    let raw = stability_filter(&grouped.grouped, k, grouped.sigma, &cfg)?;
    println!(
        "without truncation: error_2k = {:.4}, converged = {}, removed = {:.4}",
        error_2k(&raw.mu_hat, &mu, k)?,
        raw.converged,
        raw.removed_mass
    );

    let radius = cfg.trunc_factor * grouped.sigma * (k as f64).sqrt();
    let clamped = truncate_set(&grouped.grouped, radius, &with.report.mu_tilde)?;
    let moved = grouped.grouped.rows().zip(clamped.rows()).filter(|(a, b)| a != b).count();
    println!("clamp radius {radius:.3} moved {moved} of {} grouped points", grouped.grouped.n());
    Ok(())
}
