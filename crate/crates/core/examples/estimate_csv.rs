//! Round-trips a corrupted sample through CSV and estimates its mean.
//!
//! Run with `cargo run --release --example estimate_csv`.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use sparsemean::genlab::{corrupt, sample_clean, AdversaryKind, AdversarySpec, CleanFamily, CleanSpec};
use sparsemean::{error_2k, robust_sparse_mean, DataMatrix, EstimatorConfig};

fn main() -> sparsemean::Result<()> {
    let (n, d, k, eps) = (20_000, 100, 4, 0.01);
    let spec = CleanSpec::new(CleanFamily::GaussianSparseMean, n, d, k, 11);
    let (clean, mu) = sample_clean(&spec)?;
    let data = corrupt(&clean, &mu, &AdversarySpec::new(AdversaryKind::SparseShift, eps), k, 12)?;

    let path = std::env::temp_dir().join("sparsemean_example.csv");
    data.write_csv(BufWriter::new(File::create(&path)?))?;
    let loaded = DataMatrix::read_csv(BufReader::new(File::open(&path)?))?;
    assert_eq!(loaded, data);

    let cfg = EstimatorConfig::new(eps, k).with_seed(3);
    let result = robust_sparse_mean(&loaded, &cfg)?;
    let report = &result.report;
    println!("wrote and reloaded {n} x {d} samples via {}", path.display());
    println!(
        "sigma = {:.4}, filter rounds = {}, removed mass = {:.4}",
        report.sigma, report.iterations, report.removed_mass
    );
    println!("converged = {}", report.converged);
    println!("error_2k of sample mean      = {:.4}", error_2k(&loaded.mean(), &mu, k)?);
    println!("error_2k of filtered estimate = {:.4}", error_2k(&report.mu_hat, &mu, k)?);
    let support: Vec<usize> = (0..d).filter(|&j| result.mu_sparse[j] != 0.0).collect();
    let truth: Vec<usize> = (0..d).filter(|&j| mu[j] != 0.0).collect();
    println!("rounded support {support:?}, true support {truth:?}");
    std::fs::remove_file(path)?;
    Ok(())
}
