//! A small seeded sweep over sample sizes, printed as the same CSV table
//! the `sparsemean simulate` command writes.

use sparsemean::experiment::{run_trials, write_table, ExperimentConfig};
use sparsemean::genlab::{AdversaryKind, AdversarySpec, CleanFamily, CleanSpec};
use sparsemean::EstimatorConfig;

fn main() -> sparsemean::Result<()> {
    let (d, k, eps) = (60, 3, 0.01);
    let cfg = ExperimentConfig {
        clean: CleanSpec::new(CleanFamily::GaussianSparseMean, 5000, d, k, 100),
        adversary: AdversarySpec::new(AdversaryKind::SparseShift, eps),
        estimator: EstimatorConfig::new(eps, k),
        trials: 5,
        output_path: "-".into(),
        sweep_n: Some(vec![2000, 8000, 32000]),
    };
    cfg.validate()?;
    let jobs = std::thread::available_parallelism().map_or(1, |p| p.get());
    let rows = run_trials(&cfg, cfg.clean.seed, jobs)?;
    write_table(&rows, std::io::stdout().lock())
}
