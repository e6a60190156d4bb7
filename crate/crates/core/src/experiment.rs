//! The command implementations behind the `sparsemean` binary.
//!
//! Every command writes its result to the supplied writers and returns a
//! process exit code: 0 for success, 1 for errors, 2 when the estimator
//! finished with warnings and 3 when a diagnostic refused on capacity.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::diagnostics::{check_coordinate_regularity, check_stability};
use crate::error::{Error, Result};
use crate::genlab::{corrupt, sample_clean, AdversarySpec, CleanSpec};
use crate::pipeline::{error_2k, robust_sparse_mean};
use crate::preprocess::median;
use crate::sparse_norms::{xk_entrywise_bound, xk_norm, XkSolverOptions};
use crate::types::{EstimateReport, EstimatorConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARNINGS: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

/// Column order of the trial table.
pub const CSV_HEADER: &str =
    "seed,n,d,k,eps,error_2k_filtered,error_2k_plain_mean,error_2k_comom,removed_mass,runtime_ms";

const ADVERSARY_SALT: u64 = 0xa5a5_5a5a_0f0f_f0f0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub clean: CleanSpec,
    pub adversary: AdversarySpec,
    pub estimator: EstimatorConfig,
    pub trials: usize,
    pub output_path: String,
    /// Sample sizes to sweep; `clean.n` alone when absent.
    #[serde(default)]
    pub sweep_n: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(File::open(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if matches!(&self.sweep_n, Some(v) if v.is_empty()) {
            return Err(Error::Config("sweep_n must not be empty".into()));
        }
        self.estimator.validate(Some(self.clean.d))?;
        if self.estimator.k != self.clean.k {
            return Err(Error::Config(format!(
                "estimator k = {} differs from clean k = {}",
                self.estimator.k, self.clean.k
            )));
        }
        Ok(())
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        self.sweep_n.clone().unwrap_or_else(|| vec![self.clean.n])
    }
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    #[serde(flatten)]
    report: &'a EstimateReport,
    mu_sparse: &'a [f64],
}

fn load_estimator_config(path: &Path) -> Result<EstimatorConfig> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

fn fail(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    match e {
        Error::Capacity(_) => EXIT_CAPACITY,
        _ => EXIT_ERROR,
    }
}

/// Runs the estimator on one data file and prints the report as JSON.
pub fn cmd_estimate(data_path: &Path, config_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let run = || -> Result<(String, bool)> {
        let data = DataMatrix::load(data_path)?;
        let cfg = load_estimator_config(config_path)?;
        let result = robust_sparse_mean(&data, &cfg)?;
        let clean = result.report.converged && result.report.warnings.is_empty();
        let json =
            serde_json::to_string_pretty(&EstimateOutput { report: &result.report, mu_sparse: &result.mu_sparse })?;
        Ok((json, clean))
    };
    match run() {
        Ok((json, clean)) => {
            if writeln!(out, "{json}").is_err() {
                return EXIT_ERROR;
            }
            if clean {
                EXIT_OK
            } else {
                EXIT_WARNINGS
            }
        }
        Err(e) => fail(err, &e),
    }
}

#[derive(Clone, Debug, Default)]
pub struct SimulateOptions {
    /// Worker threads; 1 when zero.
    pub jobs: usize,
    /// Overrides `output_path`; `-` means the `out` writer.
    pub output: Option<PathBuf>,
    /// Replaces the base seed `clean.seed`.
    pub seed: Option<u64>,
    /// Writes `runtime_ms = 0` so tables are byte-reproducible.
    pub no_timing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub eps: f64,
    pub error_2k_filtered: f64,
    pub error_2k_plain_mean: f64,
    pub error_2k_comom: f64,
    pub removed_mass: f64,
    pub runtime_ms: f64,
    pub warnings: usize,
}

impl TrialRow {
    fn csv_line(&self, seed_field: &str) -> String {
        format!(
            "{seed_field},{},{},{},{:?},{:?},{:?},{:?},{:?},{:.3}",
            self.n,
            self.d,
            self.k,
            self.eps,
            self.error_2k_filtered,
            self.error_2k_plain_mean,
            self.error_2k_comom,
            self.removed_mass,
            self.runtime_ms
        )
    }
}

/// One simulated trial: sample, corrupt, estimate and score against the
/// plain mean and the coordinate-wise median-of-means baselines.
pub fn run_trial(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<TrialRow> {
    let start = Instant::now();
    let spec = CleanSpec { n, seed, ..cfg.clean.clone() };
    let (clean, mu) = sample_clean(&spec)?;
    let data = corrupt(&clean, &mu, &cfg.adversary, spec.k, seed ^ ADVERSARY_SALT)?;
    let est = cfg.estimator.clone().with_seed(seed);
    let k = est.k;
    let result = robust_sparse_mean(&data, &est)?;
    let plain = data.mean();
    Ok(TrialRow {
        seed,
        n,
        d: spec.d,
        k,
        eps: est.eps,
        error_2k_filtered: error_2k(&result.report.mu_hat, &mu, k)?,
        error_2k_plain_mean: error_2k(&plain, &mu, k)?,
        error_2k_comom: error_2k(&result.report.mu_tilde, &mu, k)?,
        removed_mass: result.report.removed_mass,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings: result.report.warnings.len() + usize::from(!result.report.converged),
    })
}

/// Runs every `(n, trial)` pair, `jobs` at a time, and returns the rows in
/// trial order.
pub fn run_trials(cfg: &ExperimentConfig, base_seed: u64, jobs: usize) -> Result<Vec<TrialRow>> {
    let tasks: Vec<(usize, u64)> = cfg
        .sample_sizes()
        .into_iter()
        .flat_map(|n| (0..cfg.trials as u64).map(move |t| (n, base_seed.wrapping_add(t))))
        .collect();
    let slots: Vec<Mutex<Option<Result<TrialRow>>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, seed)) = tasks.get(i) else { break };
                let row = run_trial(cfg, n, seed);
                *slots[i].lock().expect("poisoned slot") = Some(row);
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("poisoned slot").expect("every task ran")).collect()
}

/// Medians of every numeric column over `rows`.
pub fn summary_row(rows: &[TrialRow]) -> TrialRow {
    let med = |f: fn(&TrialRow) -> f64| median(&mut rows.iter().map(f).collect::<Vec<_>>());
    TrialRow {
        seed: 0,
        n: rows[0].n,
        d: rows[0].d,
        k: rows[0].k,
        eps: rows[0].eps,
        error_2k_filtered: med(|r| r.error_2k_filtered),
        error_2k_plain_mean: med(|r| r.error_2k_plain_mean),
        error_2k_comom: med(|r| r.error_2k_comom),
        removed_mass: med(|r| r.removed_mass),
        runtime_ms: med(|r| r.runtime_ms),
        warnings: rows.iter().map(|r| r.warnings).sum(),
    }
}

/// Writes the trial table: trial rows for each sample size followed by a
/// `median` row for that size.
pub fn write_table(rows: &[TrialRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let mut start = 0;
    while start < rows.len() {
        let n = rows[start].n;
        let end = start + rows[start..].iter().take_while(|r| r.n == n).count();
        for row in &rows[start..end] {
            writeln!(w, "{}", row.csv_line(&row.seed.to_string()))?;
        }
        writeln!(w, "{}", summary_row(&rows[start..end]).csv_line("median"))?;
        start = end;
    }
    Ok(())
}

/// Runs a seeded simulation or sweep and writes the trial table.
pub fn cmd_simulate(config_path: &Path, opts: &SimulateOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut run = || -> Result<usize> {
        let cfg = ExperimentConfig::from_path(config_path)?;
        let base = opts.seed.unwrap_or(cfg.clean.seed);
        let mut rows = run_trials(&cfg, base, opts.jobs)?;
        if opts.no_timing {
            for row in &mut rows {
                row.runtime_ms = 0.0;
            }
        }
        let target = opts.output.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_path));
        if target.as_os_str() == "-" {
            write_table(&rows, &mut *out)?;
        } else {
            let mut file = BufWriter::new(File::create(&target)?);
            write_table(&rows, &mut file)?;
            file.flush()?;
        }
        Ok(rows.iter().map(|r| r.warnings).sum())
    };
    match run() {
        Ok(0) => EXIT_OK,
        Ok(w) => {
            let _ = writeln!(err, "warning: {w} trial warnings (unconverged filters or dropped rows)");
            EXIT_WARNINGS
        }
        Err(e) => fail(err, &e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnoseMode {
    Stability,
    Regularity,
    Xk,
}

impl std::str::FromStr for DiagnoseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stability" => Ok(Self::Stability),
            "regularity" => Ok(Self::Regularity),
            "xk" => Ok(Self::Xk),
            other => Err(Error::Config(format!("unknown mode {other:?}; expected stability, regularity or xk"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnoseParams {
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub sigma: f64,
    pub a: f64,
    pub alpha: f64,
    /// Reference mean; the origin when absent.
    pub mu: Option<Vec<f64>>,
}

impl Default for DiagnoseParams {
    fn default() -> Self {
        Self { k: 1, eps: 0.01, delta: 0.1, sigma: 1.0, a: 1.0, alpha: 0.01, mu: None }
    }
}

#[derive(Serialize)]
struct XkOutput {
    value: f64,
    k: usize,
    entrywise_bound: f64,
    certificate: Vec<Vec<f64>>,
}

fn diagnose(data: &DataMatrix, mode: DiagnoseMode, p: &DiagnoseParams) -> Result<String> {
    let mu = p.mu.clone().unwrap_or_else(|| vec![0.0; data.d()]);
    let json = match mode {
        DiagnoseMode::Stability => {
            serde_json::to_string_pretty(&check_stability(data, &mu, p.sigma, p.eps, p.delta, p.k)?)?
        }
        DiagnoseMode::Regularity => {
            serde_json::to_string_pretty(&check_coordinate_regularity(data, &mu, p.a, p.alpha)?)?
        }
        DiagnoseMode::Xk => {
            if data.n() != data.d() {
                return Err(Error::Input(format!("xk mode needs a square matrix, got {}x{}", data.n(), data.d())));
            }
            let a = nalgebra::DMatrix::from_row_slice(data.n(), data.d(), data.values());
            let opts = XkSolverOptions { tol: 1e-8, max_iters: 20_000, ..XkSolverOptions::default() };
            let cert = xk_norm(&a, p.k, &opts)?;
            serde_json::to_string_pretty(&XkOutput {
                value: cert.value,
                k: p.k,
                entrywise_bound: xk_entrywise_bound(&a, p.k)?,
                certificate: cert.matrix_rows(),
            })?
        }
    };
    Ok(json)
}

/// Runs one of the diagnostic oracles on a data file and prints its verdict.
pub fn cmd_diagnose(
    data_path: &Path,
    mode: DiagnoseMode,
    params: &DiagnoseParams,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match DataMatrix::load(data_path).and_then(|data| diagnose(&data, mode, params)) {
        Ok(json) => match writeln!(out, "{json}") {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_ERROR,
        },
        Err(e) => fail(err, &e),
    }
}
