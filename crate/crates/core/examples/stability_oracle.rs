//! Exhaustive stability checks on tiny point sets, plus the rounding from
//! weights to a large subset.

use sparsemean::diagnostics::{check_stability, weights_to_subset};
use sparsemean::{DataMatrix, WeightVector};

fn main() -> sparsemean::Result<()> {
    let s = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]])?;
    for delta in [0.35, 0.40, 0.41, 0.5] {
        let v = check_stability(&s, &[0.0, 0.0], 1.0, 0.25, delta, 1)?;
        println!(
            "delta = {delta:.2}: stable = {:5}, worst subset {:?}, mean dev {:.4}, cov dev {:.4}",
            v.stable, v.worst_subset, v.worst_mean_dev, v.worst_cov_dev
        );
    }

    let n = 10;
    let eps = 0.1;
    let cap = 1.0 / ((1.0 - eps) * n as f64);
    let mut w = vec![cap; 8];
    let rest = (1.0 - 8.0 * cap) / 2.0;
    w.extend([rest, rest]);
    let w = WeightVector::new(w)?;
    let points = DataMatrix::new(n, 1, (0..n).map(|i| i as f64).collect())?;
    println!("weights {:?}", w.as_slice());
    println!("kept subset {:?}", weights_to_subset(&points, &w, eps)?);
    Ok(())
}
