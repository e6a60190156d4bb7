//! Computes the X_k norm of a planted sparse spike and brackets it between
//! the exhaustive sparse eigenvalue and the entrywise bound.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sparsemean::sparse_norms::sparse_max_eigenvalue_bruteforce;
use sparsemean::{xk_entrywise_bound, xk_norm, XkSolverOptions};

fn main() -> sparsemean::Result<()> {
    let (d, k) = (16, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let mut a = (&noise + noise.transpose()) * 0.05;
    let mut v = DVector::<f64>::zeros(d);
    for j in [2, 7, 11] {
        v[j] = 1.0 / 3f64.sqrt();
    }
    a += &v * v.transpose() * 2.0;

    let cert = xk_norm(&a, k, &XkSolverOptions::default())?;
    cert.check_feasible(k)?;
    let exact = sparse_max_eigenvalue_bruteforce(&a, k)?;
    let upper = xk_entrywise_bound(&a, k)?;
    println!("best {k}-sparse eigenvalue {:.6} on support {:?}", exact.value, exact.support);
    println!("X_{k} norm                 {:.6}", cert.value);
    println!("entrywise bound            {upper:.6}");
    let mass: Vec<(usize, f64)> = (0..d).map(|i| (i, cert.m[(i, i)])).filter(|&(_, m)| m > 1e-3).collect();
    println!("certificate diagonal mass {mass:?}");
    Ok(())
}
