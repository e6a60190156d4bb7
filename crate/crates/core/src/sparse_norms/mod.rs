//! The X_k matrix norm
//!
//! `X_k = {M : M >= 0, tr M = 1, sum |M_ij| <= k}` is the standard convex
//! relaxation of `{v v^T : v k-sparse, |v|_2 = 1}`, and
//! `|A|_{X_k} = sup_{M in X_k} |A . M|`.
//!
//! [`xk_norm`] returns a feasible certificate `M` whose objective is within
//! `tol * |A|_F` of the supremum on the solved coordinates. Two cheap oracles
//! bracket it: [`sparse_max_eigenvalue_bruteforce`] from below and
//! [`xk_entrywise_bound`] from above.

mod admm;
mod bruteforce;
mod power;
pub(crate) mod proj;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub(crate) use bruteforce::{binomial, next_combination};
pub use bruteforce::{sparse_max_eigenvalue_bruteforce, SparseEigen, MAX_SUBSETS};

use crate::error::{Error, Result};
use crate::types::XkCertificate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XkSolverOptions {
    /// Target duality gap, relative to `|A|_F`.
    pub tol: f64,
    pub max_iters: usize,
    /// Random starts for the rank-one search (axis starts come on top).
    pub restarts: usize,
    /// Above this dimension the convex solve runs on a principal submatrix
    /// picked from the rank-one supports and row scores. The certificate
    /// stays feasible for the full problem.
    pub working_set: usize,
}

impl Default for XkSolverOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iters: 2000, restarts: 3, working_set: 64 }
    }
}

impl XkSolverOptions {
    pub fn new(tol: f64, max_iters: usize) -> Self {
        Self { tol, max_iters, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iters == 0 || self.working_set == 0 {
            return Err(Error::Parameter("solver needs tol > 0, max_iters >= 1, working_set >= 1".into()));
        }
        Ok(())
    }
}

/// Validates and symmetrizes the query matrix.
pub(crate) fn symmetric_input(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Input(format!("expected a non-empty square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let asym = (a - a.transpose()).amax();
    if asym > 1e-9 {
        return Err(Error::Input(format!("matrix is not symmetric (max asymmetry {asym:e})")));
    }
    Ok((a + a.transpose()) * 0.5)
}

fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, {d}]")));
    }
    Ok(())
}

fn axis(d: usize, i: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, i)] = 1.0;
    m
}

/// Maximizes `<b, M>` over `X_k` (one side). Returns a feasible `M`.
fn maximize(b: &DMatrix<f64>, k: usize, opts: &XkSolverOptions) -> DMatrix<f64> {
    let d = b.nrows();
    let best_diag = admm::best_diagonal(b);
    if k == 1 {
        // X_1 is the set of diagonal matrices on the simplex.
        return axis(d, best_diag);
    }

    let scores = power::row_scores(b, k);
    let atoms = power::sparse_atoms(b, k, opts.restarts, &scores);

    let ws: Vec<usize> = if d <= opts.working_set {
        (0..d).collect()
    } else {
        let mut chosen = vec![false; d];
        let mut count = 0;
        for atom in atoms.iter().take(3) {
            for i in atom.support() {
                if !chosen[i] {
                    chosen[i] = true;
                    count += 1;
                }
            }
        }
        if !chosen[best_diag] {
            chosen[best_diag] = true;
            count += 1;
        }
        for j in power::ranked(&scores) {
            if count >= opts.working_set {
                break;
            }
            if !chosen[j] {
                chosen[j] = true;
                count += 1;
            }
        }
        (0..d).filter(|&i| chosen[i]).collect()
    };
    let sub = b.select_rows(&ws).select_columns(&ws);
    let local = |global: usize| ws.binary_search(&global).ok();

    let mut init = axis(ws.len(), local(best_diag).expect("best diagonal is in the working set"));
    if let Some(atom) = atoms.first() {
        let support = atom.support();
        if atom.value > b[(best_diag, best_diag)] && support.iter().all(|&i| local(i).is_some()) {
            let v = nalgebra::DVector::from_iterator(ws.len(), ws.iter().map(|&i| atom.v[i]));
            init = &v * v.transpose();
        }
    }

    let sub_m = {
        let eig = sub.clone().symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(top);
        let l1 = v.iter().map(|x| x.abs()).sum::<f64>();
        if l1 * l1 <= k as f64 {
            // The leading eigenvector is already feasible, hence optimal.
            v * v.transpose()
        } else {
            let out = admm::solve(&sub, k as f64, &init, opts.tol, opts.max_iters);
            debug_assert!(out.lower <= out.upper + 1e-9 * (1.0 + out.upper.abs()));
            out.m
        }
    };

    let mut m = DMatrix::zeros(d, d);
    for (a, &i) in ws.iter().enumerate() {
        for (c, &j) in ws.iter().enumerate() {
            m[(i, j)] = sub_m[(a, c)];
        }
    }
    let mut best_value = b.dot(&m);
    if let Some(atom) = atoms.first() {
        if atom.value > best_value {
            m = &atom.v * atom.v.transpose();
            best_value = atom.value;
        }
    }
    if b[(best_diag, best_diag)] > best_value {
        m = axis(d, best_diag);
    }
    m
}

/// Computes `sup_{M in X_k} |A . M|` with a feasible certificate.
///
/// Both `A` and `-A` are maximized and the better side is returned. Inputs
/// within 1e-9 of symmetric are symmetrized; anything else is rejected.
pub fn xk_norm(a: &DMatrix<f64>, k: usize, opts: &XkSolverOptions) -> Result<XkCertificate> {
    let a = symmetric_input(a)?;
    let d = a.nrows();
    check_k(k, d)?;
    opts.validate()?;
    let fro = a.norm();
    if fro == 0.0 {
        return Ok(XkCertificate { m: axis(d, 0), value: 0.0 });
    }
    let b = &a / fro;
    let pos = maximize(&b, k, opts);
    let neg = maximize(&(-&b), k, opts);
    let (vp, vn) = (a.dot(&pos), -a.dot(&neg));
    let m = if vp >= vn { pos } else { neg };
    let value = a.dot(&m).abs();
    Ok(XkCertificate { m, value })
}

/// `max_i |A_ii| + k max_{i != j} |A_ij|`, an upper bound on `|A|_{X_k}`.
pub fn xk_entrywise_bound(a: &DMatrix<f64>, k: usize) -> Result<f64> {
    let a = symmetric_input(a)?;
    let d = a.nrows();
    let mut diag: f64 = 0.0;
    let mut off: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                diag = diag.max(a[(i, j)].abs());
            } else {
                off = off.max(a[(i, j)].abs());
            }
        }
    }
    Ok(diag + k as f64 * off)
}

/// Largest absolute eigenvalue.
pub fn spectral_norm(a: &DMatrix<f64>) -> Result<f64> {
    let a = symmetric_input(a)?;
    Ok(a.symmetric_eigenvalues().amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn opts() -> XkSolverOptions {
        XkSolverOptions::default()
    }

    #[test]
    fn identity_gives_one() {
        let c = xk_norm(&DMatrix::identity(3, 3), 2, &opts()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        c.check_feasible(2).unwrap();
    }

    #[test]
    fn sparse_rank_one() {
        let s = 0.5f64.sqrt();
        let v = DVector::from_vec(vec![s, s, 0.0]);
        let a = &v * v.transpose();
        let c = xk_norm(&a, 2, &opts()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-8, "{}", c.value);
        c.check_feasible(2).unwrap();
    }

    #[test]
    fn diagonal_negative_side() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -5.0, 1.0]));
        let c = xk_norm(&a, 1, &opts()).unwrap();
        assert_eq!(c.value, 5.0);
        c.check_feasible(1).unwrap();
        let c = xk_norm(&a, 3, &opts()).unwrap();
        assert!((c.value - 5.0).abs() < 1e-8);
    }

    #[test]
    fn zero_matrix() {
        let c = xk_norm(&DMatrix::zeros(4, 4), 2, &opts()).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.m[(0, 0)], 1.0);
    }

    #[test]
    fn input_errors() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(xk_norm(&a, 1, &opts()), Err(Error::Input(_))));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 1.0]);
        assert!(matches!(xk_norm(&a, 1, &opts()), Err(Error::Input(_))));
        assert!(matches!(xk_norm(&DMatrix::identity(2, 2), 3, &opts()), Err(Error::Parameter(_))));
        // Tiny asymmetry is tolerated.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1e-12, 0.0, 1.0]);
        assert!(xk_norm(&a, 1, &opts()).is_ok());
    }

    #[test]
    fn entrywise_bound_examples() {
        assert_eq!(xk_entrywise_bound(&DMatrix::identity(3, 3), 2).unwrap(), 1.0);
        assert_eq!(xk_entrywise_bound(&DMatrix::from_element(3, 3, 1.0), 2).unwrap(), 3.0);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -5.0, 1.0]));
        assert_eq!(xk_entrywise_bound(&a, 1).unwrap(), 5.0);
    }

    #[test]
    fn all_ones_matrix() {
        // J . M <= |M|_1 <= k, attained by the uniform k-sparse vector.
        let a = DMatrix::from_element(5, 5, 1.0);
        let c = xk_norm(&a, 3, &opts()).unwrap();
        assert!((c.value - 3.0).abs() < 1e-4 * a.norm(), "{}", c.value);
        c.check_feasible(3).unwrap();
    }
}
