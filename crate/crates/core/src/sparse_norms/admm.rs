//! Splitting solver for `max <B, M>` over `{M >= 0, tr M = 1, |M|_1 <= k}`.
//!
//! Alternates projections onto the spectrahedron and the entrywise l1 ball
//! (scaled ADMM). Every few iterations the spectrahedron iterate is repaired
//! into a feasible point, which gives a lower bound, and the scaled dual
//! variable `Y = rho U` gives the upper bound
//! `lambda_max(B - Y) + k max|Y_ij|`. The loop stops once the gap closes.

use nalgebra::DMatrix;

use super::proj::{project_l1_ball, project_spectrahedron};

pub(crate) struct AdmmOutcome {
    pub m: DMatrix<f64>,
    pub lower: f64,
    pub upper: f64,
}

const CHECK_EVERY: usize = 10;

/// Mixes a spectrahedron point with the best diagonal atom until the l1
/// constraint holds. Returns the feasible point and its objective.
pub(crate) fn repair(b: &DMatrix<f64>, m: &DMatrix<f64>, k: f64) -> (DMatrix<f64>, f64) {
    let mut m = (m + m.transpose()) * 0.5;
    let tr = m.trace();
    if tr > 0.0 {
        m /= tr;
    }
    let l1: f64 = m.iter().map(|v| v.abs()).sum();
    if l1 > k {
        let best = best_diagonal(b);
        let theta = if l1 > 1.0 { ((k - 1.0) / (l1 - 1.0)).clamp(0.0, 1.0) } else { 0.0 };
        m *= theta;
        m[(best, best)] += 1.0 - theta;
    }
    let value = b.dot(&m);
    (m, value)
}

pub(crate) fn best_diagonal(b: &DMatrix<f64>) -> usize {
    let mut best = 0;
    for i in 1..b.nrows() {
        if b[(i, i)] > b[(best, best)] {
            best = i;
        }
    }
    best
}

fn dual_bound(b: &DMatrix<f64>, y: &DMatrix<f64>, k: f64) -> f64 {
    let shifted = b - y;
    let shifted = (&shifted + shifted.transpose()) * 0.5;
    let lmax = shifted.symmetric_eigenvalues().max();
    let ymax = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    lmax + k * ymax
}

/// `b` should be scaled to unit Frobenius norm so that `tol` is absolute.
/// `init` must already be feasible.
pub(crate) fn solve(b: &DMatrix<f64>, k: f64, init: &DMatrix<f64>, tol: f64, max_iters: usize) -> AdmmOutcome {
    let d = b.nrows();
    let mut rho = 1.0;
    let mut z = init.clone();
    let mut u = DMatrix::<f64>::zeros(d, d);
    let mut best_m = init.clone();
    let mut lower = b.dot(init);
    let mut upper = dual_bound(b, &u, k);
    let mut iterations = 0;

    while iterations < max_iters && upper - lower > tol {
        iterations += 1;
        let m = project_spectrahedron(&(&z - &u + b / rho));
        let z_old = std::mem::replace(&mut z, project_l1_ball(&(&m + &u), k));
        u += &m - &z;

        if iterations % CHECK_EVERY == 0 || iterations == max_iters {
            let (candidate, value) = repair(b, &m, k);
            if value > lower {
                lower = value;
                best_m = candidate;
            }
            upper = upper.min(dual_bound(b, &(&u * rho), k));

            let primal = (&m - &z).norm();
            let dual = rho * (&z - &z_old).norm();
            if primal > 10.0 * dual {
                rho *= 2.0;
                u /= 2.0;
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }

    AdmmOutcome { m: best_m, lower, upper }
}
