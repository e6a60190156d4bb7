//! Euclidean projections used by the splitting solver.

use nalgebra::DMatrix;

/// Projects `v` onto `{x >= 0, sum x = 1}` in place.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projects a symmetric matrix onto the spectrahedron `{M >= 0, tr M = 1}`.
pub(crate) fn project_spectrahedron(target: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (target + target.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    project_simplex(&mut lambda);
    let d = target.nrows();
    let mut out = DMatrix::zeros(d, d);
    for (j, &l) in lambda.iter().enumerate() {
        if l > 0.0 {
            let v = eig.eigenvectors.column(j);
            out.ger(l, &v, &v, 1.0);
        }
    }
    out
}

/// Projects onto the entrywise l1 ball of the given radius. Soft
/// thresholding keeps symmetric inputs symmetric.
pub(crate) fn project_l1_ball(target: &DMatrix<f64>, radius: f64) -> DMatrix<f64> {
    let l1: f64 = target.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return target.clone();
    }
    let mut mags: Vec<f64> = target.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &s) in mags.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - radius) / (j + 1) as f64;
        if s > t {
            theta = t;
        } else {
            break;
        }
    }
    target.map(|v| v.signum() * (v.abs() - theta).max(0.0))
}
