//! Dense SVD kernels. nalgebra's bidiagonal SVD can stall around 1e-10
//! relative accuracy on the sparse sector-structured matrices produced here,
//! so the factorization itself is delegated to faer.

use faer::Mat;
use nalgebra::DMatrix;

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order; empty for an empty matrix.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values().expect("SVD converges");
    sort_descending(&mut s);
    s
}

/// Thin SVD `m = U diag(s) Vᵀ` with descending `s`.
pub(crate) fn svd(m: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (DMatrix::zeros(rows, 0), Vec::new(), DMatrix::zeros(0, cols));
    }
    let svd = to_faer(&m).thin_svd().expect("SVD converges");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let u = DMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]);
    let v_t = DMatrix::from_fn(k, cols, |i, j| v[(j, order[i])]);
    let s = order.iter().map(|&i| s[i]).collect();
    (u, s, v_t)
}

pub(crate) fn sort_descending(s: &mut [f64]) {
    s.sort_by(|a, b| b.total_cmp(a));
}

/// `#{σ > rel_tol · σ₁}` for a descending spectrum.
pub(crate) fn rank_of(sigmas: &[f64], rel_tol: f64) -> usize {
    match sigmas.first() {
        Some(&top) if top > 0.0 => sigmas.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}
