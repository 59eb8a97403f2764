use nalgebra::DMatrix;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Inverse of a positive definite matrix, `None` if the factorization fails.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let ch = symmetrize(m).cholesky()?;
    Some(symmetrize(&ch.inverse()))
}

/// Largest `alpha` with `x + alpha d` PSD (infinite when `d` is PSD).
pub fn max_step(x: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    let Some(ch) = symmetrize(x).cholesky() else { return 0.0 };
    let l = ch.l();
    // L^{-1} D L^{-T}
    let Some(left) = l.solve_lower_triangular(d) else { return 0.0 };
    let Some(both) = l.solve_lower_triangular(&left.transpose()) else { return 0.0 };
    let lo = crate::linalg::symmetric_eigenvalues(&both).first().copied().unwrap_or(0.0);
    if lo >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lo
    }
}

/// Projection onto the PSD cone in Frobenius norm.
pub fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = crate::linalg::symmetric_eigh(m);
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda > 0.0 {
            let v = vecs.column(k);
            out.ger(lambda, &v, &v, 1.0);
        }
    }
    out
}
