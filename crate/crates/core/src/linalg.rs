//! Dense symmetric factorizations shared by the canonicalizer and the solvers.

use nalgebra::{DMatrix, DVector};

const PANEL: usize = 64;
const UPDATE_COLS: usize = 256;

/// Lower Cholesky factor `L` with `A = L L^T`, computed with a blocked
/// right-looking sweep so the bulk of the work runs through GEMM.
///
/// With `drop_tol` set, a pivot whose Schur complement falls to at most
/// `drop_tol * A_jj` marks row `j` as linearly dependent on earlier rows;
/// its column is zeroed and the sweep continues. Without it such a pivot is
/// reported as `Err(j)`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    factor: DMatrix<f64>,
    dropped: Vec<bool>,
}

impl Cholesky {
    pub fn new(a: DMatrix<f64>) -> Result<Self, usize> {
        Self::factor(a, None)
    }

    pub fn with_dropping(a: DMatrix<f64>, drop_tol: f64) -> Self {
        Self::factor(a, Some(drop_tol)).expect("dropping never fails")
    }

    fn factor(mut a: DMatrix<f64>, drop_tol: Option<f64>) -> Result<Self, usize> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let diag0: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let mut dropped = vec![false; n];
        let mut k0 = 0;
        while k0 < n {
            let k1 = (k0 + PANEL).min(n);
            for j in k0..k1 {
                let d = a[(j, j)];
                let tiny = match drop_tol {
                    Some(tol) => d <= tol * diag0[j].max(f64::MIN_POSITIVE),
                    None => !(d > 0.0),
                };
                if tiny {
                    if drop_tol.is_none() {
                        return Err(j);
                    }
                    dropped[j] = true;
                    for i in j..n {
                        a[(i, j)] = 0.0;
                    }
                    continue;
                }
                let s = d.sqrt();
                a[(j, j)] = s;
                {
                    let mut col = a.view_mut((j + 1, j), (n - j - 1, 1));
                    col /= s;
                }
                for l in j + 1..k1 {
                    let f = a[(l, j)];
                    if f == 0.0 {
                        continue;
                    }
                    for i in l..n {
                        let v = a[(i, j)];
                        a[(i, l)] -= v * f;
                    }
                }
            }
            if k1 < n {
                let rows = n - k1;
                let l21 = a.view((k1, k0), (rows, k1 - k0)).clone_owned();
                let l21t = l21.transpose();
                let mut c0 = 0;
                while c0 < rows {
                    let c1 = (c0 + UPDATE_COLS).min(rows);
                    let lhs = l21.view((c0, 0), (rows - c0, k1 - k0));
                    let rhs = l21t.view((0, c0), (k1 - k0, c1 - c0));
                    let mut target = a.view_mut((k1 + c0, k1 + c0), (rows - c0, c1 - c0));
                    target.gemm(-1.0, &lhs, &rhs, 1.0);
                    c0 = c1;
                }
            }
            k0 = k1;
        }
        // Clear the strict upper triangle, which held stale input.
        for j in 0..n {
            for i in 0..j {
                a[(i, j)] = 0.0;
            }
        }
        Ok(Self { factor: a, dropped })
    }

    pub fn factor_matrix(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn dropped(&self) -> &[bool] {
        &self.dropped
    }

    /// Solve `A x = b` on the kept rows; dropped coordinates come back as zero.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.factor.nrows();
        let l = &self.factor;
        let mut y = b.clone();
        for j in 0..n {
            if self.dropped[j] {
                y[j] = 0.0;
                continue;
            }
            y[j] /= l[(j, j)];
            let yj = y[j];
            if yj != 0.0 {
                for i in j + 1..n {
                    y[i] -= l[(i, j)] * yj;
                }
            }
        }
        for j in (0..n).rev() {
            if self.dropped[j] {
                y[j] = 0.0;
                continue;
            }
            let col = l.view((j + 1, j), (n - j - 1, 1));
            let tail = y.rows(j + 1, n - j - 1);
            let s = col.dot(&tail);
            y[j] = (y[j] - s) / l[(j, j)];
        }
        y
    }
}

/// Symmetric eigendecomposition, eigenvalues ascending.
///
/// The matrix is first split into the connected components of its sparsity
/// graph. Each component goes through the QL solver, and through cyclic
/// Jacobi if that yields anything non-finite (the QL iteration can break
/// down on matrices with many exact zeros and tiny entries).
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let mut pairs: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n);
    for comp in components(&sym) {
        let k = comp.len();
        let sub = DMatrix::from_fn(k, k, |i, j| sym[(comp[i], comp[j])]);
        let (vals, vecs) = dense_eigh(&sub);
        for (c, val) in vals.into_iter().enumerate() {
            let mut v = DVector::zeros(n);
            for (i, &row) in comp.iter().enumerate() {
                v[row] = vecs[(i, c)];
            }
            pairs.push((val, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vals = pairs.iter().map(|p| p.0).collect();
    let vecs = if n == 0 { DMatrix::zeros(0, 0) } else { DMatrix::from_columns(&pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>()) };
    (vals, vecs)
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut out = Vec::with_capacity(m.nrows());
    for comp in components(&sym) {
        let k = comp.len();
        let sub = DMatrix::from_fn(k, k, |i, j| sym[(comp[i], comp[j])]);
        let vals = sub.clone().symmetric_eigenvalues();
        if vals.iter().all(|v| v.is_finite()) {
            out.extend(vals.iter());
        } else {
            out.extend(jacobi_eigh(&sub).0);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn components(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let i = comp[head];
            head += 1;
            for j in 0..n {
                if !seen[j] && m[(i, j)] != 0.0 {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn dense_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().chain(eig.eigenvectors.iter()).all(|v| v.is_finite()) {
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    } else {
        jacobi_eigh(m)
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
fn jacobi_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[(i, j)] * a[(i, j)]).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> DMatrix<f64> {
        let b = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.4);
        &b * b.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn factor_reproduces_matrix() {
        for n in [1, 5, 63, 64, 65, 200, 300] {
            let a = spd(n);
            let ch = Cholesky::new(a.clone()).unwrap();
            let l = ch.factor_matrix();
            let err = (l * l.transpose() - &a).amax();
            assert!(err < 1e-10 * n as f64, "n={n} err={err}");
            let b = DVector::from_fn(n, |i, _| i as f64 - 3.0);
            let x = ch.solve(&b);
            assert!((&a * x - b).amax() < 1e-8);
        }
    }

    #[test]
    fn dependent_rows_are_dropped() {
        // rows: r0, r1, r0 + r1, r2
        let rows = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let g = &rows * rows.transpose();
        let ch = Cholesky::with_dropping(g, 1e-9);
        assert_eq!(ch.dropped(), &[false, false, true, false]);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(Cholesky::new(a).unwrap_err(), 1);
    }

    #[test]
    fn jacobi_matches_ql() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, -1.0, 3.0, 0.25, 0.5, 0.25, 1.0]);
        let (a, va) = jacobi_eigh(&m);
        let (b, _) = dense_eigh(&m);
        let mut a = a;
        a.sort_by(f64::total_cmp);
        let mut b = b;
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((&va.transpose() * &va - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn split_components_reassemble() {
        let m = DMatrix::from_row_slice(4, 4, &[1.0, 0.0, 2.0, 0.0, 0.0, 5.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (vals, vecs) = symmetric_eigh(&m);
        assert_eq!(vals.len(), 4);
        let rebuilt = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals.clone())) * vecs.transpose();
        assert!((rebuilt - &m).norm() < 1e-12);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[3] - 5.0).abs() < 1e-12);
    }
}
