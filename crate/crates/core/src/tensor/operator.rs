use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::Space;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for treating an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for positive-semidefiniteness and unit trace.
pub const PSD_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A dense operator on a labelled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    space: Space,
    matrix: CMatrix,
}

impl TensorOperator {
    pub fn new(space: Space, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but space {} has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space,
                d
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn from_real(space: Space, matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(space, matrix.map(cr))
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self { space, matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self { space, matrix: CMatrix::identity(d, d) }
    }

    /// `|v><v|` for a state vector on `space`.
    pub fn projector(space: Space, state: &CVector) -> Result<Self> {
        if state.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "state has length {} but space {} has dimension {}",
                state.len(),
                space,
                space.dim()
            )));
        }
        let m = state * state.adjoint();
        Self::new(space, m)
    }

    /// Diagonal operator with real entries.
    pub fn diagonal(space: Space, diag: &[f64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} diagonal entries for space {}",
                diag.len(),
                space
            )));
        }
        let m = CMatrix::from_diagonal(&CVector::from_iterator(diag.len(), diag.iter().map(|&x| cr(x))));
        Self::new(space, m)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * cr(factor) }
    }

    pub fn add(&self, other: &TensorOperator) -> Result<Self> {
        let other = other.aligned_to(&self.space)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + other.matrix })
    }

    pub fn sub(&self, other: &TensorOperator) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    /// Same operator with registers reordered to match `target`, which must
    /// hold exactly the same registers.
    pub fn aligned_to(&self, target: &Space) -> Result<Self> {
        if &self.space == target {
            return Ok(self.clone());
        }
        if !self.space.same_registers(target) {
            return Err(Error::Labeling(format!("spaces {} and {} differ", self.space, target)));
        }
        self.permute(&target.labels())
    }

    /// Tensor product; the two spaces must have disjoint labels.
    pub fn kron(&self, other: &TensorOperator) -> Result<Self> {
        let space = self.space.concat(&other.space)?;
        Ok(Self { space, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Trace out the named registers.
    pub fn partial_trace<S: AsRef<str>>(&self, traced: &[S]) -> Result<Self> {
        let kept_space = self.space.without(traced)?;
        let matrix = partial_trace_matrix(&self.space, &self.matrix, traced)?;
        Ok(Self { space: kept_space, matrix })
    }

    /// Reorder the registers to the given label order.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let target = self.space.select(order)?;
        if target.len() != self.space.len() {
            return Err(Error::Labeling(format!(
                "permutation must name every register of {}",
                self.space
            )));
        }
        let perm = permutation_indices(&self.space, &target)?;
        let d = perm.len();
        let matrix = CMatrix::from_fn(d, d, |a, b| self.matrix[(perm[a], perm[b])]);
        Ok(Self { space: target, matrix })
    }

    /// Extend by the identity on extra registers and reorder to `target`.
    pub fn embed(&self, target: &Space) -> Result<Self> {
        let rest = target.without(&self.space.labels())?;
        let ext = self.kron(&TensorOperator::identity(rest))?;
        ext.aligned_to(target)
    }

    /// `Re tr(A^dagger B)`; both operands must be Hermitian on the same space.
    pub fn inner(&self, other: &TensorOperator) -> Result<f64> {
        if !self.is_hermitian(HERMITIAN_TOL) || !other.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Domain("inner product requires Hermitian operands".into()));
        }
        let other = other.aligned_to(&self.space)?;
        Ok(frobenius_inner(&self.matrix, &other.matrix))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.matrix, tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.matrix.iter().all(|z| z.im.abs() <= tol)
    }

    /// Real embedding `[[Re, -Im], [Im, Re]]` of size `2n`.
    pub fn real_embed(&self) -> DMatrix<f64> {
        real_embed(&self.matrix)
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        if !self.is_hermitian(HERMITIAN_TOL * (1.0 + self.matrix.camax())) {
            return Err(Error::Domain("eigendecomposition requires a Hermitian operator".into()));
        }
        Ok(hermitian_eigh(&self.matrix))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    /// Hermitian, positive semidefinite and unit trace within `tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        self.is_hermitian(tol.max(HERMITIAN_TOL))
            && (self.trace().re - 1.0).abs() <= tol
            && self.trace().im.abs() <= tol
            && self.min_eigenvalue() >= -tol
    }
}

/// Index map such that `target_index -> source_index` for the same registers
/// in another order.
pub fn permutation_indices(source: &Space, target: &Space) -> Result<Vec<usize>> {
    if !source.same_registers(target) {
        return Err(Error::Labeling(format!("spaces {source} and {target} differ")));
    }
    let src_strides = source.strides();
    let strides: Vec<usize> = target
        .registers()
        .iter()
        .map(|r| src_strides[source.position(&r.label).unwrap()])
        .collect();
    let d = target.dim();
    let mut perm = Vec::with_capacity(d);
    for t in 0..d {
        let digits = target.digits_of(t);
        perm.push(digits.iter().zip(&strides).map(|(a, b)| a * b).sum());
    }
    Ok(perm)
}

/// For each (kept, traced) digit pair, the flat index in the full space.
/// Returned as `table[traced][kept]`.
fn split_indices<S: AsRef<str>>(space: &Space, traced: &[S]) -> Result<(usize, usize, Vec<Vec<usize>>)> {
    let kept = space.without(traced)?;
    let traced_space = space.select(traced)?;
    let strides = space.strides();
    let kept_strides: Vec<usize> = kept
        .registers()
        .iter()
        .map(|r| strides[space.position(&r.label).unwrap()])
        .collect();
    let traced_strides: Vec<usize> = traced_space
        .registers()
        .iter()
        .map(|r| strides[space.position(&r.label).unwrap()])
        .collect();
    let dk = kept.dim();
    let dt = traced_space.dim();
    let kept_offsets: Vec<usize> = (0..dk)
        .map(|k| kept.digits_of(k).iter().zip(&kept_strides).map(|(a, b)| a * b).sum())
        .collect();
    let table = (0..dt)
        .map(|t| {
            let off: usize = traced_space
                .digits_of(t)
                .iter()
                .zip(&traced_strides)
                .map(|(a, b)| a * b)
                .sum();
            kept_offsets.iter().map(|k| k + off).collect()
        })
        .collect();
    Ok((dk, dt, table))
}

pub(crate) fn partial_trace_matrix<S: AsRef<str>>(space: &Space, m: &CMatrix, traced: &[S]) -> Result<CMatrix> {
    let (dk, _, table) = split_indices(space, traced)?;
    let mut out = CMatrix::zeros(dk, dk);
    for rows in &table {
        for b in 0..dk {
            let jb = rows[b];
            for a in 0..dk {
                out[(a, b)] += m[(rows[a], jb)];
            }
        }
    }
    Ok(out)
}

pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    if m.ncols() != n {
        return false;
    }
    for j in 0..n {
        for i in 0..=j {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

pub fn real_embed(m: &CMatrix) -> DMatrix<f64> {
    let (r, cols) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * cols);
    for j in 0..cols {
        for i in 0..r {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + cols)] = z.re;
            out[(i, j + cols)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix through its real embedding.
/// Eigenvalues ascending.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let (vals, vecs) = real_symmetric_eigh(&re);
        return (vals, vecs.map(cr));
    }
    // Each eigenvalue of the embedding appears twice; pick an orthonormal set
    // of complex vectors by Gram-Schmidt over the candidates.
    let (vals, vecs) = real_symmetric_eigh(&real_embed(m));
    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs: Vec<CVector> = Vec::with_capacity(n);
    for k in 0..2 * n {
        if out_vecs.len() == n {
            break;
        }
        let mut v = CVector::from_fn(n, |i, _| c(vecs[(i, k)], vecs[(i + n, k)]));
        for u in &out_vecs {
            let p = u.dotc(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm > 0.5 {
            v /= cr(norm);
            out_vals.push(vals[k]);
            out_vecs.push(v);
        }
    }
    let vecs = CMatrix::from_columns(&out_vecs);
    (out_vals, vecs)
}

/// Symmetric eigendecomposition with ascending eigenvalues.
pub fn real_symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    crate::linalg::symmetric_eigh(m)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        return real_min_eigenvalue(&re);
    }
    real_min_eigenvalue(&real_embed(m))
}

pub fn real_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    crate::linalg::symmetric_eigenvalues(m).first().copied().unwrap_or(0.0)
}
