//! Labelled tensor-product spaces and dense operators on them.

mod json;
mod operator;
mod space;

pub use json::OperatorJson;
pub use operator::{
    c, cr, frobenius_inner, hermitian_eigh, is_hermitian, min_eigenvalue, permutation_indices, real_embed,
    real_min_eigenvalue, real_symmetric_eigh, CMatrix, CVector, TensorOperator, HERMITIAN_TOL, PSD_TOL,
};
pub(crate) use operator::partial_trace_matrix;
pub use space::{Register, Space};

use crate::error::Result;

/// Computational basis vector `|digits>` on `space`.
pub fn basis_ket(space: &Space, digits: &[usize]) -> CVector {
    let mut v = CVector::zeros(space.dim());
    v[space.index_of(digits)] = cr(1.0);
    v
}

/// `|i><j|` on a single register of dimension `dim`.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = cr(1.0);
    m
}

/// Sum of `|k><k|` over the listed levels of a single register.
pub fn level_projector(label: &str, dim: usize, levels: &[usize]) -> Result<TensorOperator> {
    let mut m = CMatrix::zeros(dim, dim);
    for &k in levels {
        m[(k, k)] = cr(1.0);
    }
    TensorOperator::new(Space::new(&[(label, dim)])?, m)
}

/// Tensor product of many operators, left to right.
pub fn kron_all(ops: &[TensorOperator]) -> Result<TensorOperator> {
    let mut acc = TensorOperator::identity(Space::trivial());
    for op in ops {
        acc = acc.kron(op)?;
    }
    Ok(acc)
}
