//! Real standard form: `max sum_k <C_k, W_k>` s.t. `<A_r, W> = b_r`, `W_k` PSD.
//!
//! A complex Hermitian variable `X` of size `n` becomes a real block `W` of
//! size `2n`, read back as `X = (W11 + W22)/2 + i (W21 - W12)/2`. When all
//! data are real the imaginary part of any feasible point can be dropped
//! without changing feasibility or objective, so real problems keep size `n`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::map::{merge_sparse, SparseEntries};
use super::problem::SdpProblem;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::tensor::{c, real_embed, CMatrix, Space, TensorOperator};

/// Rows whose Gram pivot falls below this are treated as dependent.
pub const DEPENDENT_ROW_TOL: f64 = 1e-9;
/// A dependent row whose right-hand side disagrees by more than this makes
/// the problem infeasible.
pub const INCONSISTENT_RHS_TOL: f64 = 1e-7;

/// One PSD block of the canonical problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub variable: String,
    pub space: Space,
    /// Side length of the real block (`2n` for complex variables).
    pub size: usize,
    pub complex: bool,
}

/// Sparse symmetric coefficient matrix stored by its upper triangle:
/// `(block, i, j, value)` with `i <= j` stands for both `(i,j)` and `(j,i)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseRow {
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseRow {
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum()
    }

    pub fn dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(k, i, j, v)| if i == j { v * x[k][(i, i)] } else { v * (x[k][(i, j)] + x[k][(j, i)]) })
            .sum()
    }
}

/// Where a canonical row came from.
#[derive(Clone, Debug, PartialEq)]
pub struct RowOrigin {
    pub constraint: usize,
    pub row: usize,
    pub col: usize,
    pub imaginary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalSdp {
    pub name: String,
    pub complex: bool,
    pub blocks: Vec<Block>,
    pub objective: Vec<DMatrix<f64>>,
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<f64>,
    pub origins: Vec<RowOrigin>,
    pub dropped_rows: usize,
}

/// Hermitian operator represented by the symmetric unit `E_pq + E_qp`
/// (or `E_pp`) of a canonical block, as sparse entries. Mirrors `deembed`.
fn unit_operator(n: usize, complex: bool, p: usize, q: usize) -> SparseEntries {
    let cells: &[(usize, usize)] = if p == q { &[(p, p)] } else { &[(p, q), (q, p)] };
    let mut out = Vec::new();
    for &(r, s) in cells {
        if !complex {
            out.push((r, s, c(1.0, 0.0)));
            continue;
        }
        match (r < n, s < n) {
            (true, true) => out.push((r, s, c(0.5, 0.0))),
            (false, false) => out.push((r - n, s - n, c(0.5, 0.0))),
            (false, true) => out.push((r - n, s, c(0.0, 0.5))),
            (true, false) => out.push((r, s - n, c(0.0, -0.5))),
        }
    }
    merge_sparse(out)
}

fn deembed(w: &DMatrix<f64>, n: usize, complex: bool) -> CMatrix {
    if !complex {
        return w.map(|x| c(x, 0.0));
    }
    CMatrix::from_fn(n, n, |i, j| {
        c((w[(i, j)] + w[(i + n, j + n)]) / 2.0, (w[(i + n, j)] - w[(i, j + n)]) / 2.0)
    })
}

pub fn canonicalize(problem: &SdpProblem) -> Result<CanonicalSdp> {
    let complex = !problem.is_real();
    let blocks: Vec<Block> = problem
        .variables()
        .iter()
        .map(|v| Block {
            variable: v.name.clone(),
            space: v.space.clone(),
            size: if complex { 2 * v.space.dim() } else { v.space.dim() },
            complex,
        })
        .collect();
    let block_of: BTreeMap<&str, usize> =
        blocks.iter().enumerate().map(|(k, b)| (b.variable.as_str(), k)).collect();

    let objective = blocks
        .iter()
        .map(|b| match problem.objective().get(&b.variable) {
            None => DMatrix::zeros(b.size, b.size),
            Some(coef) if complex => real_embed(coef.matrix()) * 0.5,
            Some(coef) => coef.matrix().map(|z| z.re),
        })
        .collect();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut origins = Vec::new();
    for (ci, con) in problem.constraints().iter().enumerate() {
        let d = con.rhs.dim();
        // Output entries used as rows: real parts on and above the diagonal,
        // imaginary parts strictly above it for complex problems.
        let mut slots: Vec<(usize, usize, bool)> = Vec::new();
        for a in 0..d {
            for b in a..d {
                slots.push((a, b, false));
            }
        }
        if complex {
            for a in 0..d {
                for b in a + 1..d {
                    slots.push((a, b, true));
                }
            }
        }
        let slot_index = |a: usize, b: usize, im: bool| -> usize {
            if !im {
                a * d - a * (a + 1) / 2 + b
            } else {
                d * (d + 1) / 2 + a * (d - 1) - a * (a + 1) / 2 + b - 1
            }
        };
        let mut local: Vec<SparseRow> = vec![SparseRow::default(); slots.len()];
        for term in &con.terms {
            let k = block_of[term.variable.as_str()];
            let n = blocks[k].space.dim();
            let size = blocks[k].size;
            for q in 0..size {
                for p in 0..=q {
                    let x = unit_operator(n, complex, p, q);
                    for (a, b, z) in merge_sparse(term.map.apply_sparse(&x)) {
                        if a > b {
                            continue;
                        }
                        if z.re.abs() > 1e-15 {
                            let v = if p == q { z.re } else { z.re / 2.0 };
                            local[slot_index(a, b, false)].entries.push((k, p, q, v));
                        }
                        if complex && a < b && z.im.abs() > 1e-15 {
                            let v = if p == q { z.im } else { z.im / 2.0 };
                            local[slot_index(a, b, true)].entries.push((k, p, q, v));
                        }
                    }
                }
            }
        }
        for (row, &(a, b, im)) in local.into_iter().zip(&slots) {
            let z = con.rhs.matrix()[(a, b)];
            rows.push(merge_entries(row));
            rhs.push(if im { z.im } else { z.re });
            origins.push(RowOrigin { constraint: ci, row: a, col: b, imaginary: im });
        }
    }
    let raw = CanonicalSdp {
        name: problem.name.clone(),
        complex,
        blocks,
        objective,
        rows,
        rhs,
        origins,
        dropped_rows: 0,
    };
    raw.canonicalize()
}

fn merge_entries(mut row: SparseRow) -> SparseRow {
    row.entries.sort_by_key(|e| (e.0, e.1, e.2));
    let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(row.entries.len());
    for e in row.entries {
        match out.last_mut() {
            Some(last) if (last.0, last.1, last.2) == (e.0, e.1, e.2) => last.3 += e.3,
            _ => out.push(e),
        }
    }
    out.retain(|e| e.3.abs() > 1e-15);
    SparseRow { entries: out }
}

impl CanonicalSdp {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Normalize rows and remove dependent ones. Applying it to its own
    /// output changes nothing.
    pub fn canonicalize(&self) -> Result<CanonicalSdp> {
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut rhs = Vec::with_capacity(self.rows.len());
        let mut origins = Vec::with_capacity(self.rows.len());
        let mut dropped = self.dropped_rows;
        for ((row, &b), o) in self.rows.iter().zip(&self.rhs).zip(&self.origins) {
            let norm = row.norm_sq().sqrt();
            if norm <= 1e-12 {
                if b.abs() > INCONSISTENT_RHS_TOL {
                    return Err(Error::InfeasibleAtBuild(format!(
                        "constraint row ({}, {}) of constraint #{} reads 0 = {b}",
                        o.row, o.col, o.constraint
                    )));
                }
                dropped += 1;
                continue;
            }
            if (norm - 1.0).abs() <= 1e-14 {
                rows.push(row.clone());
                rhs.push(b);
            } else {
                rows.push(SparseRow { entries: row.entries.iter().map(|&(k, i, j, v)| (k, i, j, v / norm)).collect() });
                rhs.push(b / norm);
            }
            origins.push(o.clone());
        }

        crate::solver::check_row_budget(rows.len())?;
        let index = entry_index(&rows, self.blocks.len());
        let chol = Cholesky::with_dropping(gram_matrix(&rows, &index), DEPENDENT_ROW_TOL);
        let flags = chol.dropped().to_vec();
        let rhs_vec = DVector::from_vec(rhs.clone());
        for (r, &is_dropped) in flags.iter().enumerate() {
            if !is_dropped {
                continue;
            }
            let coeffs = chol.solve(&gram_column(&rows, &index, r));
            let predicted = coeffs.dot(&rhs_vec);
            if (predicted - rhs[r]).abs() > INCONSISTENT_RHS_TOL {
                let o = &origins[r];
                return Err(Error::InfeasibleAtBuild(format!(
                    "row ({}, {}) of constraint #{} is implied by earlier rows with right side {predicted}, but asks for {}",
                    o.row, o.col, o.constraint, rhs[r]
                )));
            }
            let residual = explicit_residual(&rows, r, &coeffs);
            if residual > 1e-6 {
                return Err(Error::Solver(format!(
                    "row {r} looked dependent but leaves residual {residual:.3e}"
                )));
            }
        }
        let mut out = CanonicalSdp {
            name: self.name.clone(),
            complex: self.complex,
            blocks: self.blocks.clone(),
            objective: self.objective.clone(),
            rows: Vec::new(),
            rhs: Vec::new(),
            origins: Vec::new(),
            dropped_rows: dropped,
        };
        for (r, is_dropped) in flags.into_iter().enumerate() {
            if is_dropped {
                out.dropped_rows += 1;
            } else {
                out.rows.push(rows[r].clone());
                out.rhs.push(rhs[r]);
                out.origins.push(origins[r].clone());
            }
        }
        Ok(out)
    }

    /// `A(W)`.
    pub fn apply(&self, w: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|r| r.dot(w)))
    }

    /// `A^T(y) = sum_r y_r A_r`.
    pub fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|b| DMatrix::zeros(b.size, b.size)).collect();
        for (row, &yr) in self.rows.iter().zip(y.iter()) {
            if yr == 0.0 {
                continue;
            }
            for &(k, i, j, v) in &row.entries {
                out[k][(i, j)] += yr * v;
                if i != j {
                    out[k][(j, i)] += yr * v;
                }
            }
        }
        out
    }

    pub fn gram(&self) -> DMatrix<f64> {
        gram_matrix(&self.rows, &entry_index(&self.rows, self.blocks.len()))
    }

    /// Read a block back as an operator on its variable's space.
    pub fn block_operator(&self, k: usize, w: &DMatrix<f64>) -> TensorOperator {
        let b = &self.blocks[k];
        TensorOperator::new(b.space.clone(), deembed(w, b.space.dim(), b.complex)).expect("block size matches space")
    }

    /// Block representing an operator on a variable's space.
    pub fn operator_block(&self, k: usize, op: &TensorOperator) -> DMatrix<f64> {
        if self.blocks[k].complex {
            real_embed(op.matrix())
        } else {
            op.matrix().map(|z| z.re)
        }
    }

    pub fn objective_value(&self, w: &[DMatrix<f64>]) -> f64 {
        self.objective.iter().zip(w).map(|(c, x)| c.dot(x)).sum()
    }
}

/// Rows touching each block entry, with the weight of that entry in the
/// trace inner product.
type EntryIndex = Vec<BTreeMap<(usize, usize), Vec<(usize, f64)>>>;

fn entry_index(rows: &[SparseRow], nblocks: usize) -> EntryIndex {
    let mut index: EntryIndex = vec![BTreeMap::new(); nblocks];
    for (r, row) in rows.iter().enumerate() {
        for &(k, i, j, v) in &row.entries {
            let w = if i == j { v } else { 2.0 * v };
            index[k].entry((i, j)).or_default().push((r, w));
        }
    }
    index
}

fn gram_column(rows: &[SparseRow], index: &EntryIndex, r: usize) -> DVector<f64> {
    let mut col = DVector::zeros(rows.len());
    for &(k, i, j, v) in &rows[r].entries {
        for &(s, w) in &index[k][&(i, j)] {
            col[s] += v * w;
        }
    }
    col
}

fn gram_matrix(rows: &[SparseRow], index: &EntryIndex) -> DMatrix<f64> {
    let m = rows.len();
    let mut g = DMatrix::zeros(m, m);
    for (r, row) in rows.iter().enumerate() {
        for &(k, i, j, v) in &row.entries {
            for &(s, w) in &index[k][&(i, j)] {
                g[(r, s)] += v * w;
            }
        }
    }
    g
}

fn explicit_residual(rows: &[SparseRow], r: usize, coeffs: &DVector<f64>) -> f64 {
    let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for &(k, i, j, v) in &rows[r].entries {
        *acc.entry((k, i, j)).or_default() += v;
    }
    for (s, &cs) in coeffs.iter().enumerate() {
        if cs == 0.0 || s == r {
            continue;
        }
        for &(k, i, j, v) in &rows[s].entries {
            *acc.entry((k, i, j)).or_default() -= cs * v;
        }
    }
    acc.iter().map(|(&(_, i, j), v)| if i == j { v * v } else { 2.0 * v * v }).sum::<f64>().sqrt()
}
