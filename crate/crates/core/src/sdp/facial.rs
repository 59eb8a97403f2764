//! Facial reduction for problems whose constraint maps are (signed) positive maps.
//!
//! For a constraint `sum_i s_i L_i(X_i) = B` with each `L_i` positive, the
//! range of `s_j L_j(X_j)` must lie in `S_j = range(B) + sum_{i != j} supp L_i(X_i)`.
//! Every feasible `X_j` is therefore orthogonal to `L_j^dagger(P_{S_j}^perp)`,
//! which restricts it to a smaller face of the PSD cone. Sweeping over all
//! constraints until nothing shrinks gives the faces used below; each variable
//! is then written `X = V T V^dagger` with `T` PSD on the face.

use std::collections::BTreeMap;

use super::map::LinearMap;
use super::problem::{SdpProblem, Term};
use crate::error::Result;
use crate::tensor::{cr, hermitian_eigh, CMatrix, Space, TensorOperator};

/// Relative eigenvalue threshold for ranges and kernels.
const RANGE_TOL: f64 = 1e-9;

/// The face of one variable: columns of `basis` span its support.
#[derive(Clone, Debug)]
pub struct Face {
    pub variable: String,
    pub original: Space,
    pub basis: CMatrix,
}

impl Face {
    pub fn original_dim(&self) -> usize {
        self.original.dim()
    }

    pub fn reduced_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.reduced_dim() == self.original_dim()
    }
}

/// A facially reduced problem with the data to map solutions back.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    pub problem: SdpProblem,
    pub faces: Vec<Face>,
    /// Output dimension of every constraint before and after compression.
    pub constraint_dims: Vec<(usize, usize)>,
    pub changed: bool,
}

impl ReducedProblem {
    /// Map face variables back to the original spaces: `X = V T V^dagger`.
    pub fn lift(&self, reduced: &BTreeMap<String, TensorOperator>) -> Result<BTreeMap<String, TensorOperator>> {
        let mut out = BTreeMap::new();
        for f in &self.faces {
            let Some(t) = reduced.get(&f.variable) else { continue };
            let x = if f.is_trivial() && t.space() == &f.original {
                t.clone()
            } else {
                TensorOperator::new(f.original.clone(), &f.basis * t.matrix() * f.basis.adjoint())?
            };
            out.insert(f.variable.clone(), x);
        }
        Ok(out)
    }

    pub fn face(&self, variable: &str) -> Option<&Face> {
        self.faces.iter().find(|f| f.variable == variable)
    }
}

/// Orthonormal basis of the range of a PSD (or Hermitian) matrix.
fn range_basis(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cols: Vec<_> = (0..vals.len())
        .filter(|&k| top > 0.0 && vals[k].abs() > RANGE_TOL * top)
        .map(|k| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the kernel of a PSD matrix.
fn kernel_basis(m: &CMatrix, scale: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let cols: Vec<_> = (0..vals.len())
        .filter(|&k| vals[k] <= RANGE_TOL * scale.max(1.0))
        .map(|k| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

fn normalized(m: CMatrix) -> CMatrix {
    let n = m.norm();
    if n > 0.0 {
        m / cr(n)
    } else {
        m
    }
}

/// PSD matrix whose range is `range(B) + sum_{i != skip} supp(s_i L_i(V_i V_i^dagger))`.
fn support_sum(
    terms: &[Term],
    signs: &[f64],
    rhs: &CMatrix,
    faces: &BTreeMap<String, CMatrix>,
    skip: Option<usize>,
) -> CMatrix {
    let mut acc = normalized(rhs * rhs.adjoint());
    for (i, t) in terms.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let v = &faces[&t.variable];
        let img = t.map.apply_matrix(&(v * v.adjoint())) * cr(signs[i]);
        acc += normalized(img);
    }
    acc
}

pub fn facial_reduce(problem: &SdpProblem) -> Result<ReducedProblem> {
    let mut faces: BTreeMap<String, CMatrix> = problem
        .variables()
        .iter()
        .map(|v| (v.name.clone(), CMatrix::identity(v.space.dim(), v.space.dim())))
        .collect();

    let signs: Vec<Option<Vec<f64>>> = problem
        .constraints()
        .iter()
        .map(|c| c.terms.iter().map(|t| t.map.positivity_sign()).collect())
        .collect();

    loop {
        let mut shrunk = false;
        for (con, signs) in problem.constraints().iter().zip(&signs) {
            let Some(signs) = signs else { continue };
            for (j, term) in con.terms.iter().enumerate() {
                if con.terms.iter().filter(|t| t.variable == term.variable).count() > 1 {
                    continue;
                }
                let v = faces[&term.variable].clone();
                if v.ncols() == 0 {
                    continue;
                }
                let support = support_sum(&con.terms, signs, con.rhs.matrix(), &faces, Some(j));
                let range = range_basis(&support);
                let d = support.nrows();
                if range.ncols() == d {
                    continue;
                }
                let perp = CMatrix::identity(d, d) - &range * range.adjoint();
                let pulled = term.map.adjoint()?.apply_matrix(&perp) * cr(signs[j]);
                let q = v.adjoint() * pulled * &v;
                let q = (&q + q.adjoint()) * cr(0.5);
                let kernel = kernel_basis(&q, 1.0);
                if kernel.ncols() < v.ncols() {
                    faces.insert(term.variable.clone(), &v * kernel);
                    shrunk = true;
                }
            }
        }
        if !shrunk {
            break;
        }
    }

    let mut changed = faces.iter().any(|(_, v)| v.ncols() < v.nrows());
    let face_list: Vec<Face> = problem
        .variables()
        .iter()
        .map(|v| Face { variable: v.name.clone(), original: v.space.clone(), basis: faces[&v.name].clone() })
        .collect();

    // Decide per constraint whether its range can be compressed.
    let mut compress: Vec<Option<CMatrix>> = Vec::new();
    let mut constraint_dims = Vec::new();
    for (con, signs) in problem.constraints().iter().zip(&signs) {
        let d = con.rhs.dim();
        let basis = signs.as_ref().and_then(|signs| {
            let support = support_sum(&con.terms, signs, con.rhs.matrix(), &faces, None);
            let range = range_basis(&support);
            (range.ncols() < d).then_some(range)
        });
        constraint_dims.push((d, basis.as_ref().map_or(d, |b| b.ncols())));
        changed |= basis.is_some();
        compress.push(basis);
    }

    if !changed {
        return Ok(ReducedProblem { problem: problem.clone(), faces: face_list, constraint_dims, changed });
    }

    let mut reduced = SdpProblem::new(problem.name.clone());
    reduced.first_message = problem.first_message.clone();
    let mut lift_maps: BTreeMap<String, Option<LinearMap>> = BTreeMap::new();
    for f in &face_list {
        if f.is_trivial() {
            reduced.declare_variable(f.variable.clone(), f.original.clone())?;
            lift_maps.insert(f.variable.clone(), None);
        } else {
            let space = Space::new(&[("face", f.reduced_dim().max(1))])?;
            let basis = if f.reduced_dim() == 0 { CMatrix::zeros(f.original_dim(), 1) } else { f.basis.clone() };
            reduced.declare_variable(f.variable.clone(), space.clone())?;
            lift_maps.insert(f.variable.clone(), Some(LinearMap::conjugate_by(&space, &f.original, basis)?));
        }
    }
    for (var, coef) in problem.objective() {
        let c = match &lift_maps[var] {
            None => coef.clone(),
            Some(lift) => lift.adjoint()?.apply(coef)?,
        };
        reduced.add_objective(var, c)?;
    }
    for (con, basis) in problem.constraints().iter().zip(&compress) {
        let mut terms = Vec::with_capacity(con.terms.len());
        let out_space = con.rhs.space().clone();
        let squeeze = match basis {
            Some(u) if u.ncols() > 0 => {
                Some(LinearMap::conjugate_by(&out_space, &Space::new(&[("range", u.ncols())])?, u.adjoint())?)
            }
            _ => None,
        };
        if let Some(u) = basis {
            if u.ncols() == 0 {
                // Every term vanishes identically on the faces and so does the right side.
                continue;
            }
        }
        for t in &con.terms {
            let mut map = match &lift_maps[&t.variable] {
                None => t.map.clone(),
                Some(lift) => lift.clone().then(t.map.clone())?,
            };
            if let Some(s) = &squeeze {
                map = map.then(s.clone())?;
            }
            terms.push(Term::new(t.variable.clone(), map));
        }
        let rhs = match &squeeze {
            None => con.rhs.clone(),
            Some(s) => s.apply(&con.rhs)?,
        };
        reduced.add_constraint(con.label.clone(), terms, rhs)?;
    }
    Ok(ReducedProblem { problem: reduced, faces: face_list, constraint_dims, changed: true })
}
