//! Linear maps between operator spaces, built from a handful of primitives.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use num_complex::Complex64;

use crate::tensor::{
    cr, hermitian_eigh, partial_trace_matrix, permutation_indices, CMatrix, CVector, Space, TensorOperator,
    PSD_TOL,
};

/// Which side of the argument a constant factor is placed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A linear map on operators, stored as a composition tree.
#[derive(Clone, Debug)]
pub enum LinearMap {
    Identity { space: Space },
    /// Trace out `traced` registers of `input`.
    PartialTrace { input: Space, traced: Vec<String> },
    /// Same registers in another order.
    Permute { input: Space, output: Space },
    /// Same dimensions under new labels.
    Relabel { input: Space, output: Space },
    /// `X -> K X K^dagger` with `K` of shape `output.dim() x input.dim()`.
    ConjugateBy { input: Space, output: Space, matrix: CMatrix },
    /// `X -> C (x) X` or `X (x) C`.
    TensorWithConstant { input: Space, constant: TensorOperator, side: Side },
    Scale { factor: f64, space: Space },
    Sum(Vec<LinearMap>),
    /// Applied first to last.
    Compose(Vec<LinearMap>),
}

/// `K X K^dagger`, summing outer products of columns of `K` when `X` is
/// sparse (the unit operators of coefficient extraction).
fn conjugate(k: &CMatrix, x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    let nonzeros: Vec<(usize, usize)> =
        (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).filter(|&(i, j)| x[(i, j)].norm_sqr() > 0.0).collect();
    if nonzeros.len() > n {
        return k * x * k.adjoint();
    }
    let m = k.nrows();
    let mut out = CMatrix::zeros(m, m);
    for (i, j) in nonzeros {
        let w = x[(i, j)];
        let (ci, cj) = (k.column(i), k.column(j));
        for b in 0..m {
            let right = w * cj[b].conj();
            if right.norm_sqr() == 0.0 {
                continue;
            }
            for a in 0..m {
                out[(a, b)] += ci[a] * right;
            }
        }
    }
    out
}

/// Operator as a list of `(row, col, value)` entries; repeats add up.
pub type SparseEntries = Vec<(usize, usize, Complex64)>;

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose_index(digits: &[usize], dims: &[usize], order: &[usize]) -> usize {
    order.iter().fold(0, |acc, &k| acc * dims[k] + digits[k])
}

/// Sum repeated positions and drop exact zeros.
pub fn merge_sparse(mut x: SparseEntries) -> SparseEntries {
    x.sort_by_key(|e| (e.0, e.1));
    let mut out: SparseEntries = Vec::with_capacity(x.len());
    for e in x {
        match out.last_mut() {
            Some(last) if (last.0, last.1) == (e.0, e.1) => last.2 += e.2,
            _ => out.push(e),
        }
    }
    out.retain(|e| e.2.norm_sqr() > 0.0);
    out
}

impl LinearMap {
    /// Apply to a sparse operator in the input basis. Cost scales with the
    /// number of nonzeros rather than the dimension, which is what
    /// coefficient extraction on large blocks needs.
    pub fn apply_sparse(&self, x: &SparseEntries) -> SparseEntries {
        match self {
            LinearMap::Identity { .. } | LinearMap::Relabel { .. } => x.clone(),
            LinearMap::Scale { factor, .. } => x.iter().map(|&(i, j, v)| (i, j, v * factor)).collect(),
            LinearMap::PartialTrace { input, traced } => {
                let dims = input.dims();
                let labels = input.labels();
                let is_traced: Vec<bool> = labels.iter().map(|l| traced.iter().any(|t| t == l)).collect();
                let kept: Vec<usize> = (0..dims.len()).filter(|&k| !is_traced[k]).collect();
                let (mut di, mut dj) = (vec![0; dims.len()], vec![0; dims.len()]);
                let mut out = Vec::new();
                for &(i, j, v) in x {
                    digits(i, &dims, &mut di);
                    digits(j, &dims, &mut dj);
                    if (0..dims.len()).all(|k| !is_traced[k] || di[k] == dj[k]) {
                        out.push((compose_index(&di, &dims, &kept), compose_index(&dj, &dims, &kept), v));
                    }
                }
                out
            }
            LinearMap::Permute { input, output } => {
                let dims = input.dims();
                let order: Vec<usize> =
                    output.labels().iter().map(|l| input.position(l).expect("checked at construction")).collect();
                let (mut di, mut dj) = (vec![0; dims.len()], vec![0; dims.len()]);
                x.iter()
                    .map(|&(i, j, v)| {
                        digits(i, &dims, &mut di);
                        digits(j, &dims, &mut dj);
                        (compose_index(&di, &dims, &order), compose_index(&dj, &dims, &order), v)
                    })
                    .collect()
            }
            LinearMap::ConjugateBy { matrix, .. } => {
                let column = |c: usize| -> Vec<(usize, Complex64)> {
                    (0..matrix.nrows()).filter(|&a| matrix[(a, c)].norm_sqr() > 0.0).map(|a| (a, matrix[(a, c)])).collect()
                };
                let mut out = Vec::new();
                for &(i, j, v) in x {
                    let (ci, cj) = (column(i), column(j));
                    for &(a, ka) in &ci {
                        for &(b, kb) in &cj {
                            out.push((a, b, ka * v * kb.conj()));
                        }
                    }
                }
                out
            }
            LinearMap::TensorWithConstant { input, constant, side } => {
                let (n, m) = (input.dim(), constant.dim());
                let cm = constant.matrix();
                let nonzero: Vec<(usize, usize, Complex64)> = (0..m)
                    .flat_map(|a| (0..m).map(move |b| (a, b)))
                    .filter(|&(a, b)| cm[(a, b)].norm_sqr() > 0.0)
                    .map(|(a, b)| (a, b, cm[(a, b)]))
                    .collect();
                let mut out = Vec::with_capacity(x.len() * nonzero.len());
                for &(i, j, v) in x {
                    for &(a, b, w) in &nonzero {
                        out.push(match side {
                            Side::Left => (a * n + i, b * n + j, w * v),
                            Side::Right => (i * m + a, j * m + b, v * w),
                        });
                    }
                }
                out
            }
            LinearMap::Sum(v) => merge_sparse(v.iter().flat_map(|m| m.apply_sparse(x)).collect()),
            LinearMap::Compose(v) => {
                let mut acc = merge_sparse(v[0].apply_sparse(x));
                for m in &v[1..] {
                    acc = merge_sparse(m.apply_sparse(&acc));
                }
                acc
            }
        }
    }

    pub fn identity(space: Space) -> Self {
        LinearMap::Identity { space }
    }

    pub fn partial_trace<S: AsRef<str>>(input: &Space, traced: &[S]) -> Result<Self> {
        input.without(traced)?;
        Ok(LinearMap::PartialTrace {
            input: input.clone(),
            traced: traced.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    pub fn permute<S: AsRef<str>>(input: &Space, order: &[S]) -> Result<Self> {
        let output = input.select(order)?;
        if output.len() != input.len() {
            return Err(Error::Labeling(format!("permutation must name every register of {input}")));
        }
        Ok(LinearMap::Permute { input: input.clone(), output })
    }

    pub fn relabel<S: AsRef<str>>(input: &Space, labels: &[S]) -> Result<Self> {
        if labels.len() != input.len() {
            return Err(Error::Labeling(format!("{} labels given for {input}", labels.len())));
        }
        let output = Space::from_registers(
            input
                .registers()
                .iter()
                .zip(labels)
                .map(|(r, l)| crate::tensor::Register::new(l.as_ref(), r.dim))
                .collect(),
        )?;
        Ok(LinearMap::Relabel { input: input.clone(), output })
    }

    pub fn conjugate_by(input: &Space, output: &Space, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != output.dim() || matrix.ncols() != input.dim() {
            return Err(Error::Dimension(format!(
                "conjugating matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                output.dim(),
                input.dim()
            )));
        }
        Ok(LinearMap::ConjugateBy { input: input.clone(), output: output.clone(), matrix })
    }

    /// Conjugation by an operator acting on the whole space.
    pub fn conjugate_by_operator(op: &TensorOperator) -> Self {
        LinearMap::ConjugateBy {
            input: op.space().clone(),
            output: op.space().clone(),
            matrix: op.matrix().clone(),
        }
    }

    pub fn tensor_with_constant(input: &Space, constant: TensorOperator, side: Side) -> Result<Self> {
        input.concat(constant.space())?;
        Ok(LinearMap::TensorWithConstant { input: input.clone(), constant, side })
    }

    pub fn scale(space: &Space, factor: f64) -> Self {
        LinearMap::Scale { factor, space: space.clone() }
    }

    pub fn sum(maps: Vec<LinearMap>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::Domain("empty sum of maps".into()))?;
        let (i, o) = (first.input_space(), first.output_space());
        for m in &maps[1..] {
            if m.input_space() != i || m.output_space() != o {
                return Err(Error::Dimension("summands act between different spaces".into()));
            }
        }
        Ok(LinearMap::Sum(maps))
    }

    pub fn compose(maps: Vec<LinearMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("empty composition".into()));
        }
        for w in maps.windows(2) {
            if w[0].output_space() != w[1].input_space() {
                return Err(Error::Dimension(format!(
                    "cannot feed {} into a map expecting {}",
                    w[0].output_space(),
                    w[1].input_space()
                )));
            }
        }
        if maps.len() == 1 {
            return Ok(maps.into_iter().next().unwrap());
        }
        Ok(LinearMap::Compose(maps))
    }

    /// `next` applied after `self`.
    pub fn then(self, next: LinearMap) -> Result<Self> {
        let mut parts = match self {
            LinearMap::Compose(v) => v,
            m => vec![m],
        };
        match next {
            LinearMap::Compose(v) => parts.extend(v),
            m => parts.push(m),
        }
        Self::compose(parts)
    }

    pub fn scaled(self, factor: f64) -> Self {
        let out = self.output_space();
        if factor == 1.0 {
            return self;
        }
        Self::compose(vec![self, LinearMap::scale(&out, factor)]).expect("spaces match by construction")
    }

    pub fn input_space(&self) -> Space {
        match self {
            LinearMap::Identity { space } | LinearMap::Scale { space, .. } => space.clone(),
            LinearMap::PartialTrace { input, .. }
            | LinearMap::Permute { input, .. }
            | LinearMap::Relabel { input, .. }
            | LinearMap::ConjugateBy { input, .. }
            | LinearMap::TensorWithConstant { input, .. } => input.clone(),
            LinearMap::Sum(v) | LinearMap::Compose(v) => v[0].input_space(),
        }
    }

    pub fn output_space(&self) -> Space {
        match self {
            LinearMap::Identity { space } | LinearMap::Scale { space, .. } => space.clone(),
            LinearMap::PartialTrace { input, traced } => input.without(traced).expect("checked at construction"),
            LinearMap::Permute { output, .. }
            | LinearMap::Relabel { output, .. }
            | LinearMap::ConjugateBy { output, .. } => output.clone(),
            LinearMap::TensorWithConstant { input, constant, side } => match side {
                Side::Left => constant.space().concat(input),
                Side::Right => input.concat(constant.space()),
            }
            .expect("checked at construction"),
            LinearMap::Sum(v) => v[0].output_space(),
            LinearMap::Compose(v) => v[v.len() - 1].output_space(),
        }
    }

    /// Apply to a matrix already expressed in the input basis.
    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        match self {
            LinearMap::Identity { .. } | LinearMap::Relabel { .. } => x.clone(),
            LinearMap::PartialTrace { input, traced } => {
                partial_trace_matrix(input, x, traced).expect("checked at construction")
            }
            LinearMap::Permute { input, output } => {
                let perm = permutation_indices(input, output).expect("checked at construction");
                let d = perm.len();
                CMatrix::from_fn(d, d, |a, b| x[(perm[a], perm[b])])
            }
            LinearMap::ConjugateBy { matrix, .. } => conjugate(matrix, x),
            LinearMap::TensorWithConstant { constant, side, .. } => match side {
                Side::Left => constant.matrix().kronecker(x),
                Side::Right => x.kronecker(constant.matrix()),
            },
            LinearMap::Scale { factor, .. } => x * cr(*factor),
            LinearMap::Sum(v) => {
                let mut acc = v[0].apply_matrix(x);
                for m in &v[1..] {
                    acc += m.apply_matrix(x);
                }
                acc
            }
            LinearMap::Compose(v) => {
                let mut acc = v[0].apply_matrix(x);
                for m in &v[1..] {
                    acc = m.apply_matrix(&acc);
                }
                acc
            }
        }
    }

    pub fn apply(&self, x: &TensorOperator) -> Result<TensorOperator> {
        let input = self.input_space();
        if !x.space().same_registers(&input) {
            return Err(Error::Dimension(format!("map expects {input}, got {}", x.space())));
        }
        let x = x.aligned_to(&input)?;
        TensorOperator::new(self.output_space(), self.apply_matrix(x.matrix()))
    }

    /// The adjoint map with respect to the Hilbert-Schmidt inner product,
    /// expressed in the same primitives.
    pub fn adjoint(&self) -> Result<LinearMap> {
        Ok(match self {
            LinearMap::Identity { space } => LinearMap::Identity { space: space.clone() },
            LinearMap::Scale { factor, space } => LinearMap::Scale { factor: *factor, space: space.clone() },
            LinearMap::Permute { input, output } => LinearMap::Permute { input: output.clone(), output: input.clone() },
            LinearMap::Relabel { input, output } => LinearMap::Relabel { input: output.clone(), output: input.clone() },
            LinearMap::ConjugateBy { input, output, matrix } => LinearMap::ConjugateBy {
                input: output.clone(),
                output: input.clone(),
                matrix: matrix.adjoint(),
            },
            LinearMap::PartialTrace { input, traced } => {
                let kept = input.without(traced)?;
                let traced_space = input.select(traced)?;
                let ext = LinearMap::tensor_with_constant(&kept, TensorOperator::identity(traced_space), Side::Right)?;
                let ext_out = ext.output_space();
                if ext_out == *input {
                    ext
                } else {
                    ext.then(LinearMap::permute(&ext_out, &input.labels())?)?
                }
            }
            LinearMap::TensorWithConstant { input, constant, side } => {
                if !constant.is_hermitian(1e-12 * (1.0 + constant.matrix().camax())) {
                    return Err(Error::Unsupported("adjoint of tensoring with a non-Hermitian constant".into()));
                }
                let out = self.output_space();
                let (vals, vecs) = hermitian_eigh(constant.matrix());
                let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let id = CMatrix::identity(input.dim(), input.dim());
                let mut parts = Vec::new();
                for (k, &lambda) in vals.iter().enumerate() {
                    if lambda.abs() <= 1e-14 * scale.max(1.0) {
                        continue;
                    }
                    let bra = CVector::from_fn(vecs.nrows(), |i, _| vecs[(i, k)].conj()).transpose();
                    let kmat = match side {
                        Side::Left => bra.kronecker(&id),
                        Side::Right => id.kronecker(&bra),
                    };
                    parts.push(LinearMap::conjugate_by(&out, input, kmat)?.scaled(lambda));
                }
                if parts.is_empty() {
                    LinearMap::compose(vec![
                        LinearMap::PartialTrace {
                            input: out.clone(),
                            traced: constant.space().labels().iter().map(|s| s.to_string()).collect(),
                        },
                        LinearMap::scale(input, 0.0),
                    ])?
                } else {
                    LinearMap::sum(parts)?
                }
            }
            LinearMap::Sum(v) => LinearMap::sum(v.iter().map(|m| m.adjoint()).collect::<Result<_>>()?)?,
            LinearMap::Compose(v) => {
                LinearMap::compose(v.iter().rev().map(|m| m.adjoint()).collect::<Result<_>>()?)?
            }
        })
    }

    /// `Some(s)` when the map is `s` times a positive map, `None` if unknown.
    pub fn positivity_sign(&self) -> Option<f64> {
        match self {
            LinearMap::Identity { .. }
            | LinearMap::PartialTrace { .. }
            | LinearMap::Permute { .. }
            | LinearMap::Relabel { .. }
            | LinearMap::ConjugateBy { .. } => Some(1.0),
            LinearMap::Scale { factor, .. } => Some(if *factor < 0.0 { -1.0 } else { 1.0 }),
            LinearMap::TensorWithConstant { constant, .. } => {
                if !constant.is_hermitian(1e-12) {
                    return None;
                }
                let (vals, _) = hermitian_eigh(constant.matrix());
                let lo = vals.first().copied().unwrap_or(0.0);
                let hi = vals.last().copied().unwrap_or(0.0);
                if lo >= -PSD_TOL {
                    Some(1.0)
                } else if hi <= PSD_TOL {
                    Some(-1.0)
                } else {
                    None
                }
            }
            LinearMap::Sum(v) => {
                let s = v[0].positivity_sign()?;
                v[1..].iter().all(|m| m.positivity_sign() == Some(s)).then_some(s)
            }
            LinearMap::Compose(v) => v.iter().try_fold(1.0, |acc, m| Some(acc * m.positivity_sign()?)),
        }
    }

    /// True when every numeric entry of the map is real.
    pub fn is_real(&self) -> bool {
        match self {
            LinearMap::ConjugateBy { matrix, .. } => matrix.iter().all(|z| z.im == 0.0),
            LinearMap::TensorWithConstant { constant, .. } => constant.is_real(0.0),
            LinearMap::Sum(v) | LinearMap::Compose(v) => v.iter().all(|m| m.is_real()),
            _ => true,
        }
    }

    /// Composition tree as JSON.
    pub fn to_json(&self) -> Value {
        let sp = |s: &Space| -> Value {
            s.registers().iter().map(|r| json!([r.label, r.dim])).collect::<Vec<_>>().into()
        };
        match self {
            LinearMap::Identity { space } => json!({"kind": "identity", "space": sp(space)}),
            LinearMap::PartialTrace { input, traced } => {
                json!({"kind": "partial_trace", "input": sp(input), "traced": traced})
            }
            LinearMap::Permute { input, output } => {
                json!({"kind": "permute", "input": sp(input), "output": sp(output)})
            }
            LinearMap::Relabel { input, output } => {
                json!({"kind": "relabel", "input": sp(input), "output": sp(output)})
            }
            LinearMap::ConjugateBy { input, output, matrix } => json!({
                "kind": "conjugate_by",
                "input": sp(input),
                "output": sp(output),
                "matrix": (0..matrix.nrows())
                    .map(|i| (0..matrix.ncols()).map(|j| [matrix[(i, j)].re, matrix[(i, j)].im]).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
            LinearMap::TensorWithConstant { input, constant, side } => json!({
                "kind": "tensor_with_constant",
                "input": sp(input),
                "side": match side { Side::Left => "left", Side::Right => "right" },
                "constant": constant.to_json(),
            }),
            LinearMap::Scale { factor, space } => json!({"kind": "scale", "factor": factor, "space": sp(space)}),
            LinearMap::Sum(v) => json!({"kind": "sum", "terms": v.iter().map(|m| m.to_json()).collect::<Vec<_>>()}),
            LinearMap::Compose(v) => {
                json!({"kind": "compose", "stages": v.iter().map(|m| m.to_json()).collect::<Vec<_>>()})
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{c, frobenius_inner};

    fn herm(d: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = CMatrix::from_fn(d, d, |_, _| c(next(), next()));
        &m + m.adjoint()
    }

    fn check_adjoint(map: &LinearMap, seed: u64) {
        let din = map.input_space().dim();
        let dout = map.output_space().dim();
        let x = herm(din, seed);
        let e = herm(dout, seed + 1);
        let lhs = frobenius_inner(&map.apply_matrix(&x), &e);
        let adj = map.adjoint().unwrap();
        assert_eq!(adj.input_space(), map.output_space());
        assert_eq!(adj.output_space(), map.input_space());
        let rhs = frobenius_inner(&x, &adj.apply_matrix(&e));
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn adjoints_match_inner_products() {
        let s = Space::new(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        check_adjoint(&LinearMap::partial_trace(&s, &["B"]).unwrap(), 1);
        check_adjoint(&LinearMap::partial_trace(&s, &["A", "C"]).unwrap(), 2);
        check_adjoint(&LinearMap::permute(&s, &["C", "A", "B"]).unwrap(), 3);
        let konst = TensorOperator::new(Space::new(&[("D", 2)]).unwrap(), herm(2, 9)).unwrap();
        check_adjoint(&LinearMap::tensor_with_constant(&s, konst.clone(), Side::Left).unwrap(), 4);
        check_adjoint(&LinearMap::tensor_with_constant(&s, konst, Side::Right).unwrap(), 5);
        let out = Space::new(&[("E", 5)]).unwrap();
        let k = CMatrix::from_fn(5, 12, |i, j| c((i * j) as f64 * 0.1, (i + j) as f64 * 0.05));
        check_adjoint(&LinearMap::conjugate_by(&s, &out, k).unwrap(), 6);
        let composed = LinearMap::partial_trace(&s, &["B"])
            .unwrap()
            .then(LinearMap::scale(&Space::new(&[("A", 2), ("C", 2)]).unwrap(), -2.5))
            .unwrap();
        check_adjoint(&composed, 7);
    }

    #[test]
    fn sparse_application_matches_dense() {
        let s = Space::new(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let konst = TensorOperator::new(Space::new(&[("D", 2)]).unwrap(), herm(2, 9)).unwrap();
        let k = CMatrix::from_fn(5, 12, |i, j| c((i * j) as f64 * 0.1, (i + j) as f64 * 0.05));
        let maps = vec![
            LinearMap::partial_trace(&s, &["B"]).unwrap(),
            LinearMap::permute(&s, &["C", "A", "B"]).unwrap(),
            LinearMap::tensor_with_constant(&s, konst.clone(), Side::Left).unwrap(),
            LinearMap::tensor_with_constant(&s, konst, Side::Right).unwrap(),
            LinearMap::conjugate_by(&s, &Space::new(&[("E", 5)]).unwrap(), k).unwrap(),
            LinearMap::permute(&s, &["B", "C", "A"]).unwrap().then(LinearMap::partial_trace(&Space::new(&[("B", 3), ("C", 2), ("A", 2)]).unwrap(), &["C"]).unwrap()).unwrap().scaled(-0.5),
        ];
        let x = herm(12, 3);
        let sparse: SparseEntries = (0..12).flat_map(|i| (0..12).map(move |j| (i, j))).map(|(i, j)| (i, j, x[(i, j)])).collect();
        for map in maps {
            let dense = map.apply_matrix(&x);
            let mut rebuilt = CMatrix::zeros(dense.nrows(), dense.ncols());
            for (i, j, v) in map.apply_sparse(&sparse) {
                rebuilt[(i, j)] += v;
            }
            assert!((dense - rebuilt).camax() < 1e-12);
        }
    }

    #[test]
    fn compose_rejects_mismatched_spaces() {
        let s = Space::new(&[("A", 2), ("B", 3)]).unwrap();
        let pt = LinearMap::partial_trace(&s, &["A"]).unwrap();
        assert!(matches!(pt.then(LinearMap::identity(s)), Err(Error::Dimension(_))));
    }

    #[test]
    fn positivity_sign_tracks_negation() {
        let s = Space::new(&[("A", 2)]).unwrap();
        assert_eq!(LinearMap::identity(s.clone()).scaled(-1.0).positivity_sign(), Some(-1.0));
        assert_eq!(LinearMap::identity(s).positivity_sign(), Some(1.0));
    }
}
