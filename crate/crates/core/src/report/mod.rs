//! Reproduction suite: every model solved against the checked-in manifest
//! of expected values, with JSON and aligned-text reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::builders::{restrict_and_solve, ModelId};
use crate::error::{Error, Result};
use crate::solver::{certify, solve, Backend, SolverOptions, Status};
use crate::tensor::{c, CMatrix, Space, TensorOperator};

const MANIFEST: &str = include_str!("../../data/manifest.json");

/// Tolerance for certificates of optimal solves.
pub const CERTIFY_TOL: f64 = 1e-6;
/// Largest allowed change of value under facial reduction.
pub const REDUCTION_TOL: f64 = 1e-6;
/// Wall-clock budget, in seconds, for each solve without facial reduction.
pub const UNREDUCED_TIME_LIMIT: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Paper,
    Derived,
}

/// How the paper suite treats the solve without facial reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unreduced {
    /// Must run and agree with the reduced value.
    Check,
    /// Attempted; a solver failure is recorded but does not fail the row.
    Optional,
    /// Not attempted: too slow or over the memory budget.
    Skip,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateSpec {
    #[serde(default)]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub tolerance: f64,
    pub source: Source,
}

impl CandidateSpec {
    /// The first message as an operator on `space`.
    pub fn operator(&self, space: &Space) -> Result<TensorOperator> {
        let m = match (&self.diagonal, &self.matrix) {
            (Some(d), None) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            (None, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse("candidate matrix is not square".into()));
                }
                DMatrix::from_fn(n, n, |i, j| rows[i][j])
            }
            _ => return Err(Error::Parse("candidate needs exactly one of `diagonal` or `matrix`".into())),
        };
        TensorOperator::from_real(space.clone(), &m)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestRow {
    pub model: String,
    pub expected: f64,
    pub source: Source,
    pub tolerance: f64,
    pub unreduced: Unreduced,
    #[serde(default)]
    pub candidate: Option<CandidateSpec>,
}

#[derive(Clone, Debug, Deserialize)]
struct ManifestFile {
    rows: Vec<ManifestRow>,
}

/// The checked-in manifest, one row per model.
pub fn manifest() -> Result<Vec<ManifestRow>> {
    let file: ManifestFile = serde_json::from_str(MANIFEST).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    for row in &file.rows {
        row.model.parse::<ModelId>()?;
    }
    Ok(file.rows)
}

pub fn manifest_row(model: &ModelId) -> Result<ManifestRow> {
    let name = model.name();
    manifest()?
        .into_iter()
        .find(|r| r.model == name)
        .ok_or_else(|| Error::UnknownModel(format!("{name} has no manifest row")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Every model, with the unreduced cross-checks.
    Paper,
    /// Every model, reduced solves only.
    Quick,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Suite::Paper),
            "quick" => Ok(Suite::Quick),
            other => Err(Error::Parse(format!("unknown suite `{other}` (expected paper or quick)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateCheck {
    pub expected: f64,
    pub achieved: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnreducedCheck {
    pub mode: Unreduced,
    pub value: Option<f64>,
    pub wall_ms: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One line of the reproduction table. `passed` covers the solved value,
/// the certificate and any candidate or unreduced check on the row.
#[derive(Clone, Debug, Serialize)]
pub struct ReproRow {
    pub model: String,
    pub expected: f64,
    pub source: Source,
    pub solved: Option<f64>,
    pub status: Option<Status>,
    pub backend: Backend,
    pub tolerance: f64,
    pub certified: bool,
    pub passed: bool,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unreduced: Option<UnreducedCheck>,
}

impl ReproRow {
    /// True when the row failed because a solver could not finish.
    pub fn solver_failed(&self) -> bool {
        self.error.is_some() || self.status.is_some_and(|s| s != Status::Optimal)
    }
}

fn check_candidate(model: &ModelId, spec: &CandidateSpec, expected: f64, opts: &SolverOptions) -> CandidateCheck {
    let run = || -> Result<f64> {
        let problem = model.build()?;
        let var = problem.first_message.clone().ok_or_else(|| Error::Domain(format!("{model} has no first message")))?;
        let space = problem.variable(&var)?.space.clone();
        let sol = restrict_and_solve(model, &spec.operator(&space)?, opts, true)?;
        if sol.result.status != Status::Optimal {
            return Err(Error::Solver(format!("restricted solve ended with status {}", sol.result.status)));
        }
        Ok(sol.result.value)
    };
    match run() {
        Ok(v) => CandidateCheck {
            expected,
            achieved: Some(v),
            tolerance: spec.tolerance,
            passed: (v - expected).abs() <= spec.tolerance,
            error: None,
        },
        Err(e) => CandidateCheck { expected, achieved: None, tolerance: spec.tolerance, passed: false, error: Some(e.to_string()) },
    }
}

fn check_unreduced(model: &ModelId, mode: Unreduced, reduced: Option<f64>, opts: &SolverOptions) -> UnreducedCheck {
    if mode == Unreduced::Skip {
        return UnreducedCheck { mode, value: None, wall_ms: 0.0, passed: true, error: None };
    }
    let start = Instant::now();
    let required = mode == Unreduced::Check;
    let opts = opts.clone().with_time_limit(UNREDUCED_TIME_LIMIT);
    let outcome = model.build().and_then(|p| solve(&p, &opts, false));
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(sol) if sol.result.status == Status::Optimal => {
            let v = sol.result.value;
            let agrees = reduced.is_some_and(|r| (r - v).abs() <= REDUCTION_TOL);
            UnreducedCheck { mode, value: Some(v), wall_ms, passed: agrees, error: None }
        }
        Ok(sol) => UnreducedCheck {
            mode,
            value: None,
            wall_ms,
            passed: !required,
            error: Some(format!("status {}", sol.result.status)),
        },
        Err(e) => UnreducedCheck { mode, value: None, wall_ms, passed: !required, error: Some(e.to_string()) },
    }
}

/// Solve one manifest row.
pub fn run_row(row: &ManifestRow, suite: Suite, opts: &SolverOptions) -> ReproRow {
    let start = Instant::now();
    let mut out = ReproRow {
        model: row.model.clone(),
        expected: row.expected,
        source: row.source,
        solved: None,
        status: None,
        backend: opts.backend,
        tolerance: row.tolerance,
        certified: false,
        passed: false,
        wall_ms: 0.0,
        error: None,
        candidate: None,
        unreduced: None,
    };
    let model = match row.model.parse::<ModelId>() {
        Ok(m) => m,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    match model.build().and_then(|p| solve(&p, opts, true)) {
        Ok(sol) => {
            out.status = Some(sol.result.status);
            out.solved = Some(sol.result.value);
            if sol.result.status == Status::Optimal {
                out.certified = certify(&sol.result, &sol.canonical, CERTIFY_TOL).is_ok_and(|c| c.passed);
            }
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(spec) = &row.candidate {
        out.candidate = Some(check_candidate(&model, spec, row.expected, opts));
    }
    if suite == Suite::Paper {
        out.unreduced = Some(check_unreduced(&model, row.unreduced, out.solved, opts));
    }
    out.passed = out.status == Some(Status::Optimal)
        && out.certified
        && out.solved.is_some_and(|v| (v - row.expected).abs() <= row.tolerance)
        && out.candidate.as_ref().is_none_or(|c| c.passed)
        && out.unreduced.as_ref().is_none_or(|u| u.passed);
    out
}

/// Run every manifest row. Rows are independent and run on the current
/// rayon pool; the result keeps manifest order.
pub fn reproduce(suite: Suite, opts: &SolverOptions) -> Result<Vec<ReproRow>> {
    let rows = manifest()?;
    Ok(rows.par_iter().map(|r| run_row(r, suite, opts)).collect())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

/// Aligned plain-text table, numbers to 6 decimals.
pub fn render_text(rows: &[ReproRow]) -> String {
    let header = ["model", "expected", "solved", "tol", "candidate", "unreduced", "ms", "result"];
    let mut cells: Vec<[String; 8]> = vec![header.map(String::from)];
    for r in rows {
        let cand = r.candidate.as_ref().map_or("-".into(), |c| fmt_opt(c.achieved));
        let unred = r.unreduced.as_ref().map_or("-".into(), |u| match (&u.value, &u.error) {
            (Some(v), _) => format!("{v:.6}"),
            _ if u.mode == Unreduced::Skip => "skipped".into(),
            (None, Some(_)) if u.mode == Unreduced::Optional => "no conv".into(),
            _ => "failed".into(),
        });
        cells.push([
            r.model.clone(),
            format!("{:.6}", r.expected),
            fmt_opt(r.solved),
            format!("{:.0e}", r.tolerance),
            cand,
            unred,
            format!("{:.0}", r.wall_ms),
            if r.passed { "pass".into() } else { "FAIL".into() },
        ]);
    }
    let widths: Vec<usize> = (0..8).map(|k| cells.iter().map(|c| c[k].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} rows pass", rows.len());
    for r in rows.iter().filter(|r| !r.passed) {
        if let Some(e) = r.error.as_ref().or(r.candidate.as_ref().and_then(|c| c.error.as_ref())) {
            let _ = writeln!(out, "{}: {e}", r.model);
        }
    }
    out
}

pub fn render_json(rows: &[ReproRow]) -> Value {
    serde_json::json!({
        "rows": rows,
        "passed": rows.iter().all(|r| r.passed),
    })
}

/// Write `<out>` as JSON and `<out>` with extension `txt` as the table.
pub fn write_reports(rows: &[ReproRow], out: &Path) -> Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out, serde_json::to_string_pretty(&render_json(rows))?)?;
    std::fs::write(out.with_extension("txt"), render_text(rows))?;
    Ok(())
}

/// Parse a candidate file for `model`. Accepted forms: a nested `[re, im]`
/// array for the first message, or an object mapping variable names to
/// such arrays.
pub fn parse_candidate(model: &ModelId, text: &str) -> Result<BTreeMap<String, TensorOperator>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("candidate: {e}")))?;
    let problem = model.build()?;
    let on_var = |var: &str, v: &Value| -> Result<TensorOperator> {
        let space = problem.variable(var)?.space.clone();
        TensorOperator::new(space.clone(), complex_matrix(v, space.dim())?)
    };
    match &value {
        Value::Array(_) => {
            let var = problem
                .first_message
                .clone()
                .ok_or_else(|| Error::Domain(format!("{model} has no first message; name the variables")))?;
            Ok(BTreeMap::from([(var.clone(), on_var(&var, &value)?)]))
        }
        Value::Object(map) => map.iter().map(|(k, v)| Ok((k.clone(), on_var(k, v)?))).collect(),
        _ => Err(Error::Parse("candidate must be an array or an object".into())),
    }
}

/// `[[[re, im], ...], ...]`; a bare number is read as a real entry.
fn complex_matrix(v: &Value, dim: usize) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    if rows.len() != dim {
        return Err(Error::Dimension(format!("{} rows, expected {dim}", rows.len())));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
        if row.len() != dim {
            return Err(Error::Dimension(format!("row {i} has {} entries, expected {dim}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = match e {
                Value::Number(x) => c(x.as_f64().unwrap_or(f64::NAN), 0.0),
                Value::Array(pair) if pair.len() == 2 => {
                    let re = pair[0].as_f64();
                    let im = pair[1].as_f64();
                    match (re, im) {
                        (Some(re), Some(im)) => c(re, im),
                        _ => return Err(Error::Parse(format!("entry ({i},{j}) is not numeric"))),
                    }
                }
                _ => return Err(Error::Parse(format!("entry ({i},{j}) must be [re, im]"))),
            };
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_covers_every_model_once() {
        let rows = manifest().unwrap();
        assert_eq!(rows.len(), 22);
        for m in ModelId::all() {
            assert_eq!(rows.iter().filter(|r| r.model == m.name()).count(), 1, "{m}");
        }
    }

    #[test]
    fn candidates_are_density_operators() {
        let b = Space::new(&[("B", 3)]).unwrap();
        for row in manifest().unwrap() {
            if let Some(c) = row.candidate {
                assert!(c.operator(&b).unwrap().is_density(1e-6), "{}", row.model);
            }
        }
    }

    #[test]
    fn candidate_parsing() {
        let m: ModelId = "bc_alice".parse().unwrap();
        let text = "[[[0.5,0],[0,0],[0,0]],[[0,0],[0.25,0],[0,0]],[[0,0],[0,0],[0.25,0]]]";
        let c = parse_candidate(&m, text).unwrap();
        assert_eq!(c["message"].dim(), 3);
        assert!(matches!(parse_candidate(&m, "[[1]]"), Err(Error::Dimension(_))));
        assert!(matches!(parse_candidate(&m, "{"), Err(Error::Parse(_))));
        let named = r#"{"message": [[1,0,0],[0,0,0],[0,0,0]]}"#;
        assert!(parse_candidate(&m, named).is_ok());
        assert!(parse_candidate(&m, r#"{"nope": [[1]]}"#).is_err());
    }

    #[test]
    fn text_table_has_one_line_per_row() {
        let opts = SolverOptions::ipm();
        let row = manifest().unwrap().into_iter().find(|r| r.model == "bc_bob").unwrap();
        let out = run_row(&row, Suite::Quick, &opts);
        assert!(out.passed, "{out:?}");
        let text = render_text(&[out]);
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("0.750000"));
    }
}
