//! Sparse SDPA (`.dat-s`) export and import.
//!
//! The canonical problem `max <C, W>` s.t. `<A_r, W> = b_r` is the SDPA dual
//! form with `c = b`, `F0 = C`, `F_r = A_r`.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::canonical::{Block, CanonicalSdp, RowOrigin, SparseRow};
use crate::error::{Error, Result};
use crate::tensor::Space;

/// Numeric content of an SDPA file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData {
    pub comments: Vec<String>,
    pub block_sizes: Vec<usize>,
    pub c: Vec<f64>,
    pub f0: Vec<DMatrix<f64>>,
    pub rows: Vec<SparseRow>,
}

impl SdpaData {
    pub fn from_canonical(p: &CanonicalSdp, model: &str) -> Self {
        let scale = if p.complex { "0.5" } else { "1" };
        Self {
            comments: vec![
                format!("model={model}"),
                format!("embedding_scale={scale}"),
                format!(
                    "blocks={}",
                    p.blocks.iter().map(|b| b.variable.as_str()).collect::<Vec<_>>().join(",")
                ),
                format!("dropped_rows={}", p.dropped_rows),
            ],
            block_sizes: p.blocks.iter().map(|b| b.size).collect(),
            c: p.rhs.clone(),
            f0: p.objective.clone(),
            rows: p.rows.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "\"{c}\"");
        }
        let _ = writeln!(s, "{}", self.c.len());
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let _ = writeln!(s, "{}", self.block_sizes.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "));
        let _ = writeln!(s, "{}", self.c.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" "));
        for (k, f) in self.f0.iter().enumerate() {
            for i in 0..f.nrows() {
                for j in i..f.ncols() {
                    if f[(i, j)] != 0.0 {
                        let _ = writeln!(s, "0 {} {} {} {:?}", k + 1, i + 1, j + 1, f[(i, j)]);
                    }
                }
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, i, j, v) in &row.entries {
                let _ = writeln!(s, "{} {} {} {} {v:?}", r + 1, k + 1, i + 1, j + 1);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut tokens: Vec<&str> = Vec::new();
        let mut header_done = false;
        for line in text.lines() {
            let t = line.trim();
            if !header_done && (t.starts_with('"') || t.starts_with('*')) {
                comments.push(t.trim_matches(|c| c == '"' || c == '*').trim().to_string());
                continue;
            }
            header_done = true;
            tokens.extend(t.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')').filter(|s| !s.is_empty()));
        }
        let mut it = tokens.into_iter();
        let mut next = |what: &str| it.next().ok_or_else(|| Error::Parse(format!("SDPA file ends before {what}")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{s}`: {e}")));
        let int = |s: &str| s.parse::<i64>().map_err(|e| Error::Parse(format!("bad integer `{s}`: {e}")));
        let m = int(next("m")?)? as usize;
        let nblocks = int(next("block count")?)? as usize;
        let mut block_sizes = Vec::with_capacity(nblocks);
        for _ in 0..nblocks {
            let b = int(next("block sizes")?)?;
            if b < 0 {
                return Err(Error::Unsupported("diagonal (LP) blocks".into()));
            }
            block_sizes.push(b as usize);
        }
        let mut c = Vec::with_capacity(m);
        for _ in 0..m {
            c.push(num(next("objective vector")?)?);
        }
        let mut f0: Vec<DMatrix<f64>> = block_sizes.iter().map(|&b| DMatrix::zeros(b, b)).collect();
        let mut rows = vec![SparseRow::default(); m];
        while let Ok(first) = next("entry") {
            let mat = int(first)? as usize;
            let blk = int(next("block index")?)? as usize;
            let i = int(next("row index")?)? as usize;
            let j = int(next("column index")?)? as usize;
            let v = num(next("entry value")?)?;
            if blk == 0 || blk > nblocks || i == 0 || j == 0 || i > block_sizes[blk - 1] || j > block_sizes[blk - 1] {
                return Err(Error::Parse(format!("entry {mat} {blk} {i} {j} is out of range")));
            }
            let (i, j) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
            if mat == 0 {
                f0[blk - 1][(i, j)] = v;
                f0[blk - 1][(j, i)] = v;
            } else if mat <= m {
                rows[mat - 1].entries.push((blk - 1, i, j, v));
            } else {
                return Err(Error::Parse(format!("constraint index {mat} exceeds m = {m}")));
            }
        }
        Ok(Self { comments, block_sizes, c, f0, rows })
    }
}

impl SdpaData {
    /// Real canonical problem with one block per SDPA block. Block names come
    /// from a `blocks=` comment when present.
    pub fn to_canonical(&self) -> Result<CanonicalSdp> {
        let name = self
            .comments
            .iter()
            .find_map(|c| c.strip_prefix("model="))
            .unwrap_or("sdpa")
            .to_string();
        let names: Vec<String> = self
            .comments
            .iter()
            .find_map(|c| c.strip_prefix("blocks="))
            .map(|s| s.split(',').map(str::to_string).collect())
            .filter(|v: &Vec<String>| v.len() == self.block_sizes.len())
            .unwrap_or_else(|| (0..self.block_sizes.len()).map(|k| format!("block{}", k + 1)).collect());
        let blocks = names
            .into_iter()
            .zip(&self.block_sizes)
            .map(|(variable, &size)| {
                Ok(Block { variable, space: Space::new(&[("W", size.max(1))])?, size, complex: false })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CanonicalSdp {
            name,
            complex: false,
            blocks,
            objective: self.f0.clone(),
            rows: self.rows.clone(),
            rhs: self.c.clone(),
            origins: (0..self.rows.len())
                .map(|r| RowOrigin { constraint: 0, row: r, col: r, imaginary: false })
                .collect(),
            dropped_rows: 0,
        })
    }
}

pub fn export_sdpa(p: &CanonicalSdp, model: &str) -> String {
    SdpaData::from_canonical(p, model).to_text()
}
