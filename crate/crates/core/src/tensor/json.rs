use serde::{Deserialize, Serialize};

use super::operator::{c, CMatrix, TensorOperator};
use super::space::{Register, Space};
use crate::error::{Error, Result};

/// Wire format: `{"space": [["A", 3], ...], "entries": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub space: Vec<(String, usize)>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&TensorOperator> for OperatorJson {
    fn from(op: &TensorOperator) -> Self {
        let m = op.matrix();
        Self {
            space: op.space().registers().iter().map(|r| (r.label.clone(), r.dim)).collect(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<OperatorJson> for TensorOperator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let space = Space::from_registers(j.space.into_iter().map(|(l, d)| Register::new(l, d)).collect())?;
        let d = space.dim();
        if j.entries.len() != d || j.entries.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!("entries do not form a {d}x{d} matrix for {space}")));
        }
        let m = CMatrix::from_fn(d, d, |a, b| {
            let [re, im] = j.entries[a][b];
            c(re, im)
        });
        TensorOperator::new(space, m)
    }
}

impl TensorOperator {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(OperatorJson::from(self)).expect("operator JSON is always serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let j: OperatorJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("operator JSON: {e}")))?;
        j.try_into()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}
