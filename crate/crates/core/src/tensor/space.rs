use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named finite-dimensional quantum register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub dim: usize,
}

impl Register {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self { label: label.into(), dim }
    }
}

/// An ordered tuple of registers. The first register is the most significant
/// one in the row-major basis ordering.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    registers: Vec<Register>,
}

impl Space {
    pub fn new(registers: &[(&str, usize)]) -> Result<Self> {
        Self::from_registers(registers.iter().map(|(l, d)| Register::new(*l, *d)).collect())
    }

    pub fn from_registers(registers: Vec<Register>) -> Result<Self> {
        for (i, r) in registers.iter().enumerate() {
            if r.dim == 0 {
                return Err(Error::Dimension(format!("register `{}` has dimension 0", r.label)));
            }
            if r.label.is_empty() {
                return Err(Error::Labeling("empty register label".into()));
            }
            if registers[..i].iter().any(|o| o.label == r.label) {
                return Err(Error::Labeling(format!("label `{}` appears twice", r.label)));
            }
        }
        Ok(Self { registers })
    }

    /// The trivial one-dimensional space with no registers.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn labels(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn register_dim(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.registers[p].dim)
            .ok_or_else(|| Error::Labeling(format!("no register `{label}` in {self}")))
    }

    /// Concatenation; labels must be disjoint.
    pub fn concat(&self, other: &Space) -> Result<Space> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Self::from_registers(regs)
    }

    /// The space left after removing the given registers.
    pub fn without<S: AsRef<str>>(&self, labels: &[S]) -> Result<Space> {
        for l in labels {
            if !self.contains(l.as_ref()) {
                return Err(Error::Labeling(format!("no register `{}` in {self}", l.as_ref())));
            }
        }
        Ok(Space {
            registers: self
                .registers
                .iter()
                .filter(|r| !labels.iter().any(|l| l.as_ref() == r.label))
                .cloned()
                .collect(),
        })
    }

    /// The sub-space made of the given registers, in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Space> {
        let regs = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                self.position(l)
                    .map(|p| self.registers[p].clone())
                    .ok_or_else(|| Error::Labeling(format!("no register `{l}` in {self}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_registers(regs)
    }

    /// True when both spaces hold the same registers, possibly in another order.
    pub fn same_registers(&self, other: &Space) -> bool {
        self.len() == other.len()
            && self
                .registers
                .iter()
                .all(|r| other.registers.iter().any(|o| o == r))
    }

    /// Row-major strides of each register.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.registers[i + 1].dim;
        }
        strides
    }

    /// Flat index of a basis vector given one digit per register.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.registers)
            .fold(0, |acc, (d, r)| acc * r.dim + d)
    }

    /// Digits of a flat basis index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.len()];
        for (i, r) in self.registers.iter().enumerate().rev() {
            digits[i] = index % r.dim;
            index /= r.dim;
        }
        digits
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.registers.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", r.label, r.dim)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(Space::new(&[("A", 2), ("A", 3)]), Err(Error::Labeling(_))));
    }

    #[test]
    fn digits_roundtrip() {
        let s = Space::new(&[("A", 2), ("B", 3), ("C", 4)]).unwrap();
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.digits_of(i)), i);
        }
        assert_eq!(s.index_of(&[1, 0, 0]), 12);
        assert_eq!(s.strides(), vec![12, 4, 1]);
    }
}
