use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::tensor::{cr, CVector, Space, TensorOperator};

/// A real pure state stored as exact unnormalized amplitudes. The physical
/// vector is `amplitudes / sqrt(sum a^2)`, so every Born probability of a
/// rational projector is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: Space,
    amplitudes: Vec<Rational64>,
}

impl PureState {
    pub fn new(space: Space, amplitudes: Vec<Rational64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        if amplitudes.iter().all(Zero::is_zero) {
            return Err(Error::Domain("the zero vector is not a state".into()));
        }
        Ok(Self { space, amplitudes })
    }

    /// Uniform superposition of the listed computational basis states.
    pub fn superposition(space: Space, terms: &[&[usize]]) -> Result<Self> {
        let mut amps = vec![Rational64::zero(); space.dim()];
        for digits in terms {
            if digits.len() != space.len() || digits.iter().zip(space.dims()).any(|(&d, n)| d >= n) {
                return Err(Error::Domain(format!("basis label {digits:?} does not fit {space}")));
            }
            amps[space.index_of(digits)] += Rational64::one();
        }
        Self::new(space, amps)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Rational64] {
        &self.amplitudes
    }

    /// Squared norm of the stored amplitudes.
    pub fn norm_sq(&self) -> Rational64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// Normalized state vector.
    pub fn vector(&self) -> CVector {
        let n = (*self.norm_sq().numer() as f64 / *self.norm_sq().denom() as f64).sqrt();
        CVector::from_iterator(self.amplitudes.len(), self.amplitudes.iter().map(|a| cr(to_f64(a) / n)))
    }

    pub fn density(&self) -> TensorOperator {
        TensorOperator::projector(self.space.clone(), &self.vector()).expect("vector matches its space")
    }

    /// The same amplitudes on renamed registers (dimensions unchanged).
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.space.len() {
            return Err(Error::Labeling(format!("{} labels for {}", labels.len(), self.space)));
        }
        let regs: Vec<(&str, usize)> =
            labels.iter().map(AsRef::as_ref).zip(self.space.dims()).collect();
        Ok(Self { space: Space::new(&regs)?, amplitudes: self.amplitudes.clone() })
    }

    pub fn kron(&self, other: &PureState) -> Result<Self> {
        let space = self.space.concat(&other.space)?;
        let mut amps = Vec::with_capacity(space.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(Self { space, amplitudes: amps })
    }

    /// `|<self|other>|^2` for normalized versions of both states.
    pub fn overlap_sq(&self, other: &PureState) -> Result<Rational64> {
        if self.space != other.space {
            return Err(Error::Dimension(format!("overlap of states on {} and {}", self.space, other.space)));
        }
        let ip: Rational64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum();
        Ok(ip * ip / (self.norm_sq() * other.norm_sq()))
    }

    /// Probability that measuring `register` in the computational basis gives
    /// one of `levels`.
    pub fn probability(&self, register: &str, levels: &[usize]) -> Result<Rational64> {
        let pos = self.register_position(register)?;
        let mut mass = Rational64::zero();
        for (idx, a) in self.amplitudes.iter().enumerate() {
            if levels.contains(&self.space.digits_of(idx)[pos]) {
                mass += a * a;
            }
        }
        Ok(mass / self.norm_sq())
    }

    /// Post-measurement state after observing `level` on `register`, with the
    /// probability of that outcome. `None` when the outcome is impossible.
    pub fn collapse(&self, register: &str, level: usize) -> Result<Option<(Rational64, PureState)>> {
        let pos = self.register_position(register)?;
        let amps: Vec<Rational64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| if self.space.digits_of(idx)[pos] == level { *a } else { Rational64::zero() })
            .collect();
        if amps.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let post = PureState { space: self.space.clone(), amplitudes: amps };
        Ok(Some((post.norm_sq() / self.norm_sq(), post)))
    }

    /// Apply a diagonal operator with the given entries on one register.
    pub fn apply_diagonal(&self, register: &str, entries: &[Rational64]) -> Result<Self> {
        let pos = self.register_position(register)?;
        if entries.len() != self.space.dims()[pos] {
            return Err(Error::Dimension(format!("diagonal of length {} on register `{register}`", entries.len())));
        }
        let amps = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| a * entries[self.space.digits_of(idx)[pos]])
            .collect();
        PureState::new(self.space.clone(), amps)
    }

    /// True when both describe the same physical state (equal up to sign and scale).
    pub fn same_ray(&self, other: &PureState) -> bool {
        self.space == other.space && self.overlap_sq(other).map(|o| o == Rational64::one()).unwrap_or(false)
    }

    fn register_position(&self, register: &str) -> Result<usize> {
        self.space
            .position(register)
            .ok_or_else(|| Error::Labeling(format!("no register `{register}` in {}", self.space)))
    }
}

pub fn to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
