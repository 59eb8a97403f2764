//! States, unitaries, measurements and message-flow descriptors of the
//! protocols under study.

mod state;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use state::{to_f64, PureState};

use crate::error::{Error, Result};
use crate::tensor::{c, level_projector, CMatrix, Register, Space, TensorOperator};

/// Label of the "bit was lost" level of a qutrit.
pub const LOST: usize = 2;

fn check_range(what: &str, value: usize, bound: usize) -> Result<()> {
    if value >= bound {
        return Err(Error::Domain(format!("{what} = {value} is outside 0..{bound}")));
    }
    Ok(())
}

/// `(|yy> + |22>)/sqrt 2` on `A ⊗ B`.
pub fn commit_state(y: usize) -> Result<PureState> {
    check_range("y", y, 2)?;
    PureState::superposition(Space::new(&[("A", 3), ("B", 3)])?, &[&[y, y], &[2, 2]])
}

/// The three two-qutrit states of XOR oblivious transfer.
pub fn xot_state(y: usize) -> Result<PureState> {
    check_range("y", y, 3)?;
    let space = Space::new(&[("A", 3), ("B", 3)])?;
    let terms: [&[usize]; 2] = match y {
        0 => [&[0, 0], &[2, 2]],
        1 => [&[1, 1], &[2, 2]],
        _ => [&[0, 0], &[1, 1]],
    };
    PureState::superposition(space, &terms)
}

/// `(|y> + |⊥>)/sqrt 2` on the single qutrit `B`.
pub fn rot_state(y: usize) -> Result<PureState> {
    check_range("y", y, 2)?;
    PureState::superposition(Space::new(&[("B", 3)])?, &[&[y], &[LOST]])
}

/// `diag((-1)^x0, (-1)^x1, 1)` on `B`.
pub fn ot_unitary(x0: usize, x1: usize) -> Result<TensorOperator> {
    check_range("x0", x0, 2)?;
    check_range("x1", x1, 2)?;
    let sign = |x: usize| if x == 0 { 1.0 } else { -1.0 };
    TensorOperator::diagonal(Space::new(&[("B", 3)])?, &[sign(x0), sign(x1), 1.0])
}

/// `sum |x0 x1><x0 x1| ⊗ U_{x0 x1}` on `X0 ⊗ X1 ⊗ B`.
pub fn controlled_ot_unitary() -> Result<TensorOperator> {
    let space = Space::new(&[("X0", 2), ("X1", 2), ("B", 3)])?;
    let mut diag = Vec::with_capacity(12);
    for x0 in 0..2 {
        for x1 in 0..2 {
            let u = ot_unitary(x0, x1)?;
            diag.extend((0..3).map(|k| u.matrix()[(k, k)].re));
        }
    }
    TensorOperator::diagonal(space, &diag)
}

/// The tasks a stochastic switch can select between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Task {
    Bc,
    Wcf,
    Ot,
    Xot,
    Dr3,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Bc => "BC",
            Task::Wcf => "WCF",
            Task::Ot => "OT",
            Task::Xot => "XOT",
            Task::Dr3 => "DR3",
        }
    }

    pub fn protocol(self) -> ProtocolId {
        match self {
            Task::Bc => ProtocolId::Bc,
            Task::Wcf => ProtocolId::Wcf,
            Task::Ot => ProtocolId::Ot,
            Task::Xot => ProtocolId::Xot,
            Task::Dr3 => ProtocolId::Dr3,
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BC" => Ok(Task::Bc),
            "WCF" => Ok(Task::Wcf),
            "OT" => Ok(Task::Ot),
            "XOT" => Ok(Task::Xot),
            "DR3" | "DR" => Ok(Task::Dr3),
            _ => Err(Error::Parse(format!("unknown task `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    Bc,
    Wcf,
    Ot,
    Xot,
    Dr3,
    RotPlain,
    RotVerify,
    RotSwitchV1,
    RotSwitchV2,
    Scf,
    /// Bob selects one of the tasks (in this order) after the first message.
    Switch(Vec<Task>),
    ScfSwitch,
}

impl ProtocolId {
    /// Every protocol in the catalog, switches included.
    pub fn all() -> Vec<ProtocolId> {
        use Task::*;
        vec![
            ProtocolId::Bc,
            ProtocolId::Wcf,
            ProtocolId::Ot,
            ProtocolId::Xot,
            ProtocolId::Dr3,
            ProtocolId::RotPlain,
            ProtocolId::RotVerify,
            ProtocolId::RotSwitchV1,
            ProtocolId::RotSwitchV2,
            ProtocolId::Scf,
            ProtocolId::Switch(vec![Bc, Ot]),
            ProtocolId::Switch(vec![Bc, Wcf]),
            ProtocolId::Switch(vec![Ot, Wcf]),
            ProtocolId::Switch(vec![Bc, Wcf, Ot]),
            ProtocolId::Switch(vec![Xot, Dr3]),
            ProtocolId::ScfSwitch,
        ]
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolId::Bc => f.write_str("BC"),
            ProtocolId::Wcf => f.write_str("WCF"),
            ProtocolId::Ot => f.write_str("OT"),
            ProtocolId::Xot => f.write_str("XOT"),
            ProtocolId::Dr3 => f.write_str("DR3"),
            ProtocolId::RotPlain => f.write_str("ROT_PLAIN"),
            ProtocolId::RotVerify => f.write_str("ROT_VERIFY"),
            ProtocolId::RotSwitchV1 => f.write_str("ROT_SWITCH_V1"),
            ProtocolId::RotSwitchV2 => f.write_str("ROT_SWITCH_V2"),
            ProtocolId::Scf => f.write_str("SCF"),
            ProtocolId::Switch(tasks) => {
                write!(f, "SWITCH({})", tasks.iter().map(|t| t.name()).collect::<Vec<_>>().join("+"))
            }
            ProtocolId::ScfSwitch => f.write_str("SCF_SWITCH"),
        }
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        if let Some(inner) = upper.strip_prefix("SWITCH(").and_then(|r| r.strip_suffix(')')) {
            let tasks = inner.split('+').map(str::parse).collect::<Result<Vec<Task>>>()?;
            return Ok(ProtocolId::Switch(tasks));
        }
        ProtocolId::all()
            .into_iter()
            .find(|p| p.to_string() == upper)
            .ok_or_else(|| Error::UnknownModel(format!("unknown protocol `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Party {
    Alice,
    Bob,
}

/// One message: who sends it and which registers travel.
#[derive(Clone, Debug, Serialize)]
pub struct Message {
    pub stage: u8,
    pub sender: Party,
    pub registers: Vec<String>,
    /// Messages of a branch only happen for the listed value of `c`.
    pub when: Option<String>,
}

/// A uniformly distributed honest input.
#[derive(Clone, Debug, Serialize)]
pub struct HonestInput {
    pub party: Party,
    pub symbol: String,
    pub domain: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolSpec {
    #[serde(serialize_with = "display")]
    pub id: ProtocolId,
    pub title: String,
    pub registers: Vec<Register>,
    pub messages: Vec<Message>,
    pub inputs: Vec<HonestInput>,
    pub outcome_rule: String,
}

fn display<S: serde::Serializer>(id: &ProtocolId, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(id)
}

impl ProtocolSpec {
    /// Every register named by a message is declared.
    pub fn validate(&self) -> Result<()> {
        for m in &self.messages {
            for r in &m.registers {
                if !self.registers.iter().any(|reg| &reg.label == r) {
                    return Err(Error::Labeling(format!("{}: message uses undeclared register `{r}`", self.id)));
                }
            }
        }
        Space::from_registers(self.registers.clone())?;
        Ok(())
    }

    pub fn input(&self, symbol: &str) -> Option<&HonestInput> {
        self.inputs.iter().find(|i| i.symbol == symbol)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("protocol descriptors serialize")
    }
}

struct Builder {
    registers: Vec<Register>,
    messages: Vec<Message>,
    inputs: Vec<HonestInput>,
}

impl Builder {
    fn new(registers: &[(&str, usize)]) -> Self {
        Self {
            registers: registers.iter().map(|&(l, d)| Register::new(l, d)).collect(),
            messages: Vec::new(),
            inputs: Vec::new(),
        }
    }

    fn send(mut self, stage: u8, sender: Party, regs: &[&str]) -> Self {
        self.messages.push(Message { stage, sender, registers: regs.iter().map(|r| r.to_string()).collect(), when: None });
        self
    }

    fn send_if(mut self, when: &str, sender: Party, regs: &[&str]) -> Self {
        self.messages.push(Message {
            stage: 2,
            sender,
            registers: regs.iter().map(|r| r.to_string()).collect(),
            when: Some(when.to_string()),
        });
        self
    }

    fn input(mut self, party: Party, symbol: &str, domain: usize) -> Self {
        self.inputs.push(HonestInput { party, symbol: symbol.into(), domain });
        self
    }

    fn finish(self, id: ProtocolId, title: &str, outcome_rule: &str) -> ProtocolSpec {
        ProtocolSpec {
            id,
            title: title.into(),
            registers: self.registers,
            messages: self.messages,
            inputs: self.inputs,
            outcome_rule: outcome_rule.into(),
        }
    }
}

use Party::{Alice, Bob};

/// Descriptor of one protocol.
pub fn protocol_spec(id: &ProtocolId) -> Result<ProtocolSpec> {
    let spec = match id {
        ProtocolId::Bc => Builder::new(&[("A", 3), ("B", 3), ("Y", 2)])
            .input(Alice, "y", 2)
            .send(1, Alice, &["B"])
            .send(2, Alice, &["Y", "A"])
            .finish(id.clone(), "bit commitment", "Bob accepts y when the projection onto phi_y succeeds"),
        ProtocolId::Wcf => Builder::new(&[("A0", 3), ("B0", 3), ("A1", 3), ("B1", 3), ("Y", 2), ("Z", 2)])
            .input(Alice, "y", 2)
            .input(Bob, "z", 2)
            .send(1, Alice, &["B0"])
            .send(2, Alice, &["B1"])
            .send(2, Bob, &["Z"])
            .send(2, Alice, &["Y", "A0"])
            .finish(
                id.clone(),
                "weak coin flipping from EPR pairs",
                "after verifying A_z B_z, both measure the other pair with {|0><0|+|1><1|, |2><2|}; outcome 1 on |2>",
            ),
        ProtocolId::Ot => Builder::new(&[("A", 3), ("B", 3), ("Y", 2), ("X0", 2), ("X1", 2)])
            .input(Alice, "y", 2)
            .input(Bob, "x0", 2)
            .input(Bob, "x1", 2)
            .send(1, Alice, &["B"])
            .send(2, Bob, &["B"])
            .finish(id.clone(), "1-out-of-2 oblivious transfer", "Alice decodes x_y = 0 on projection onto phi_y"),
        ProtocolId::Xot => Builder::new(&[("A", 3), ("B", 3), ("Y", 3), ("X0", 2), ("X1", 2)])
            .input(Alice, "y", 3)
            .input(Bob, "x0", 2)
            .input(Bob, "x1", 2)
            .send(1, Alice, &["B"])
            .send(2, Bob, &["B"])
            .finish(id.clone(), "XOR oblivious transfer", "Alice decodes x_y with x_2 = x_0 xor x_1"),
        ProtocolId::Dr3 => Builder::new(&[("A", 3), ("B", 3), ("Y", 3), ("Z", 3)])
            .input(Alice, "y", 3)
            .input(Bob, "z", 3)
            .send(1, Alice, &["B"])
            .send(2, Bob, &["Z"])
            .send(2, Alice, &["Y", "A"])
            .finish(id.clone(), "die rolling with three outcomes", "on acceptance output d = (y + z mod 3) + 1"),
        ProtocolId::RotPlain => Builder::new(&[("B", 3)])
            .input(Alice, "y", 2)
            .send(1, Alice, &["B"])
            .finish(id.clone(), "Rabin OT by measurement", "Bob measures B in the computational basis: y or lost"),
        ProtocolId::RotVerify => Builder::new(&[("B", 3), ("Y", 2), ("B1", 3)])
            .input(Alice, "y", 2)
            .input(Alice, "y1", 2)
            .send(1, Alice, &["B"])
            .send(2, Alice, &["Y"])
            .send(2, Alice, &["B1"])
            .finish(
                id.clone(),
                "Rabin OT with verification and restart",
                "Bob tests B against phi_y; on acceptance the measurement protocol restarts with fresh y1",
            ),
        ProtocolId::RotSwitchV1 => Builder::new(&[("B0", 3), ("Y0", 2), ("B1", 3), ("C", 2)])
            .input(Alice, "y0", 2)
            .input(Alice, "y1", 2)
            .input(Bob, "c", 2)
            .send(1, Alice, &["B0"])
            .send(2, Bob, &["C"])
            .send_if("c=1", Alice, &["Y0"])
            .send_if("c=1", Alice, &["B1"])
            .finish(
                id.clone(),
                "Rabin OT switch, variant 1",
                "c=0: Bob measures B0; c=1: Bob tests B0 against phi_y0, then measures a fresh B1",
            ),
        ProtocolId::RotSwitchV2 => Builder::new(&[("A0", 3), ("B0", 3), ("Y0", 2), ("A1", 3), ("B1", 3), ("C", 2)])
            .input(Alice, "y0", 2)
            .input(Alice, "y1", 2)
            .input(Bob, "c", 2)
            .send(1, Alice, &["B0"])
            .send(2, Bob, &["C"])
            .send_if("c=1", Alice, &["Y0", "A0"])
            .send_if("c=1", Alice, &["B1"])
            .finish(
                id.clone(),
                "Rabin OT switch, variant 2",
                "c=0: Bob measures B0; c=1: Bob tests A0 B0 against phi_y0, then measures a fresh B1",
            ),
        ProtocolId::Scf => Builder::new(&[("A", 3), ("B", 3), ("Y", 2), ("Z", 2)])
            .input(Alice, "y", 2)
            .input(Bob, "z", 2)
            .send(1, Alice, &["B"])
            .send(2, Bob, &["Z"])
            .send(2, Alice, &["Y", "A"])
            .finish(id.clone(), "strong coin flipping from bit commitment", "on acceptance output y xor z"),
        ProtocolId::ScfSwitch => Builder::new(&[("A0", 3), ("B0", 3), ("A1", 3), ("B1", 3), ("Y", 2), ("Z", 2), ("C", 2)])
            .input(Alice, "y", 2)
            .input(Bob, "z", 2)
            .input(Bob, "c", 2)
            .send(1, Alice, &["B0"])
            .send(2, Bob, &["C"])
            .send_if("c=0", Bob, &["Z"])
            .send_if("c=0", Alice, &["Y", "A0"])
            .send_if("c=1", Alice, &["B1"])
            .send_if("c=1", Bob, &["Z"])
            .send_if("c=1", Alice, &["Y"])
            .finish(
                id.clone(),
                "strong coin flipping switch",
                "c=0: the commitment-based coin flip; c=1: the EPR coin flip",
            ),
        ProtocolId::Switch(tasks) => {
            if tasks.len() < 2 {
                return Err(Error::Domain("a switch needs at least two tasks".into()));
            }
            for (i, t) in tasks.iter().enumerate() {
                if tasks[..i].contains(t) {
                    return Err(Error::Domain(format!("task {} appears twice in a switch", t.name())));
                }
            }
            let trit = tasks.iter().any(|t| matches!(t, Task::Xot | Task::Dr3));
            let b = Builder::new(&[("A", 3), ("B", 3), ("Y", if trit { 3 } else { 2 }), ("C", tasks.len())])
                .input(Alice, "y", if trit { 3 } else { 2 })
                .input(Bob, "c", tasks.len())
                .send(1, Alice, &["B"])
                .send(2, Bob, &["C"]);
            let rule = tasks
                .iter()
                .enumerate()
                .map(|(k, t)| format!("c={k}: {}", t.name()))
                .collect::<Vec<_>>()
                .join("; ");
            b.finish(id.clone(), "stochastic switch", &rule)
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// All descriptors, in catalog order.
pub fn catalog() -> Vec<ProtocolSpec> {
    ProtocolId::all().iter().map(|id| protocol_spec(id).expect("catalog entries are valid")).collect()
}

pub fn catalog_json() -> serde_json::Value {
    serde_json::Value::Array(catalog().iter().map(ProtocolSpec::to_json).collect())
}

/// Measurement stages with their parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `{|phi_y><phi_y|, 1 - |phi_y><phi_y|}` after a reveal of `y`.
    Verify(usize),
    /// `{|0><0| + |1><1|, |2><2|}` on one qutrit.
    CoinOutcome,
    /// Alice's decoding measurement for choice `y`.
    Decode(usize),
    /// Computational basis of one qutrit.
    Computational,
}

fn two_outcome(accept: TensorOperator) -> Result<Vec<TensorOperator>> {
    let reject = TensorOperator::identity(accept.space().clone()).sub(&accept)?;
    Ok(vec![accept, reject])
}

/// POVM used at `stage` of protocol `id`, elements in outcome order.
pub fn measurement(id: &ProtocolId, stage: Stage) -> Result<Vec<TensorOperator>> {
    let unknown = || Error::Domain(format!("protocol {id} has no measurement stage {stage:?}"));
    match (id, stage) {
        (ProtocolId::Bc | ProtocolId::Wcf | ProtocolId::Scf | ProtocolId::RotSwitchV2 | ProtocolId::ScfSwitch, Stage::Verify(y)) => {
            two_outcome(commit_state(y)?.density())
        }
        (ProtocolId::Ot, Stage::Decode(y)) => two_outcome(commit_state(y)?.density()),
        (ProtocolId::Xot, Stage::Decode(y)) | (ProtocolId::Dr3, Stage::Verify(y)) => two_outcome(xot_state(y)?.density()),
        (ProtocolId::RotVerify | ProtocolId::RotSwitchV1, Stage::Verify(y)) => two_outcome(rot_state(y)?.density()),
        (ProtocolId::Wcf | ProtocolId::ScfSwitch, Stage::CoinOutcome) => {
            Ok(vec![level_projector("B", 3, &[0, 1])?, level_projector("B", 3, &[2])?])
        }
        (
            ProtocolId::RotPlain | ProtocolId::RotVerify | ProtocolId::RotSwitchV1 | ProtocolId::RotSwitchV2,
            Stage::Computational,
        ) => (0..3).map(|k| level_projector("B", 3, &[k])).collect(),
        (ProtocolId::Switch(tasks), stage) => {
            for t in tasks {
                if let Ok(m) = measurement(&t.protocol(), stage) {
                    return Ok(m);
                }
            }
            Err(unknown())
        }
        _ => Err(unknown()),
    }
}

/// `|i><j|` as an operator on a fresh single register.
pub fn unit(label: &str, dim: usize, i: usize, j: usize) -> Result<TensorOperator> {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = c(1.0, 0.0);
    TensorOperator::new(Space::new(&[(label, dim)])?, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn commit_states_overlap_in_one_term() {
        let a = commit_state(0).unwrap();
        let b = commit_state(1).unwrap();
        assert_eq!(a.overlap_sq(&b).unwrap(), Rational64::new(1, 4));
        let v = a.vector();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re - s).abs() < 1e-15 && (v[8].re - s).abs() < 1e-15);
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn commit_state_rejects_trit() {
        assert!(commit_state(2).is_err());
        assert!(rot_state(3).is_err());
        assert!(xot_state(3).is_err());
    }

    #[test]
    fn measurements_are_povms() {
        for id in ProtocolId::all() {
            for stage in [Stage::Verify(0), Stage::Verify(1), Stage::CoinOutcome, Stage::Decode(0), Stage::Computational] {
                let Ok(povm) = measurement(&id, stage) else { continue };
                let mut sum = TensorOperator::zeros(povm[0].space().clone());
                for e in &povm {
                    assert!(e.min_eigenvalue() > -1e-12);
                    sum = sum.add(e).unwrap();
                }
                let id_op = TensorOperator::identity(sum.space().clone());
                assert!((sum.matrix() - id_op.matrix()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_stage_is_an_error() {
        assert!(measurement(&ProtocolId::RotPlain, Stage::Verify(0)).is_err());
        assert!(measurement(&ProtocolId::Bc, Stage::Computational).is_err());
    }

    #[test]
    fn catalog_descriptors_validate() {
        let all = catalog();
        assert_eq!(all.len(), ProtocolId::all().len());
        for spec in &all {
            spec.validate().unwrap();
            assert_eq!(spec.id.to_string().parse::<ProtocolId>().unwrap(), spec.id);
        }
    }
}
