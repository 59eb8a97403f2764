//! Honest executions: exact outcome distributions from Born-rule arithmetic
//! on rational amplitudes, and honest strategies written as feasible points
//! of the cheating programs.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::builders::{purification, wcf_purification, ModelId, FIRST_MESSAGE};
use crate::catalog::{
    commit_state, controlled_ot_unitary, protocol_spec, rot_state, to_f64, unit, xot_state, Party, ProtocolId,
    PureState, Task, LOST,
};
use crate::error::{Error, Result};
use crate::tensor::{Space, TensorOperator};

/// Exact probabilities of outcome labels. Labels of a multi-step run are
/// joined with `/`, e.g. `accept/outcome=1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeDistribution {
    probabilities: BTreeMap<String, Rational64>,
}

impl OutcomeDistribution {
    fn add(&mut self, label: impl Into<String>, p: Rational64) {
        if p.is_zero() {
            return;
        }
        *self.probabilities.entry(label.into()).or_insert_with(Rational64::zero) += p;
    }

    fn from_pairs(pairs: impl IntoIterator<Item = (String, Rational64)>) -> Self {
        let mut d = Self::default();
        for (l, p) in pairs {
            d.add(l, p);
        }
        d
    }

    fn prefixed(self, prefix: &str) -> Self {
        Self::from_pairs(self.probabilities.into_iter().map(|(l, p)| (format!("{prefix}/{l}"), p)))
    }

    fn mix_into(&self, weight: Rational64, out: &mut OutcomeDistribution) {
        for (l, p) in &self.probabilities {
            out.add(l.clone(), p * weight);
        }
    }

    pub fn probability(&self, label: &str) -> Rational64 {
        self.probabilities.get(label).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.probabilities.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Rational64)> {
        self.probabilities.iter().map(|(l, p)| (l.as_str(), *p))
    }

    pub fn total(&self) -> Rational64 {
        self.probabilities.values().sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.total() == Rational64::one() && self.probabilities.values().all(|p| *p >= Rational64::zero())
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.probabilities
                .iter()
                .map(|(l, p)| (l.clone(), json!({"exact": p.to_string(), "value": to_f64(p)})))
                .collect(),
        )
    }
}

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// Every honest input symbol of a protocol with its domain size.
pub fn input_domains(id: &ProtocolId) -> Result<Vec<(String, usize)>> {
    let spec = protocol_spec(id)?;
    let mut out: Vec<(String, usize)> = spec.inputs.iter().map(|i| (i.symbol.clone(), i.domain)).collect();
    if let ProtocolId::Switch(tasks) = id {
        for t in tasks {
            for (sym, dom) in input_domains(&t.protocol())? {
                if !out.iter().any(|(s, _)| *s == sym) {
                    out.push((sym, dom));
                }
            }
        }
    }
    Ok(out)
}

type Inputs = BTreeMap<String, usize>;

fn get(inputs: &Inputs, sym: &str) -> usize {
    inputs[sym]
}

/// Two-outcome test `{|target><target|, 1 - ...}` on `state`.
fn test(target: &PureState, state: &PureState) -> Result<Rational64> {
    target.overlap_sq(state)
}

/// Bob's test, followed by `then` on acceptance. An empty `then` leaves the
/// bare `accept` label.
fn verified(target: &PureState, state: &PureState, then: OutcomeDistribution) -> Result<OutcomeDistribution> {
    let accept = test(target, state)?;
    let mut d = OutcomeDistribution::default();
    if then.probabilities.is_empty() {
        d.add("accept", accept);
    } else {
        then.prefixed("accept").mix_into(accept, &mut d);
    }
    d.add("reject", Rational64::one() - accept);
    Ok(d)
}

/// Both parties measure their halves of `pair` with `{|0><0|+|1><1|, |2><2|}`.
fn coin_outcome(pair: &PureState, alice: &str, bob: &str) -> Result<OutcomeDistribution> {
    let mut d = OutcomeDistribution::default();
    for (bob_levels, bob_bit) in [(&[0usize, 1][..], 0), (&[LOST][..], 1)] {
        for (alice_levels, alice_bit) in [(&[0usize, 1][..], 0), (&[LOST][..], 1)] {
            let mut p = Rational64::zero();
            for &bl in bob_levels {
                if let Some((pb, post)) = pair.collapse(bob, bl)? {
                    p += pb * post.probability(alice, alice_levels)?;
                }
            }
            let label = if bob_bit == alice_bit { format!("outcome={bob_bit}") } else { "mismatch".into() };
            d.add(label, p);
        }
    }
    Ok(d)
}

/// Bob measures the single qutrit `reg` of `state` in the computational basis.
fn rabin_outcome(state: &PureState, reg: &str, y: usize) -> Result<OutcomeDistribution> {
    let mut d = OutcomeDistribution::default();
    for level in 0..3 {
        let p = state.probability(reg, &[level])?;
        let label = if level == LOST {
            "lost"
        } else if level == y {
            "received"
        } else {
            "wrong"
        };
        d.add(label, p);
    }
    Ok(d)
}

fn pair_state(y: usize, a: &str, b: &str) -> Result<PureState> {
    commit_state(y)?.relabel(&[a, b])
}

fn run_wcf(y: usize, z: usize) -> Result<OutcomeDistribution> {
    let (a_z, b_z, a_o, b_o) = if z == 0 { ("A0", "B0", "A1", "B1") } else { ("A1", "B1", "A0", "B0") };
    let checked = pair_state(y, a_z, b_z)?;
    let other = pair_state(y, a_o, b_o)?;
    verified(&checked, &checked, coin_outcome(&other, a_o, b_o)?)
}

/// Bob applies `U_{x0 x1}` to `B`; Alice tests the returned state against
/// what she sent.
fn run_oblivious(state: PureState, x0: usize, x1: usize) -> Result<OutcomeDistribution> {
    let sign = |x: usize| if x == 0 { Rational64::one() } else { -Rational64::one() };
    let after = state.apply_diagonal("B", &[sign(x0), sign(x1), Rational64::one()])?;
    let zero = test(&state, &after)?;
    Ok(OutcomeDistribution::from_pairs([
        ("decoded=0".to_string(), zero),
        ("decoded=1".to_string(), Rational64::one() - zero),
    ]))
}

fn run_task(task: Task, inputs: &Inputs) -> Result<OutcomeDistribution> {
    let y = get(inputs, "y");
    match task {
        Task::Bc => {
            let s = commit_state(y)?;
            verified(&s, &s, OutcomeDistribution::default())
        }
        Task::Wcf => run_wcf(y, get(inputs, "z")),
        Task::Ot => run_oblivious(commit_state(y)?, get(inputs, "x0"), get(inputs, "x1")),
        Task::Xot => run_oblivious(xot_state(y)?, get(inputs, "x0"), get(inputs, "x1")),
        Task::Dr3 => {
            let s = xot_state(y)?;
            let d = (y + get(inputs, "z")) % 3 + 1;
            verified(&s, &s, OutcomeDistribution::from_pairs([(format!("d={d}"), Rational64::one())]))
        }
    }
}

/// Outcome distribution for one full assignment of honest inputs.
fn run(id: &ProtocolId, inputs: &Inputs) -> Result<OutcomeDistribution> {
    match id {
        ProtocolId::Bc => run_task(Task::Bc, inputs),
        ProtocolId::Wcf => run_task(Task::Wcf, inputs),
        ProtocolId::Ot => run_task(Task::Ot, inputs),
        ProtocolId::Xot => run_task(Task::Xot, inputs),
        ProtocolId::Dr3 => run_task(Task::Dr3, inputs),
        ProtocolId::RotPlain => {
            let y = get(inputs, "y");
            rabin_outcome(&rot_state(y)?, "B", y)
        }
        ProtocolId::RotVerify => {
            let (y, y1) = (get(inputs, "y"), get(inputs, "y1"));
            let s = rot_state(y)?;
            verified(&s, &s, rabin_outcome(&rot_state(y1)?, "B", y1)?)
        }
        ProtocolId::RotSwitchV1 | ProtocolId::RotSwitchV2 => {
            let (y0, y1, c) = (get(inputs, "y0"), get(inputs, "y1"), get(inputs, "c"));
            let v1 = *id == ProtocolId::RotSwitchV1;
            let first = if v1 { rot_state(y0)? } else { commit_state(y0)? };
            let d = if c == 0 {
                rabin_outcome(&first, "B", y0)?
            } else {
                let fresh = if v1 { rot_state(y1)? } else { commit_state(y1)? };
                verified(&first, &first, rabin_outcome(&fresh, "B", y1)?)?
            };
            Ok(d.prefixed(&format!("c={c}")))
        }
        ProtocolId::Scf => {
            let (y, z) = (get(inputs, "y"), get(inputs, "z"));
            let s = commit_state(y)?;
            verified(&s, &s, OutcomeDistribution::from_pairs([(format!("outcome={}", y ^ z), Rational64::one())]))
        }
        ProtocolId::ScfSwitch => {
            let c = get(inputs, "c");
            let inner = if c == 0 { ProtocolId::Scf } else { ProtocolId::Wcf };
            Ok(run(&inner, inputs)?.prefixed(&format!("c={c}")))
        }
        ProtocolId::Switch(tasks) => {
            let c = get(inputs, "c");
            let task = tasks[c];
            Ok(run_task(task, inputs)?.prefixed(task.name()))
        }
    }
}

/// Exact honest distribution; inputs missing from `fixed` are uniform.
pub fn honest_distribution(id: &ProtocolId, fixed: &BTreeMap<String, usize>) -> Result<OutcomeDistribution> {
    let domains = input_domains(id)?;
    for (sym, value) in fixed {
        let (_, dom) = domains
            .iter()
            .find(|(s, _)| s == sym)
            .ok_or_else(|| Error::Domain(format!("protocol {id} has no input `{sym}`")))?;
        if value >= dom {
            return Err(Error::Domain(format!("input {sym} = {value} is outside 0..{dom}")));
        }
    }
    let free: Vec<&(String, usize)> = domains.iter().filter(|(s, _)| !fixed.contains_key(s)).collect();
    let count: usize = free.iter().map(|(_, d)| d).product();
    let weight = Rational64::new(1, count as i64);
    let mut out = OutcomeDistribution::default();
    for k in 0..count {
        let mut inputs = fixed.clone();
        let mut rest = k;
        for (sym, dom) in &free {
            inputs.insert(sym.clone(), rest % dom);
            rest /= dom;
        }
        run(id, &inputs)?.mix_into(weight, &mut out);
    }
    Ok(out)
}

/// What the completeness clause promises for one input assignment.
fn promised(id: &ProtocolId, inputs: &Inputs) -> OutcomeDistribution {
    let one = Rational64::one;
    let rabin = |prefix: &str| {
        OutcomeDistribution::from_pairs([(format!("{prefix}received"), half()), (format!("{prefix}lost"), half())])
    };
    let task = |t: Task| -> OutcomeDistribution {
        let y = inputs["y"];
        match t {
            Task::Bc => OutcomeDistribution::from_pairs([("accept".to_string(), one())]),
            Task::Wcf => OutcomeDistribution::from_pairs([
                ("accept/outcome=0".to_string(), half()),
                ("accept/outcome=1".to_string(), half()),
            ]),
            Task::Ot | Task::Xot => {
                let bits = [inputs["x0"], inputs["x1"], inputs["x0"] ^ inputs["x1"]];
                OutcomeDistribution::from_pairs([(format!("decoded={}", bits[y]), one())])
            }
            Task::Dr3 => OutcomeDistribution::from_pairs([(format!("accept/d={}", (y + inputs["z"]) % 3 + 1), one())]),
        }
    };
    match id {
        ProtocolId::Bc => task(Task::Bc),
        ProtocolId::Wcf => task(Task::Wcf),
        ProtocolId::Ot => task(Task::Ot),
        ProtocolId::Xot => task(Task::Xot),
        ProtocolId::Dr3 => task(Task::Dr3),
        ProtocolId::RotPlain => rabin(""),
        ProtocolId::RotVerify => rabin("accept/"),
        ProtocolId::RotSwitchV1 | ProtocolId::RotSwitchV2 => {
            let c = inputs["c"];
            rabin(if c == 0 { "" } else { "accept/" }).prefixed(&format!("c={c}"))
        }
        ProtocolId::Scf => {
            OutcomeDistribution::from_pairs([(format!("accept/outcome={}", inputs["y"] ^ inputs["z"]), one())])
        }
        ProtocolId::ScfSwitch => {
            let c = inputs["c"];
            promised(if c == 0 { &ProtocolId::Scf } else { &ProtocolId::Wcf }, inputs).prefixed(&format!("c={c}"))
        }
        ProtocolId::Switch(tasks) => {
            let t = tasks[inputs["c"]];
            task(t).prefixed(t.name())
        }
    }
}

/// One enumerated input assignment of a completeness check.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessCase {
    pub inputs: BTreeMap<String, usize>,
    pub distribution: Value,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub protocol: String,
    pub cases: Vec<CompletenessCase>,
    /// Distribution with every input uniform.
    pub overall: Value,
    pub passed: bool,
}

/// Enumerate every honest input assignment and compare the exact outcome
/// distribution with the protocol's completeness clause.
pub fn completeness_check(id: &ProtocolId) -> Result<CompletenessReport> {
    let domains = input_domains(id)?;
    let count: usize = domains.iter().map(|(_, d)| d).product();
    let mut cases = Vec::with_capacity(count);
    for k in 0..count {
        let mut inputs = Inputs::new();
        let mut rest = k;
        for (sym, dom) in &domains {
            inputs.insert(sym.clone(), rest % dom);
            rest /= dom;
        }
        let got = run(id, &inputs)?;
        let passed = got.is_normalized() && got == promised(id, &inputs);
        cases.push(CompletenessCase { inputs, distribution: got.to_json(), passed });
    }
    let overall = honest_distribution(id, &BTreeMap::new())?;
    let passed = overall.is_normalized() && cases.iter().all(|c| c.passed);
    Ok(CompletenessReport { protocol: id.to_string(), cases, overall: overall.to_json(), passed })
}

/// Completeness reports for the whole catalog, as JSON.
pub fn report_json() -> Result<Value> {
    let reports = ProtocolId::all().iter().map(completeness_check).collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_value(reports)?)
}

fn op_product(a: &TensorOperator, b: &TensorOperator) -> Result<TensorOperator> {
    let b = b.aligned_to(a.space())?;
    TensorOperator::new(a.space().clone(), a.matrix() * b.matrix())
}

fn classical(label: &str, dim: usize, value: usize) -> Result<TensorOperator> {
    unit(label, dim, value, value)
}

/// Honest Alice in the optimal-cheating programs: she commits to `y = 0`
/// and plays the rest of the protocol honestly.
fn honest_alice(model: &ModelId) -> Result<BTreeMap<String, TensorOperator>> {
    let mut out = BTreeMap::new();
    let phi = commit_state(0)?;
    match model {
        ModelId::Base(Task::Bc, _) | ModelId::Base(Task::Dr3, _) => {
            let reveals = if matches!(model, ModelId::Base(Task::Bc, _)) { 2 } else { 3 };
            let state = if reveals == 2 { phi } else { xot_state(0)? };
            out.insert(FIRST_MESSAGE.into(), state.density().partial_trace(&["A"])?);
            for k in 0..reveals {
                out.insert(format!("reveal{k}"), state.density());
            }
        }
        ModelId::Base(Task::Wcf, _) => {
            let pairs = pair_state(0, "A0", "B0")?.kron(&pair_state(0, "A1", "B1")?)?.density();
            let with_y = classical("Y", 2, 0)?.kron(&pairs)?;
            for z in 0..2 {
                out.insert(format!("reveal{z}"), with_y.clone());
            }
            let sent = pairs.partial_trace(&["A0", "A1"])?;
            out.insert(FIRST_MESSAGE.into(), sent.partial_trace(&["B1"])?);
            out.insert("sent".into(), sent);
        }
        ModelId::Base(task @ (Task::Ot | Task::Xot), _) => {
            // Alice decodes x_0 with the honest test and guesses x_1 = 0.
            let state = if *task == Task::Ot { phi } else { xot_state(0)? };
            let bits = Space::new(&[("X0", 2), ("X1", 2)])?;
            let uniform = TensorOperator::from_real(bits, &nalgebra::DMatrix::from_element(4, 4, 0.25))?;
            let u = controlled_ot_unitary()?;
            let joint = uniform.kron(&state.density())?;
            let u = u.embed(joint.space())?;
            let evolved = op_product(&op_product(&u, &joint)?, &u.adjoint())?;
            let accept = state.density().embed(joint.space())?;
            let reject = TensorOperator::identity(joint.space().clone()).sub(&accept)?;
            let mut guess = TensorOperator::zeros(Space::new(&[("X0", 2), ("X1", 2), ("G0", 2), ("G1", 2)])?);
            for (g0, m) in [(0, accept), (1, reject)] {
                let post = op_product(&op_product(&m, &evolved)?, &m)?.partial_trace(&["A", "B"])?;
                let branch = post.kron(&classical("G0", 2, g0)?)?.kron(&classical("G1", 2, 0)?)?;
                guess = guess.add(&branch)?;
            }
            out.insert(FIRST_MESSAGE.into(), state.density().partial_trace(&["A"])?);
            out.insert("guess".into(), guess);
        }
        ModelId::Rot { variant: 1, .. } => {
            let message = rot_state(0)?.density();
            out.insert("guess".into(), classical("G", 2, 0)?.kron(&message)?);
            out.insert("reveal".into(), classical("Y", 2, 0)?.kron(&message)?);
            out.insert(FIRST_MESSAGE.into(), message);
        }
        ModelId::Rot { variant: 2, .. } => {
            out.insert(FIRST_MESSAGE.into(), phi.density().partial_trace(&["A"])?);
            out.insert("reveal".into(), classical("Y", 2, 0)?.kron(&phi.density())?);
        }
        _ => return Err(Error::Unsupported(format!("no honest Alice point for {model}"))),
    }
    Ok(out)
}

/// Honest Bob: he leaves Alice's registers alone and guesses uniformly.
fn honest_bob(model: &ModelId) -> Result<BTreeMap<String, TensorOperator>> {
    let (alice, extra) = match model {
        ModelId::Base(Task::Bc | Task::Ot, _) => {
            let psi = purification(&[("Y", 2), ("A", 3), ("B", 3)], |y| vec![vec![y, y, y], vec![y, 2, 2]], 2)?;
            (psi.density().partial_trace(&["B"])?, ("G", 2))
        }
        ModelId::Base(Task::Wcf, _) => (wcf_purification()?.density().partial_trace(&["B0", "B1"])?, ("Z", 2)),
        _ => return Err(Error::Unsupported(format!("no honest Bob point for {model}"))),
    };
    let coin = TensorOperator::identity(Space::new(&[extra])?).scale(0.5);
    Ok(BTreeMap::from([("final".to_string(), alice.kron(&coin)?)]))
}

/// The honest strategy of the cheating party as a feasible point of the
/// model's program.
pub fn honest_feasible_point(model: &ModelId) -> Result<BTreeMap<String, TensorOperator>> {
    match model.party() {
        Party::Alice => honest_alice(model),
        Party::Bob => honest_bob(model),
    }
}

/// Alice in the first Rabin switch prepares the mixture of both test
/// states, always passes the test, and claims "lost" on the measurement
/// branch, where she is right half the time.
pub fn rot_verify_then_defect() -> Result<BTreeMap<String, TensorOperator>> {
    let mut message = TensorOperator::zeros(Space::new(&[("B", 3)])?);
    let mut reveal = TensorOperator::zeros(Space::new(&[("Y", 2), ("B", 3)])?);
    for y in 0..2 {
        let phi = rot_state(y)?.density().scale(0.5);
        message = message.add(&phi)?;
        reveal = reveal.add(&classical("Y", 2, y)?.kron(&phi)?)?;
    }
    let guess = classical("G", 2, 1)?.kron(&message)?;
    Ok(BTreeMap::from([
        (FIRST_MESSAGE.to_string(), message),
        ("reveal".to_string(), reveal),
        ("guess".to_string(), guess),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::verify_candidate;

    fn fixed(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(s, v)| (s.to_string(), *v)).collect()
    }

    #[test]
    fn bit_commitment_always_accepts() {
        for y in 0..2 {
            let d = honest_distribution(&ProtocolId::Bc, &fixed(&[("y", y)])).unwrap();
            assert_eq!(d.probability("accept"), Rational64::one());
        }
    }

    #[test]
    fn coin_flip_is_fair() {
        let d = honest_distribution(&ProtocolId::Wcf, &BTreeMap::new()).unwrap();
        assert_eq!(d.probability("accept/outcome=0"), half());
        assert_eq!(d.probability("accept/outcome=1"), half());
        assert!(d.is_normalized());
    }

    #[test]
    fn oblivious_transfer_decodes_selected_bit() {
        for y in 0..2 {
            for x0 in 0..2 {
                for x1 in 0..2 {
                    let d = honest_distribution(&ProtocolId::Ot, &fixed(&[("y", y), ("x0", x0), ("x1", x1)])).unwrap();
                    let xy = if y == 0 { x0 } else { x1 };
                    assert_eq!(d.probability(&format!("decoded={xy}")), Rational64::one());
                }
            }
        }
    }

    #[test]
    fn rabin_switch_splits_evenly_in_both_branches() {
        for c in 0..2 {
            let d = honest_distribution(&ProtocolId::RotSwitchV1, &fixed(&[("c", c)])).unwrap();
            let pre = if c == 0 { "c=0/" } else { "c=1/accept/" };
            assert_eq!(d.probability(&format!("{pre}received")), half());
            assert_eq!(d.probability(&format!("{pre}lost")), half());
        }
    }

    #[test]
    fn die_roll_is_uniform() {
        let d = honest_distribution(&ProtocolId::Dr3, &BTreeMap::new()).unwrap();
        for k in 1..=3 {
            assert_eq!(d.probability(&format!("accept/d={k}")), Rational64::new(1, 3));
        }
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(honest_distribution(&ProtocolId::Bc, &fixed(&[("y", 2)])).is_err());
        assert!(honest_distribution(&ProtocolId::Bc, &fixed(&[("q", 0)])).is_err());
    }

    #[test]
    fn whole_catalog_is_complete() {
        for id in ProtocolId::all() {
            let r = completeness_check(&id).unwrap();
            assert!(r.passed, "{id}: {:?}", r.cases.iter().find(|c| !c.passed));
        }
    }

    #[test]
    fn honest_points_are_feasible_and_meet_trivial_bounds() {
        let mut checked = 0;
        for m in ModelId::all() {
            let Ok(point) = honest_feasible_point(&m) else { continue };
            checked += 1;
            let rep = verify_candidate(&m.build().unwrap(), &point, 1e-9).unwrap();
            assert!(rep.feasible, "{m}: {rep:?}");
            assert!(rep.objective >= 0.5 - 1e-12, "{m}: {}", rep.objective);
        }
        assert_eq!(checked, 10);
    }

    #[test]
    fn verify_then_defect_reaches_three_quarters() {
        let m = ModelId::Rot { variant: 1, party: Party::Alice };
        let rep = verify_candidate(&m.build().unwrap(), &rot_verify_then_defect().unwrap(), 1e-9).unwrap();
        assert!(rep.feasible);
        assert!((rep.objective - 0.75).abs() < 1e-12);
    }
}
