//! Honest two-party protocols with all measurements deferred.
//!
//! A protocol acts on a [`RegisterLayout`] whose `BobInput` factors `X0`, `X1`
//! hold Bob's data bits. Bob's unitaries are controlled on those registers, so
//! one description covers both honest runs (basis inputs) and Bob's purified
//! attack (superposed inputs).

mod json;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{eigh, trace_norm, CMat, DensityOp, Owner, RegisterLayout, StateVector};
use crate::qcore::TwoOutcomeMeasurement;
use crate::{TAU_EIG, TAU_NORM};

pub use json::{load_protocol, parse_protocol};

pub const X0: &str = "X0";
pub const X1: &str = "X1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Actor {
    Alice,
    Bob,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::Alice => f.write_str("Alice"),
            Actor::Bob => f.write_str("Bob"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Round {
    pub actor: Actor,
    /// Acts on the actor's registers: Alice ∪ Message for Alice,
    /// Bob ∪ Message ∪ BobInput for Bob, in layout order.
    pub unitary: CMat,
    /// Whether the message registers change hands after this round.
    pub send: bool,
}

impl Round {
    pub fn new(actor: Actor, unitary: CMat, send: bool) -> Self {
        Round { actor, unitary, send }
    }
}

/// A validated honest protocol.
#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    name: String,
    layout: RegisterLayout,
    alice_prep: [CMat; 2],
    rounds: Vec<Round>,
    alice_output: [TwoOutcomeMeasurement; 2],
    alice_final: Vec<usize>,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

/// Checks that `u`, acting on the factors `acting` of `layout`, is the
/// identity on the factors `trivial` (a subset of `acting`).
fn acts_trivially_on(u: &CMat, layout: &RegisterLayout, acting: &[usize], trivial: &[usize]) -> bool {
    if trivial.is_empty() {
        return true;
    }
    let local = layout.restrict(acting).expect("acting factors form a layout");
    let pos: Vec<usize> = trivial.iter().map(|t| acting.iter().position(|a| a == t).unwrap()).collect();
    let bp = local.bipartition(&pos);
    let mut reduced = CMat::zeros(bp.rest_dim, bp.rest_dim);
    for i in 0..u.rows() {
        for j in 0..u.cols() {
            if bp.sub[i] == 0 && bp.sub[j] == 0 {
                reduced.set(bp.rest[i], bp.rest[j], u.get(i, j));
            }
        }
    }
    (0..u.rows()).all(|i| {
        (0..u.cols()).all(|j| {
            let expect = if bp.sub[i] == bp.sub[j] {
                reduced.get(bp.rest[i], bp.rest[j])
            } else {
                Default::default()
            };
            (u.get(i, j) - expect).norm() <= TAU_NORM
        })
    })
}

/// Checks that `u` never couples different computational basis values of
/// the factors `control` (a subset of `acting`).
fn is_controlled_on(u: &CMat, layout: &RegisterLayout, acting: &[usize], control: &[usize]) -> bool {
    let local = layout.restrict(acting).expect("acting factors form a layout");
    let pos: Vec<usize> = control.iter().map(|t| acting.iter().position(|a| a == t).unwrap()).collect();
    let bp = local.bipartition(&pos);
    (0..u.rows()).all(|i| {
        (0..u.cols()).all(|j| bp.sub[i] == bp.sub[j] || u.get(i, j).norm() <= TAU_NORM)
    })
}

impl ProtocolSpec {
    pub fn new(
        name: impl Into<String>,
        layout: RegisterLayout,
        alice_prep: [CMat; 2],
        rounds: Vec<Round>,
        alice_output: [TwoOutcomeMeasurement; 2],
    ) -> Result<Self> {
        let name = name.into();
        if layout.indices_where(|f| f.owner == Owner::Alice).is_empty() {
            return Err(spec_err("layout needs at least one Alice-owned factor"));
        }
        let inputs = layout.indices_where(|f| f.owner == Owner::BobInput);
        let x_idx = [X0, X1]
            .iter()
            .map(|n| layout.index_of(n).map_err(|_| spec_err(format!("missing BobInput factor {n}"))))
            .collect::<Result<Vec<_>>>()?;
        for &k in &x_idx {
            let f = &layout.factors()[k];
            if f.owner != Owner::BobInput || f.dim != 2 {
                return Err(spec_err(format!("{} must be a BobInput qubit", f.name)));
            }
        }
        if inputs.len() != 2 {
            return Err(spec_err("only X0 and X1 may be BobInput factors"));
        }

        let message = layout.indices_where(|f| f.owner == Owner::Message);
        let alice_acting = Self::acting_set(&layout, Actor::Alice);
        let bob_acting = Self::acting_set(&layout, Actor::Bob);
        let alice_dim = layout.dim_of(&alice_acting);
        for (a, u) in alice_prep.iter().enumerate() {
            if u.rows() != alice_dim || u.cols() != alice_dim {
                return Err(spec_err(format!(
                    "alice_prep[{a}] is {}x{}, expected {alice_dim}x{alice_dim}",
                    u.rows(),
                    u.cols()
                )));
            }
            if !u.is_unitary(TAU_NORM) {
                return Err(spec_err(format!("alice_prep[{a}] is not unitary")));
            }
        }

        let mut holder = Actor::Alice;
        for (k, round) in rounds.iter().enumerate() {
            let acting = Self::acting_set(&layout, round.actor);
            let dim = layout.dim_of(&acting);
            let u = &round.unitary;
            if u.rows() != dim || u.cols() != dim {
                return Err(spec_err(format!(
                    "round {k} ({}) unitary is {}x{}, expected {dim}x{dim}",
                    round.actor,
                    u.rows(),
                    u.cols()
                )));
            }
            if !u.is_unitary(TAU_NORM) {
                return Err(spec_err(format!("round {k} unitary is not unitary")));
            }
            if round.actor != holder && !acts_trivially_on(u, &layout, &acting, &message) {
                return Err(spec_err(format!(
                    "round {k}: {} acts on the message while {holder} holds it",
                    round.actor
                )));
            }
            if round.actor == Actor::Bob && !is_controlled_on(u, &layout, &bob_acting, &x_idx) {
                return Err(spec_err(format!(
                    "round {k}: Bob's unitary is not controlled on X0 X1"
                )));
            }
            if round.send {
                if message.is_empty() {
                    return Err(spec_err(format!("round {k} sends but there is no message")));
                }
                if round.actor != holder {
                    return Err(spec_err(format!(
                        "round {k}: {} sends a message held by {holder}",
                        round.actor
                    )));
                }
                holder = match holder {
                    Actor::Alice => Actor::Bob,
                    Actor::Bob => Actor::Alice,
                };
            }
        }

        let alice_final = layout.indices_where(|f| {
            f.owner == Owner::Alice || (f.owner == Owner::Message && holder == Actor::Alice)
        });
        let out_dim = layout.dim_of(&alice_final);
        for (a, m) in alice_output.iter().enumerate() {
            if m.dim() != out_dim {
                return Err(spec_err(format!(
                    "alice_output[{a}] has dimension {}, Alice ends holding dimension {out_dim}",
                    m.dim()
                )));
            }
        }

        Ok(ProtocolSpec { name, layout, alice_prep, rounds, alice_output, alice_final })
    }

    /// Factors an actor's unitaries act on, in layout order.
    pub fn acting_set(layout: &RegisterLayout, actor: Actor) -> Vec<usize> {
        layout.indices_where(|f| match actor {
            Actor::Alice => matches!(f.owner, Owner::Alice | Owner::Message),
            Actor::Bob => matches!(f.owner, Owner::Bob | Owner::Message | Owner::BobInput),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn alice_prep(&self, a: u8) -> &CMat {
        &self.alice_prep[a as usize]
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn alice_output(&self, a: u8) -> &TwoOutcomeMeasurement {
        &self.alice_output[a as usize]
    }

    /// Factors Alice holds when the protocol ends.
    pub fn alice_final_factors(&self) -> &[usize] {
        &self.alice_final
    }

    /// Factors Bob holds at the end, excluding his input registers.
    pub fn bob_final_factors(&self) -> Vec<usize> {
        self.layout
            .indices_where(|f| f.owner != Owner::BobInput)
            .into_iter()
            .filter(|k| !self.alice_final.contains(k))
            .collect()
    }

    pub fn x_indices(&self) -> [usize; 2] {
        [self.layout.index_of(X0).unwrap(), self.layout.index_of(X1).unwrap()]
    }

    /// Runs alice_prep and every round from `initial`.
    pub fn evolve(&self, a: u8, initial: &StateVector) -> Result<StateVector> {
        let alice = Self::acting_set(&self.layout, Actor::Alice);
        let bob = Self::acting_set(&self.layout, Actor::Bob);
        let mut state = initial.apply_local(&self.alice_prep[a as usize], &alice)?;
        for round in &self.rounds {
            let idx = match round.actor {
                Actor::Alice => &alice,
                Actor::Bob => &bob,
            };
            state = state.apply_local(&round.unitary, idx)?;
        }
        Ok(state)
    }
}

fn check_bit(name: &str, v: u8) -> Result<()> {
    if v > 1 {
        return Err(spec_err(format!("{name} must be a bit, got {v}")));
    }
    Ok(())
}

/// Final joint state of an honest run on inputs `a`, `x0`, `x1`.
pub fn run_honest(spec: &ProtocolSpec, a: u8, x0: u8, x1: u8) -> Result<StateVector> {
    check_bit("a", a)?;
    check_bit("x0", x0)?;
    check_bit("x1", x1)?;
    let mut digits = vec![0; spec.layout.len()];
    let [i0, i1] = spec.x_indices();
    digits[i0] = x0 as usize;
    digits[i1] = x1 as usize;
    let init = StateVector::basis(spec.layout.clone(), &digits)?;
    let out = spec.evolve(a, &init)?;
    StateVector::new(out.layout().clone(), out.amps().to_vec())
}

/// Index of `(a, x0, x1)` in the eight-entry families below.
pub fn input_index(a: u8, x0: u8, x1: u8) -> usize {
    ((a as usize) << 2) | ((x0 as usize) << 1) | x1 as usize
}

/// All eight `(a, x0, x1)` triples in [`input_index`] order.
pub fn all_inputs() -> impl Iterator<Item = (u8, u8, u8)> {
    (0..8u8).map(|k| (k >> 2, (k >> 1) & 1, k & 1))
}

#[derive(Clone, Debug)]
pub struct FinalStates {
    pub spec_name: String,
    states: Vec<StateVector>,
    pub alice_factors: Vec<String>,
}

impl FinalStates {
    pub fn get(&self, a: u8, x0: u8, x1: u8) -> &StateVector {
        &self.states[input_index(a, x0, x1)]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StateVector> {
        self.states.iter()
    }
}

pub fn all_final_states(spec: &ProtocolSpec) -> Result<FinalStates> {
    let states = all_inputs()
        .map(|(a, x0, x1)| run_honest(spec, a, x0, x1))
        .collect::<Result<Vec<_>>>()?;
    Ok(FinalStates {
        spec_name: spec.name.clone(),
        states,
        alice_factors: spec.layout.names_at(&spec.alice_final),
    })
}

/// The eight reduced states `ρ_{a,x0,x1}` on Alice's end-of-protocol registers.
#[derive(Clone, Debug)]
pub struct ReducedFamily {
    rho: Vec<DensityOp>,
}

impl ReducedFamily {
    /// Family from eight states in [`input_index`] order.
    pub fn new(rho: Vec<DensityOp>) -> Result<Self> {
        if rho.len() != 8 {
            return Err(Error::Shape(format!("a reduced family has 8 states, got {}", rho.len())));
        }
        if rho.iter().any(|r| r.dim() != rho[0].dim()) {
            return Err(Error::Shape("reduced states of different dimensions".into()));
        }
        Ok(ReducedFamily { rho })
    }

    pub fn get(&self, a: u8, x0: u8, x1: u8) -> &DensityOp {
        &self.rho[input_index(a, x0, x1)]
    }

    pub fn dim(&self) -> usize {
        self.rho[0].dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DensityOp> {
        self.rho.iter()
    }

    /// The four pairs compared by the attacks: for `a = 0` the pairs differing
    /// in `x1` (one per `x0`), for `a = 1` the pairs differing in `x0`.
    pub fn hidden_bit_pairs(&self) -> [(&DensityOp, &DensityOp); 4] {
        [
            (self.get(0, 0, 0), self.get(0, 0, 1)),
            (self.get(0, 1, 0), self.get(0, 1, 1)),
            (self.get(1, 0, 0), self.get(1, 1, 0)),
            (self.get(1, 0, 1), self.get(1, 1, 1)),
        ]
    }
}

pub fn reduce_alice(fs: &FinalStates) -> Result<ReducedFamily> {
    let rho = fs
        .states
        .iter()
        .map(|s| s.reduced_on(&fs.alice_factors))
        .collect::<Result<Vec<_>>>()?;
    ReducedFamily::new(rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub spec_name: String,
    pub passed: bool,
    /// `‖P_{a,0} P_{a,1}‖₁` for the support projectors, per `a`.
    pub support_overlap: [f64; 2],
    /// Smallest probability over the 8 honest runs that Alice's output
    /// measurement returns `x_a`.
    pub min_output_prob: f64,
    pub failures: Vec<String>,
}

fn support_projector(rho: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(rho)?;
    let n = rho.rows();
    let mut p = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        if v > TAU_EIG {
            let col: Vec<_> = (0..n).map(|r| vecs.get(r, k)).collect();
            p = &p + &CMat::projector(&col);
        }
    }
    Ok(p)
}

fn check_completeness(spec: &ProtocolSpec) -> Result<CompletenessReport> {
    let rf = reduce_alice(&all_final_states(spec)?)?;
    let mut failures = Vec::new();
    let mut support_overlap = [0.0; 2];
    for a in 0..2u8 {
        let mut sums = [CMat::zeros(rf.dim(), rf.dim()), CMat::zeros(rf.dim(), rf.dim())];
        for (aa, x0, x1) in all_inputs() {
            if aa == a {
                let v = if a == 0 { x0 } else { x1 };
                sums[v as usize] = &sums[v as usize] + rf.get(a, x0, x1).mat();
            }
        }
        let p0 = support_projector(&sums[0])?;
        let p1 = support_projector(&sums[1])?;
        let ov = trace_norm(&(&p0 * &p1))?;
        support_overlap[a as usize] = ov;
        if ov > TAU_EIG {
            failures.push(format!("a={a}: supports for x_a=0 and x_a=1 overlap ({ov:.3e})"));
        }
    }
    let mut min_output_prob = 1.0f64;
    for (a, x0, x1) in all_inputs() {
        let m = spec.alice_output(a);
        let rho = rf.get(a, x0, x1);
        let xa = if a == 0 { x0 } else { x1 };
        let p = if xa == 0 { m.prob_pos(rho) } else { m.prob_neg(rho) };
        min_output_prob = min_output_prob.min(p);
        if p < 1.0 - TAU_EIG {
            failures.push(format!(
                "alice_output[{a}] returns x_a on (a={a},x0={x0},x1={x1}) with probability {p:.6}"
            ));
        }
    }
    Ok(CompletenessReport {
        spec_name: spec.name.clone(),
        passed: failures.is_empty(),
        support_overlap,
        min_output_prob,
        failures,
    })
}

/// Does honest Alice learn `x_a` with certainty? Failures are reported, not
/// raised.
pub fn validate_completeness(spec: &ProtocolSpec) -> CompletenessReport {
    check_completeness(spec).unwrap_or_else(|e| CompletenessReport {
        spec_name: spec.name.clone(),
        passed: false,
        support_overlap: [f64::NAN; 2],
        min_output_prob: f64::NAN,
        failures: vec![e.to_string()],
    })
}
