//! Concrete protocols and the coin-flip mixture of the two extremes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{all_inputs, reduce_alice, all_final_states, Actor, ProtocolSpec, Round, X0, X1};
use crate::qcore::{kron, CMat, Factor, Owner, RegisterLayout, TwoOutcomeMeasurement, C64};
use crate::random::{random_unitary, seeded_rng, stream_rng};

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Unitary whose first column is the unit vector `target`.
fn unitary_from_first_column(target: &[C64]) -> CMat {
    let n = target.len();
    let t0 = target[0];
    let phase = if t0.norm() > 0.0 { t0 / t0.norm() } else { r(1.0) };
    // Householder reflection sending e0 to target·phasē (real overlap with e0).
    let t: Vec<C64> = target.iter().map(|z| z * phase.conj()).collect();
    let mut w = t.iter().map(|z| -z).collect::<Vec<_>>();
    w[0] += r(1.0);
    let wn: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let h = if wn < 1e-30 {
        CMat::identity(n)
    } else {
        &CMat::identity(n) - &CMat::outer(&w, &w).scale_re(2.0 / wn)
    };
    h.scale(phase)
}

fn qutrit_pair(i: usize, j: usize) -> usize {
    3 * i + j
}

/// `(|aa⟩ + sign·|22⟩)/√2` on two qutrits.
fn cks_state(a: usize, sign: f64) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![r(0.0); 9];
    v[qutrit_pair(a, a)] = r(s);
    v[qutrit_pair(2, 2)] = r(sign * s);
    v
}

/// `|m⟩ ↦ (−1)^{x_m}|m⟩` for m ∈ {0, 1} and `|2⟩ ↦ |2⟩`.
fn cks_phase(m: usize, x0: usize, x1: usize) -> f64 {
    match m {
        0 if x0 == 1 => -1.0,
        1 if x1 == 1 => -1.0,
        _ => 1.0,
    }
}

fn cks_measurements(conj: Option<&CMat>) -> Result<[TwoOutcomeMeasurement; 2]> {
    let make = |a: usize| {
        let minus = CMat::projector(&cks_state(a, -1.0));
        let neg = match conj {
            Some(w) => &(w * &minus) * &w.adjoint(),
            None => minus,
        };
        TwoOutcomeMeasurement::new(&CMat::identity(9) - &neg, neg)
    };
    Ok([make(0)?, make(1)?])
}

/// The qutrit protocol: Alice prepares `(|aa⟩ + |22⟩)/√2`, sends the second
/// qutrit, Bob applies his input-controlled phases and returns it.
pub fn build_cks() -> ProtocolSpec {
    let layout = RegisterLayout::new(vec![
        Factor::new("A", 3, Owner::Alice),
        Factor::new("M", 3, Owner::Message),
        Factor::new(X0, 2, Owner::BobInput),
        Factor::new(X1, 2, Owner::BobInput),
    ])
    .expect("static layout");
    let prep = [unitary_from_first_column(&cks_state(0, 1.0)), unitary_from_first_column(&cks_state(1, 1.0))];
    // Bob acts on M ⊗ X0 ⊗ X1.
    let bob = CMat::from_fn(12, 12, |i, j| {
        if i != j {
            return r(0.0);
        }
        r(cks_phase(i / 4, (i >> 1) & 1, i & 1))
    });
    let rounds = vec![
        Round::new(Actor::Alice, CMat::identity(9), true),
        Round::new(Actor::Bob, bob, true),
    ];
    ProtocolSpec::new("cks", layout, prep, rounds, cks_measurements(None).expect("static"))
        .expect("the qutrit protocol is valid")
}

/// Bob sends both data bits to Alice.
pub fn build_trivial() -> ProtocolSpec {
    let layout = RegisterLayout::new(vec![
        Factor::new("A", 2, Owner::Alice),
        Factor::new("M", 4, Owner::Message),
        Factor::new(X0, 2, Owner::BobInput),
        Factor::new(X1, 2, Owner::BobInput),
    ])
    .expect("static layout");
    // Bob acts on M ⊗ X0 ⊗ X1: |m, x⟩ ↦ |m ⊕ x, x⟩ with x = 2·x0 + x1.
    let bob = CMat::from_fn(16, 16, |i, j| {
        let (m_i, x_i) = (i / 4, i % 4);
        let (m_j, x_j) = (j / 4, j % 4);
        if x_i == x_j && m_i == (m_j ^ x_j) {
            r(1.0)
        } else {
            r(0.0)
        }
    });
    let rounds = vec![
        Round::new(Actor::Alice, CMat::identity(8), true),
        Round::new(Actor::Bob, bob, true),
    ];
    // Alice holds A ⊗ M; outcome pos reads bit a of M as 0.
    let read = |a: usize| {
        let bit_zero: Vec<f64> = (0..4)
            .map(|m| if (m >> (1 - a)) & 1 == 0 { 1.0 } else { 0.0 })
            .collect();
        let pos = kron(&CMat::identity(2), &CMat::from_real_diag(&bit_zero));
        TwoOutcomeMeasurement::from_projector(pos).expect("diagonal projector")
    };
    let prep = [CMat::identity(8), CMat::identity(8)];
    ProtocolSpec::new("trivial", layout, prep, rounds, [read(0), read(1)])
        .expect("the trivial protocol is valid")
}

/// The qutrit protocol dressed with seeded local unitaries: a rotation of
/// Alice's kept qutrit after preparation, and an input-independent rotation
/// of the message qutrit plus a private Bob qubit at the end of Bob's round.
/// Alice's output measurement is conjugated accordingly, so completeness is
/// preserved.
pub fn random_complete_protocol(seed: u64) -> ProtocolSpec {
    let mut rng = seeded_rng(seed);
    let w_a = random_unitary(3, &mut rng);
    let v_m = random_unitary(3, &mut rng);
    let r_b = random_unitary(2, &mut rng);
    let layout = RegisterLayout::new(vec![
        Factor::new("A", 3, Owner::Alice),
        Factor::new("M", 3, Owner::Message),
        Factor::new("B", 2, Owner::Bob),
        Factor::new(X0, 2, Owner::BobInput),
        Factor::new(X1, 2, Owner::BobInput),
    ])
    .expect("static layout");
    let alice_rot = kron(&w_a, &CMat::identity(3));
    let prep = [
        &alice_rot * &unitary_from_first_column(&cks_state(0, 1.0)),
        &alice_rot * &unitary_from_first_column(&cks_state(1, 1.0)),
    ];
    // Bob acts on M ⊗ B ⊗ X0 ⊗ X1 (dimension 24).
    let phase = CMat::from_fn(24, 24, |i, j| {
        if i != j {
            return r(0.0);
        }
        r(cks_phase(i / 8, (i >> 1) & 1, i & 1))
    });
    let local = kron(&kron(&v_m, &r_b), &CMat::identity(4));
    let bob = &local * &phase;
    let rounds = vec![
        Round::new(Actor::Alice, CMat::identity(9), true),
        Round::new(Actor::Bob, bob, true),
    ];
    let conj = kron(&w_a, &v_m);
    let meas = cks_measurements(Some(&conj)).expect("conjugated projectors");
    ProtocolSpec::new(format!("cks-random-{seed}"), layout, prep, rounds, meas)
        .expect("local rotations keep the protocol valid")
}

/// Ideal λ-unbalanced weak coin flip with bias ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WCFPrimitive {
    pub lambda: f64,
    pub epsilon: f64,
    pub dyadic_bits: u32,
}

impl WCFPrimitive {
    /// Uses `lambda` as given; see [`WCFPrimitive::dyadic`] for the rounded form.
    pub fn new(lambda: f64, epsilon: f64, dyadic_bits: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Range(format!("lambda {lambda} outside [0, 1]")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Range(format!("epsilon {epsilon} must be finite and >= 0")));
        }
        if !(1..=52).contains(&dyadic_bits) {
            return Err(Error::Range(format!("dyadic_bits {dyadic_bits} outside 1..=52")));
        }
        Ok(WCFPrimitive { lambda, epsilon, dyadic_bits })
    }

    /// `lambda` rounded to the nearest multiple of `2^-dyadic_bits`.
    pub fn dyadic(lambda: f64, epsilon: f64, dyadic_bits: u32) -> Result<Self> {
        let w = Self::new(lambda, epsilon, dyadic_bits)?;
        Ok(WCFPrimitive { lambda: dyadic_round(lambda, dyadic_bits), ..w })
    }

    pub fn is_dyadic(&self) -> bool {
        dyadic_round(self.lambda, self.dyadic_bits) == self.lambda
    }

    /// Largest probability a cheating Alice forces outcome 0.
    pub fn alice_force_cap(&self) -> f64 {
        (self.lambda + self.epsilon).clamp(0.0, 1.0)
    }

    /// Largest probability a cheating Bob forces outcome 1.
    pub fn bob_force_cap(&self) -> f64 {
        (1.0 - self.lambda + self.epsilon).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub lambda: f64,
    pub epsilon: f64,
    pub a_bound: f64,
    pub b_bound: f64,
    pub combined: f64,
}

/// Cheating bounds for the mixture that plays the trivial protocol on coin
/// outcome 0 and the qutrit protocol on outcome 1.
pub fn combined_bounds(wcf: &WCFPrimitive) -> Result<TradeoffPoint> {
    let w = WCFPrimitive::new(wcf.lambda, wcf.epsilon, wcf.dyadic_bits)?;
    let pa = w.alice_force_cap();
    let pb = w.bob_force_cap();
    let a_bound = pa + (1.0 - pa) * 0.5;
    let b_bound = pb * 0.75 + (1.0 - pb) * 0.5;
    Ok(TradeoffPoint {
        lambda: w.lambda,
        epsilon: w.epsilon,
        a_bound,
        b_bound,
        combined: 2.0 * b_bound + a_bound,
    })
}

/// Nearest `k / 2^bits`, ties rounding down.
pub fn dyadic_round(lambda: f64, bits: u32) -> f64 {
    let scale = (2.0f64).powi(bits as i32);
    let x = lambda * scale;
    let f = x.floor();
    let k = if x - f > 0.5 { f + 1.0 } else { f };
    k / scale
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HonestRunStats {
    pub lambda: f64,
    pub trials: u64,
    pub trivial_runs: u64,
    pub cks_runs: u64,
    pub correct: u64,
    pub completeness_rate: f64,
}

/// Per-input probability that Alice's output measurement returns `x_a`.
fn output_success(spec: &ProtocolSpec) -> Result<[f64; 8]> {
    let rf = reduce_alice(&all_final_states(spec)?)?;
    let mut out = [0.0; 8];
    for (k, (a, x0, x1)) in all_inputs().enumerate() {
        let m = spec.alice_output(a);
        let rho = rf.get(a, x0, x1);
        let xa = if a == 0 { x0 } else { x1 };
        out[k] = if xa == 0 { m.prob_pos(rho) } else { m.prob_neg(rho) };
    }
    Ok(out)
}

/// Monte Carlo honest execution of the coin-flip mixture. Trial `t` draws
/// from its own stream, so the statistics do not depend on evaluation order.
pub fn simulate_combined(wcf: &WCFPrimitive, trials: u64, seed: u64) -> Result<HonestRunStats> {
    use rand::Rng;
    if trials == 0 {
        return Err(Error::Range("trials must be >= 1".into()));
    }
    let w = WCFPrimitive::new(wcf.lambda, wcf.epsilon, wcf.dyadic_bits)?;
    let trivial = output_success(&build_trivial())?;
    let cks = output_success(&build_cks())?;
    let (mut trivial_runs, mut correct) = (0u64, 0u64);
    for t in 0..trials {
        let mut rng = stream_rng(seed, t);
        let coin_zero = rng.random::<f64>() < w.lambda;
        let k = rng.random_range(0..8usize);
        let p = if coin_zero { trivial[k] } else { cks[k] };
        if coin_zero {
            trivial_runs += 1;
        }
        if rng.random::<f64>() < p {
            correct += 1;
        }
    }
    Ok(HonestRunStats {
        lambda: w.lambda,
        trials,
        trivial_runs,
        cks_runs: trials - trivial_runs,
        correct,
        completeness_rate: correct as f64 / trials as f64,
    })
}
