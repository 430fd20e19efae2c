//! The two generic cheating strategies and the `F + Δ ≥ 4` chain.
//!
//! Cheating Alice runs honestly, learns `x_a` without disturbing her state,
//! then applies the Helstrom measurement to the two states left for the other
//! bit. Cheating Bob runs every honest strategy in superposition over his
//! inputs, applies a controlled Uhlmann unitary, and measures one input
//! register in the `{|+⟩, |−⟩}` basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{
    all_final_states, reduce_alice, validate_completeness, FinalStates, ProtocolSpec,
    ReducedFamily,
};
use crate::qcore::{fidelity, helstrom, trace_norm, uhlmann_unitary, CMat, StateVector, C64};
use crate::TAU_EIG;

/// `Δ = ½ Σ ‖ρ − ρ'‖₁` over the four hidden-bit pairs.
pub fn delta_quantity(rf: &ReducedFamily) -> Result<f64> {
    let mut total = 0.0;
    for (p, q) in rf.hidden_bit_pairs() {
        total += trace_norm(&(p.mat() - q.mat()))?;
    }
    Ok(0.5 * total)
}

/// `F = Σ F(ρ, ρ')` over the four hidden-bit pairs.
pub fn f_quantity(rf: &ReducedFamily) -> Result<f64> {
    rf.hidden_bit_pairs().iter().map(|(p, q)| fidelity(p, q)).sum()
}

/// Cheating-Alice lower bound `1/2 + Δ/8`.
pub fn alice_bound(rf: &ReducedFamily) -> Result<f64> {
    Ok(0.5 + delta_quantity(rf)? / 8.0)
}

/// Cheating-Bob lower bound `1/2 + F/16`.
pub fn bob_bound(rf: &ReducedFamily) -> Result<f64> {
    Ok(0.5 + f_quantity(rf)? / 16.0)
}

/// Success probability of Alice's explicit strategy: with `a` chosen at
/// random she learns `x_a`, then runs the Helstrom measurement on the pair of
/// states that differ only in `x_ā`.
pub fn alice_helstrom_attack(rf: &ReducedFamily) -> Result<f64> {
    let pairs = rf.hidden_bit_pairs();
    let mut total = 0.0;
    for (p, q) in pairs {
        total += helstrom(p, q)?.1;
    }
    // Uniform over a and over the known bit.
    Ok(total / 4.0)
}

/// Closed form of the purified attack for a fixed `s`:
/// `1/2 + (1/8) Σ F` over the two pairs whose hidden bit is `x_s`.
pub fn bob_closed_form(rf: &ReducedFamily, s: u8) -> Result<f64> {
    let pairs = rf.hidden_bit_pairs();
    let relevant = if s == 0 { &pairs[2..4] } else { &pairs[0..2] };
    let f: f64 = relevant.iter().map(|(p, q)| fidelity(p, q)).sum::<Result<f64>>()?;
    Ok(0.5 + f / 8.0)
}

/// Outcome of the purified attack for one choice of `s`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PurifiedAttack {
    pub s: u8,
    /// Probability of guessing `a` correctly, averaged over uniform `a`.
    pub success: f64,
    /// Probability of outcome `−` on `X_s`, indexed by Alice's `a`.
    pub p_minus: [f64; 2],
}

fn hadamard() -> CMat {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMat::from_row_major(2, 2, vec![s, s, s, -s]).expect("2x2")
}

/// Honest final state with the input registers stripped off.
fn honest_core(spec: &ProtocolSpec, fs: &FinalStates, a: u8, x0: u8, x1: u8) -> Result<StateVector> {
    let [i0, i1] = spec.x_indices();
    let v = fs.get(a, x0, x1).condition(&[(i0, x0 as usize), (i1, x1 as usize)])?;
    StateVector::new(v.layout().clone(), v.amps().to_vec())
}

/// Unitary on Bob's end-of-protocol registers (excluding inputs) that turns
/// `psi` into the best approximation of `phi`. When Bob keeps no registers
/// the "unitary" is the 1×1 phase that makes the overlap real.
fn bob_uhlmann(spec: &ProtocolSpec, phi: &StateVector, psi: &StateVector) -> Result<CMat> {
    let bob_names = spec.layout().names_at(&spec.bob_final_factors());
    if bob_names.is_empty() {
        let z = phi.inner(psi)?;
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) };
        return CMat::from_row_major(1, 1, vec![phase]);
    }
    Ok(uhlmann_unitary(phi, psi, &bob_names)?.0)
}

/// Simulates Bob's purified attack for a fixed `s` as an explicit state-vector
/// computation.
pub fn bob_purified_attack_detail(spec: &ProtocolSpec, s: u8) -> Result<PurifiedAttack> {
    if s > 1 {
        return Err(Error::Range(format!("s must be a bit, got {s}")));
    }
    let report = validate_completeness(spec);
    if !report.passed {
        return Err(Error::Completeness(report.failures.join("; ")));
    }
    let fs = all_final_states(spec)?;
    let layout = spec.layout();
    let [i0, i1] = spec.x_indices();
    let bob_core = spec.bob_final_factors();

    // U_{s,x} for the block where x_s = 1 and the other input equals x.
    let mut blocks = Vec::with_capacity(2);
    for x in 0..2u8 {
        let (phi, psi) = if s == 0 {
            (honest_core(spec, &fs, 1, 0, x)?, honest_core(spec, &fs, 1, 1, x)?)
        } else {
            (honest_core(spec, &fs, 0, x, 0)?, honest_core(spec, &fs, 0, x, 1)?)
        };
        blocks.push(bob_uhlmann(spec, &phi, &psi)?);
    }

    // cont{U_s} on Bob's registers ⊗ X0 ⊗ X1, in layout order.
    let mut target: Vec<usize> = bob_core.clone();
    target.extend([i0, i1]);
    target.sort_unstable();
    let sub = layout.restrict(&target)?;
    let bob_pos: Vec<usize> = bob_core.iter().map(|b| target.iter().position(|t| t == b).unwrap()).collect();
    let x_pos = [
        target.iter().position(|&t| t == i0).unwrap(),
        target.iter().position(|&t| t == i1).unwrap(),
    ];
    let bob_index = |d: &[usize]| bob_pos.iter().fold(0, |acc, &p| acc * sub.factors()[p].dim + d[p]);
    let n = sub.total_dim();
    let control = CMat::from_fn(n, n, |i, j| {
        let (di, dj) = (sub.digits(i), sub.digits(j));
        let (xi, xj) = ([di[x_pos[0]], di[x_pos[1]]], [dj[x_pos[0]], dj[x_pos[1]]]);
        if xi != xj {
            return C64::new(0.0, 0.0);
        }
        let (bi, bj) = (bob_index(&di), bob_index(&dj));
        let (hit, other) = if s == 0 { (xi[0] == 1, xi[1]) } else { (xi[1] == 1, xi[0]) };
        if hit {
            blocks[other].get(bi, bj)
        } else if bi == bj {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });

    let h = hadamard();
    let measured = if s == 0 { i0 } else { i1 };
    let mut p_minus = [0.0; 2];
    for a in 0..2u8 {
        let init = StateVector::basis(layout.clone(), &vec![0; layout.len()])?;
        let init = init.apply_local(&h, &[i0])?.apply_local(&h, &[i1])?;
        let xi = spec.evolve(a, &init)?;
        let xi = xi.apply_local(&control, &target)?;
        // H maps |−⟩ to |1⟩.
        let rotated = xi.apply_local(&h, &[measured])?;
        p_minus[a as usize] = rotated.condition(&[(measured, 1)])?.norm_sqr();
    }
    // Guess a = s on '−' and a = s̄ on '+'.
    let success = 0.5 * (p_minus[s as usize] + (1.0 - p_minus[1 - s as usize]));
    Ok(PurifiedAttack { s, success, p_minus })
}

/// Success probability of the purified attack for fixed `s`.
pub fn bob_purified_attack(spec: &ProtocolSpec, s: u8) -> Result<f64> {
    Ok(bob_purified_attack_detail(spec, s)?.success)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheatReport {
    pub spec_name: String,
    pub delta: f64,
    pub f: f64,
    pub alice_bound: f64,
    pub bob_bound: f64,
    pub bob_sim_s0: f64,
    pub bob_sim_s1: f64,
    /// `2·bob_bound + alice_bound`.
    pub theorem1_lhs: f64,
}

impl CheatReport {
    pub fn theorem1_holds(&self) -> bool {
        self.theorem1_lhs >= 2.0 - TAU_EIG
    }
}

/// Δ, F, both bounds, and the simulated purified attack for `spec`.
pub fn cheat_report(spec: &ProtocolSpec) -> Result<CheatReport> {
    let rf = reduce_alice(&all_final_states(spec)?)?;
    let delta = delta_quantity(&rf)?;
    let f = f_quantity(&rf)?;
    let alice = 0.5 + delta / 8.0;
    let bob = 0.5 + f / 16.0;
    let s0 = bob_purified_attack(spec, 0)?;
    let s1 = bob_purified_attack(spec, 1)?;
    if (bob - 0.5 * (s0 + s1)).abs() > TAU_EIG {
        return Err(Error::Completeness(format!(
            "simulated Bob attack {} disagrees with bound {bob}",
            0.5 * (s0 + s1)
        )));
    }
    Ok(CheatReport {
        spec_name: spec.name().to_string(),
        delta,
        f,
        alice_bound: alice,
        bob_bound: bob,
        bob_sim_s0: s0,
        bob_sim_s1: s1,
        theorem1_lhs: 2.0 * bob + alice,
    })
}
