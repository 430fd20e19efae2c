//! Brute-force and sampling verifiers.
//!
//! None of these use the closed forms they are checked against: success
//! probabilities are computed from explicit states through the trace norm,
//! and optimality witnesses come from seeded random measurements and
//! unitaries.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{guess_prob, CMat, DensityOp, StateVector, C64};
use crate::random::{random_unit_vector, random_unitary, stream_rng};
use crate::{TAU_EIG, TAU_NORM};

/// Cheating Alice's initial state `α|e₀⟩|0⟩ + β|e₁⟩|1⟩ + γ|e₂⟩|2⟩` in the
/// qutrit protocol, with a 3-dimensional ancilla.
#[derive(Clone, Debug)]
pub struct CheatState {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Unit vectors, not necessarily orthogonal. Complex phases of the
    /// amplitudes are carried here.
    pub ancilla: [Vec<C64>; 3],
}

impl CheatState {
    pub fn new(alpha: f64, beta: f64, gamma: f64, ancilla: [Vec<C64>; 3]) -> Result<Self> {
        if alpha < 0.0 || beta < 0.0 || gamma < 0.0 {
            return Err(Error::Range("amplitudes must be nonnegative".into()));
        }
        if (alpha * alpha + beta * beta + gamma * gamma - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState("α² + β² + γ² must be 1".into()));
        }
        for e in &ancilla {
            let n: f64 = e.iter().map(|z| z.norm_sqr()).sum();
            if e.len() != 3 || (n - 1.0).abs() > TAU_NORM {
                return Err(Error::InvalidState("ancilla vectors must be unit vectors in C^3".into()));
            }
        }
        Ok(CheatState { alpha, beta, gamma, ancilla })
    }

    /// Ancilla vectors `e_k` = k-th standard basis vector.
    pub fn orthonormal(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let e = |k: usize| {
            let mut v = vec![C64::new(0.0, 0.0); 3];
            v[k] = C64::new(1.0, 0.0);
            v
        };
        Self::new(alpha, beta, gamma, [e(0), e(1), e(2)])
    }

    /// Random amplitudes and random (complex) ancilla vectors.
    pub fn random(rng: &mut impl Rng) -> Self {
        let amp = random_unit_vector(3, rng);
        let anc = [random_unit_vector(3, rng), random_unit_vector(3, rng), random_unit_vector(3, rng)];
        // Move each amplitude's phase onto its ancilla vector.
        let mut ancilla = anc;
        for (k, e) in ancilla.iter_mut().enumerate() {
            let ph = if amp[k].norm() > 0.0 { amp[k] / amp[k].norm() } else { C64::new(1.0, 0.0) };
            for z in e.iter_mut() {
                *z *= ph;
            }
        }
        CheatState {
            alpha: amp[0].norm(),
            beta: amp[1].norm(),
            gamma: amp[2].norm(),
            ancilla,
        }
    }

    /// Alice's ancilla ⊗ qutrit state after Bob's phases for inputs `(x0, x1)`.
    pub fn after_bob(&self, x0: u8, x1: u8) -> Vec<C64> {
        let coef = [
            self.alpha * if x0 == 1 { -1.0 } else { 1.0 },
            self.beta * if x1 == 1 { -1.0 } else { 1.0 },
            self.gamma,
        ];
        let mut v = vec![C64::new(0.0, 0.0); 9];
        for (c, &w) in coef.iter().enumerate() {
            for (i, e) in self.ancilla[c].iter().enumerate() {
                v[3 * i + c] += e * w;
            }
        }
        v
    }
}

/// Probability that Alice guesses Bob's bit `target` (0 → x₀, 1 → x₁) with
/// an optimal measurement, computed from the two conditional states.
pub fn cks_alice_success(cs: &CheatState, target: u8) -> Result<f64> {
    let conditional = |v: u8| -> Result<DensityOp> {
        let (a, b) = if target == 0 { ((v, 0), (v, 1)) } else { ((0, v), (1, v)) };
        let pa = DensityOp::from_pure(&cs.after_bob(a.0, a.1))?;
        let pb = DensityOp::from_pure(&cs.after_bob(b.0, b.1))?;
        DensityOp::mixture(&[(0.5, &pa), (0.5, &pb)])
    };
    guess_prob(&conditional(0)?, &conditional(1)?)
}

/// A maximum found by grid search or sampling. `tolerance` is the honest
/// error bar of the search (it can under-estimate the true maximum by up to
/// that much).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub tolerance: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

const ANCILLA_SEED: u64 = 0x5eed_a11c;

/// Grid points `(α, β, γ)` on the nonnegative octant of the unit sphere, with
/// `γ/α` sweeping the angle `φ` and `β = cos θ`. With even `grid` the honest
/// state `α = γ = 1/√2` is a grid point.
pub fn cheat_grid(grid: usize) -> Vec<(f64, f64, f64)> {
    let step = FRAC_PI_2 / grid as f64;
    let mut pts = Vec::with_capacity((grid + 1) * (grid + 1));
    for i in 0..=grid {
        let theta = i as f64 * step;
        for j in 0..=grid {
            let phi = j as f64 * step;
            let (st, ct) = theta.sin_cos();
            pts.push(((st * phi.cos()).max(0.0), ct.max(0.0), (st * phi.sin()).max(0.0)));
        }
    }
    pts
}

/// Largest success on `x₁` among grid strategies that guess `x₀` with
/// probability at least `1 − δ`. Each feasible point is evaluated with
/// orthonormal ancilla vectors and with one seeded random configuration.
pub fn cks_alice_oracle(delta: f64, grid: usize) -> Result<OracleEstimate> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::Range(format!("delta {delta} outside [0, 1/2]")));
    }
    if grid < 50 {
        return Err(Error::Range(format!("grid {grid} below 50")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut candidates = cheat_grid(grid);
    candidates.push((s, 0.0, s));
    let mut rng = stream_rng(ANCILLA_SEED, 0);
    let random_anc = [random_unit_vector(3, &mut rng), random_unit_vector(3, &mut rng), random_unit_vector(3, &mut rng)];

    let best = candidates
        .par_iter()
        .map(|&(alpha, beta, gamma)| -> Result<Option<(f64, f64, f64, f64)>> {
            // Grid coordinates come from trig functions; renormalize exactly.
            let n = (alpha * alpha + beta * beta + gamma * gamma).sqrt();
            let (alpha, beta, gamma) = (alpha / n, beta / n, gamma / n);
            let mut best: Option<(f64, f64, f64, f64)> = None;
            for cs in [
                CheatState::orthonormal(alpha, beta, gamma)?,
                CheatState::new(alpha, beta, gamma, random_anc.clone())?,
            ] {
                if cks_alice_success(&cs, 0)? >= 1.0 - delta - TAU_EIG {
                    let v = cks_alice_success(&cs, 1)?;
                    if best.is_none_or(|b| v > b.0) {
                        best = Some((v, alpha, beta, gamma));
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .fold(None::<(f64, f64, f64, f64)>, |acc, c| match acc {
            Some(a) if a.0 >= c.0 => Some(a),
            _ => Some(c),
        })
        .expect("the honest strategy is always feasible");
    Ok(OracleEstimate {
        value: best.0,
        tolerance: 2.0 / grid as f64,
        alpha: best.1,
        beta: best.2,
        gamma: best.3,
    })
}

/// Random projective measurement: a random rank in `1..dim` (rank 1 for
/// qubits) and a Haar-random basis.
fn random_projector(dim: usize, rng: &mut impl Rng) -> CMat {
    let u = random_unitary(dim, rng);
    let rank = if dim <= 2 { 1 } else { rng.random_range(1..dim) };
    let mut p = CMat::zeros(dim, dim);
    for k in 0..rank {
        let col: Vec<C64> = (0..dim).map(|r| u.get(r, k)).collect();
        p = &p + &CMat::projector(&col);
    }
    p
}

/// Best success probability for telling `rho0` from `rho1` over `samples`
/// random projective measurements.
pub fn helstrom_oracle(rho0: &DensityOp, rho1: &DensityOp, samples: usize, seed: u64) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::Shape("states of different dimensions".into()));
    }
    if samples == 0 {
        return Err(Error::Range("samples must be >= 1".into()));
    }
    let best = (0..samples)
        .map(|k| {
            let p = random_projector(rho0.dim(), &mut stream_rng(seed, k as u64));
            let pos = (&p * rho0.mat()).trace().re;
            let neg = 1.0 - (&p * rho1.mat()).trace().re;
            0.5 * (pos + neg)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Largest `|⟨φ|(I ⊗ V)|ψ⟩|` over `samples` random unitaries `V` on `b_factors`.
pub fn uhlmann_oracle<S: AsRef<str>>(
    phi: &StateVector,
    psi: &StateVector,
    b_factors: &[S],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if phi.layout() != psi.layout() {
        return Err(Error::Layout("purifications live on different layouts".into()));
    }
    let idx = phi.layout().indices_of(b_factors)?;
    if idx.is_empty() || idx.len() == phi.layout().len() {
        return Err(Error::Layout("the unitary must act on a nonempty strict subset".into()));
    }
    if samples == 0 {
        return Err(Error::Range("samples must be >= 1".into()));
    }
    let dim = phi.layout().dim_of(&idx);
    let mut best = f64::NEG_INFINITY;
    for k in 0..samples {
        let v = random_unitary(dim, &mut stream_rng(seed, k as u64));
        best = best.max(phi.inner(&psi.apply_local(&v, &idx)?)?.norm());
    }
    Ok(best)
}
