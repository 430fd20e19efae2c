//! Tradeoff curve and δ-robustness of the coin-flip mixture.

use serde::Serialize;

use crate::catalog::{combined_bounds, dyadic_round, TradeoffPoint, WCFPrimitive};
use crate::error::{Error, Result};

/// Upper bound on cheating Alice's chance of guessing `x_ā` in the qutrit
/// protocol when she guesses `x_a` with probability at least `1 − δ`:
/// `min(1/2 + √(δ(1−δ)) + δ, 1)`.
pub fn prop3_bound(delta: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::Range(format!("delta {delta} outside [0, 1/2]")));
    }
    Ok((0.5 + (delta * (1.0 - delta)).sqrt() + delta).min(1.0))
}

/// Smaller root of `2δ² − (3/2)δ + 1/16 = 0`, where the bound above reaches 3/4.
pub fn delta_star() -> f64 {
    let (a, b, c) = (2.0, -1.5, 1.0 / 16.0);
    let disc: f64 = b * b - 4.0 * a * c;
    // Stable form of (−b − √disc)/(2a).
    (2.0 * c) / (-b + disc.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustnessPoint {
    pub delta: f64,
    pub p3: f64,
    pub lambda_star: f64,
    pub max_cheat: f64,
}

/// Picks λ so that Alice's robust bound `λ + (1−λ)·p3` equals Bob's
/// `3/4 − λ/4`, then adds the coin-flip slack ε/2 (Alice) and ε/4 (Bob).
/// Past δ* the qutrit protocol alone is used.
pub fn tune_lambda(delta: f64, epsilon: f64) -> Result<RobustnessPoint> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Range(format!("epsilon {epsilon} must be finite and >= 0")));
    }
    let p3 = prop3_bound(delta)?;
    if p3 >= 0.75 {
        return Ok(RobustnessPoint { delta, p3, lambda_star: 0.0, max_cheat: 0.75 });
    }
    let lambda = (0.75 - p3) / (1.25 - p3);
    let alice = lambda + (1.0 - lambda) * p3 + epsilon / 2.0;
    let bob = 0.75 - lambda / 4.0 + epsilon / 4.0;
    Ok(RobustnessPoint { delta, p3, lambda_star: lambda, max_cheat: alice.max(bob).min(1.0) })
}

/// `n_points` evenly spaced λ in [0, 1], each rounded to `dyadic_bits` bits.
pub fn curve(epsilon: f64, n_points: usize, dyadic_bits: u32) -> Result<Vec<TradeoffPoint>> {
    if n_points < 2 {
        return Err(Error::Range(format!("curve needs at least 2 points, got {n_points}")));
    }
    (0..n_points)
        .map(|i| {
            let lambda = dyadic_round(i as f64 / (n_points - 1) as f64, dyadic_bits);
            combined_bounds(&WCFPrimitive::new(lambda, epsilon, dyadic_bits)?)
        })
        .collect()
}
