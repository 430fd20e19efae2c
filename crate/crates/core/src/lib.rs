//! Two-party quantum weak oblivious transfer: honest protocol simulation,
//! the generic cheating strategies for Alice and Bob, and the security
//! tradeoff between them.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, register layouts, states, and the
//!   state-discrimination primitives (trace norm, fidelity, Helstrom
//!   measurement, Uhlmann unitaries).
//! - [`protocol`]: round-based honest protocols with deferred measurement and
//!   the JSON file format for them.
//! - [`attacks`]: the Helstrom attack for Alice, the purified controlled-Uhlmann
//!   attack for Bob, and the `F + Δ ≥ 4` chain.
//! - [`catalog`]: concrete protocols and the coin-flip mixture of the two
//!   extreme protocols.
//! - [`tradeoff`]: curve generation and the δ-robustness sweep.
//! - [`oracle`]: brute-force and sampling verifiers for every closed form.
//! - [`verify`] and [`cli`]: the invariant suite runner and command line.

pub mod attacks;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod protocol;
pub mod qcore;
pub mod random;
pub mod tradeoff;
pub mod verify;

pub use error::{Error, Result};
pub use qcore::{C64, CMat, DensityOp, Factor, Owner, RegisterLayout, StateVector};

/// Tolerance for algebraic identities on exactly representable constructions.
pub const TAU_NORM: f64 = 1e-9;

/// Tolerance for quantities that pass through an eigendecomposition or SVD.
pub const TAU_EIG: f64 = 1e-6;
