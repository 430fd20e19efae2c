//! Dense complex linear algebra and quantum-information primitives.
//!
//! Tensor order follows [`RegisterLayout`] order, and the leftmost factor is
//! the most significant digit of a basis index.

mod info;
mod layout;
mod mat;
mod state;

pub use info::{
    fidelity, guess_prob, helstrom, herm_sqrt, trace_norm, uhlmann_unitary, TwoOutcomeMeasurement,
};
pub use layout::{Factor, Owner, RegisterLayout};
pub use mat::{eigh, kron, svd, CMat, C64};
pub use state::{partial_trace, DensityOp, StateVector};
