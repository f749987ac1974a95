//! Thermodynamic capacity of quantum channels.
//!
//! The crate computes the worst-case free-energy change T(E) of a channel,
//! builds a universal implementation of `E^{⊗n}` from Schur–Weyl spectrum
//! estimation and energy typicality, and measures the implementation's
//! accuracy (purified-input fidelity, diamond norm) and its per-copy work
//! cost through Gibbs sub-preservation.
//!
//! Modules:
//! - [`qcore`]: matrices, states, Hamiltonians, entropies, free energy.
//! - [`channel`]: Kraus/Choi/Stinespring channels and tensor powers.
//! - [`optim`]: the capacity solver, minimal entropy gain, interconversion rate.
//! - [`sdp`]: a dense primal–dual SDP solver, diamond distance, D_H^ε.
//! - [`typic`]: spectrum/energy POVMs and the typicality operator.
//! - [`implementation`]: the universal implementation and its diagnostics.

pub mod channel;
pub mod error;
pub mod exec;
pub mod implementation;
pub mod optim;
pub mod qcore;
pub mod random;
pub mod sdp;
pub mod typic;

pub use error::{Error, Result};
