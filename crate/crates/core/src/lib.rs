//! Teleportation of a single qubit through an arbitrary two-qubit resource
//! state when the two classical bits Alice sends to Bob travel over a noisy
//! channel.
//!
//! The crate is organised around the quantities that matter for that
//! protocol:
//!
//! - [`qstate`]: two-qubit density matrices, their Pauli (Hilbert–Schmidt)
//!   decomposition, concurrence and the named state families.
//! - [`canonical`]: reduction of a state to its canonical form with a
//!   diagonal correlation matrix by proper local rotations.
//! - [`channels`]: the single two-bit channel (`NoiseModelI`) and the pair of
//!   independent binary channels (`NoiseModelII`), plus mutual information.
//! - [`telefid`]: closed forms for the average fidelity and its deviation,
//!   non-classicality and dispersion-free conditions.
//! - [`strategy`]: Bob's correction strategies, the regime tables and an
//!   exhaustive / randomized optimality search.
//! - [`oracle`]: a first-principles simulator of the full protocol used as
//!   ground truth for every closed form.
//! - [`costopt`]: minimum classical communication cost for non-classical
//!   fidelity.

pub mod canonical;
pub mod channels;
pub mod costopt;
mod error;
pub mod oracle;
pub mod qstate;
pub mod sampling;
pub mod strategy;
pub mod telefid;

pub use canonical::{canonicalize, CanonicalForm, DetSign, LocalRotations};
pub use channels::{Channel, Message, NoiseModel, NoiseModelI, NoiseModelII};
pub use error::{Error, Result};
pub use qstate::{InputQubit, PauliDecomposition, StateFamily, TwoQubitState};
pub use strategy::{CorrectionStrategy, Pauli, Regime};
pub use telefid::{ChiMatrix, FidelityReport};

/// Fidelity attainable by measure-and-prepare (classical) teleportation.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;
