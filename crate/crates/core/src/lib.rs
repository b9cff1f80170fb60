//! Exact Fock-space simulation of linear-optical experiments with
//! single-photon W states.
//!
//! * [`fock`]: truncated multimode Fock spaces, states and operators.
//! * [`circuits`]: W-state preparation by a beam-splitter chain, and the
//!   Bell-measurement splitter.
//! * [`detection`]: photodetector POVMs, post-selection, and lossy moments.
//! * [`witness`]: pairwise separability test on reduced W-state pairs.
//! * [`teleport`]: conditional network teleportation over a W resource.
//! * [`bloch`]: averaging over input qubits on the Bloch sphere.

pub mod bloch;
pub mod circuits;
pub mod detection;
pub mod error;
pub mod fock;
pub mod numeric;
pub mod teleport;
pub mod tolerance;
pub mod verification;
pub mod witness;

pub use error::{Error, Result};
pub use tolerance::{Tolerances, TOL};
