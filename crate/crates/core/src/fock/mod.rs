//! Few-photon multimode states and operators on a truncated Fock space.
//!
//! Dense matrices are indexed by the canonical basis of [`FockSpace`]; the
//! default truncation keeps at most two photons in total, which is all the
//! W-state and teleportation circuits ever populate.

mod basis;
mod density;
mod operator;
mod state;
mod unitary;

pub use basis::{canonical_basis, FockSpace, Occupation};
pub(crate) use density::trace_matrix as density_trace_matrix;
pub use density::{overlap_fidelity, partial_trace, tensor, DensityOperator};
pub use operator::{expectation, variance, ModeOperator};
pub use state::PureState;
pub use unitary::{apply_two_mode_unitary, check_unitary, FockUnitary, MixingConvention, ModeTransform};

/// Default total-photon cutoff.
pub const DEFAULT_CUTOFF: usize = 2;
