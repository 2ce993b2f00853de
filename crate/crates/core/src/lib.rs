//! Exact qudit stabiliser formalism, stabiliser-preserving channels, and
//! certificates separating them from stabiliser operations.

pub mod channel;
pub mod clifford;
pub mod coords;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod lemmas;
pub mod matrix;
pub mod pauli;
pub mod polar;
pub mod separation;
pub mod stabiliser;

pub use clifford::{clifford_from_gates, find_clifford_mapping, CliffordOp, Gate};
pub use cyclotomic::CycRat;
pub use error::{Caps, Error, Result};
pub use field::{AffinePartition, AffineSubspace, FElem, FVec, Prime};
pub use pauli::PauliOp;
pub use stabiliser::{StabBasis, StabCode, StabGroup, StabState};

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "v1";
