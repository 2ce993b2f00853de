use thiserror::Error;

use crate::field::FieldError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lp(#[from] stabsep_lp::LpError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{what} of size {size} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("no Clifford realises the requested mapping: {0}")]
    NoSuchClifford(String),
    #[error("invalid stabiliser group: {0}")]
    InvalidGroup(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Size limits for dense and enumerative work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest Hilbert-space dimension for dense matrices.
    pub dense: usize,
    /// Largest number of enumerated stabiliser states.
    pub enumeration: u64,
    /// Largest number of points for affine partition search.
    pub partition_points: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dense: 256,
            enumeration: 100_000,
            partition_points: 64,
        }
    }
}

impl Caps {
    pub fn check_dense(&self, dim: u64) -> Result<()> {
        if dim > self.dense as u64 {
            return Err(Error::CapExceeded {
                what: "dense dimension",
                size: dim,
                cap: self.dense as u64,
            });
        }
        Ok(())
    }
}
