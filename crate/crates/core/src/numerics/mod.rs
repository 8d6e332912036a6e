//! Dense complex-matrix primitives: Kronecker products, partial
//! trace/transpose, Hermitian spectra, singular values, and
//! tolerance-based rank and positivity tests.

mod matrix;
mod spectra;
mod tensor;

pub use matrix::CMatrix;
pub use spectra::{eigh, is_psd, min_eigenvalue, numerical_rank, singular_values};
pub use tensor::{kron, partial_trace, partial_transpose};

use crate::scalar::Real;
use crate::{Error, Result};

/// Numerical cutoffs shared across the crate.
///
/// `rank_rel` is the relative singular-value cutoff used by rank tests;
/// `psd_abs` scales the eigenvalue floor below which a Hermitian matrix
/// still counts as positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rank_rel: T,
    pub psd_abs: T,
}

impl<T: Real> Tolerances<T> {
    pub fn new(rank_rel: T, psd_abs: T) -> Result<Self> {
        if rank_rel < T::zero() || psd_abs < T::zero() || rank_rel >= T::one() || psd_abs >= T::one()
        {
            return Err(Error::InvalidParameter(
                "tolerances must lie in [0, 1)".into(),
            ));
        }
        Ok(Self { rank_rel, psd_abs })
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rank_rel: T::of(1e-10),
            psd_abs: T::of(1e-9),
        }
    }
}
