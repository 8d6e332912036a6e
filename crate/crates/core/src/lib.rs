//! Quantum channels, Choi–Jamiołkowski duality, and Schmidt-number analysis.
//!
//! The crate is organized around the correspondence between completely
//! positive trace-preserving maps on `M_d` and bipartite states on
//! `C^d ⊗ C^d`: a channel is carried to its Choi state, Kraus
//! decompositions are extracted back from Choi spectra, and Schmidt
//! numbers of states and channels are bracketed between witness lower
//! bounds and decomposition upper bounds.
//!
//! All numerics are generic over the scalar type (`f32` or `f64`) via
//! [`Real`]; the `*64` aliases below cover the common double-precision
//! case.

pub mod channels;
pub mod error;
pub mod json;
pub mod multipartite;
pub mod numerics;
pub mod scalar;
pub mod schmidt;
pub mod states;

pub use error::Error;
pub use scalar::Real;

pub type Result<T> = std::result::Result<T, Error>;

pub type CMatrix64 = numerics::CMatrix<f64>;
pub type Tolerances64 = numerics::Tolerances<f64>;
pub type PureState64 = states::PureState<f64>;
pub type DensityMatrix64 = states::DensityMatrix<f64>;
pub type BipartitionOperator64 = states::BipartitionOperator<f64>;
pub type KrausChannel64 = channels::KrausChannel<f64>;
pub type ChoiMatrix64 = channels::ChoiMatrix<f64>;
pub type HermitianPreservingMap64 = channels::HermitianPreservingMap<f64>;

pub type CMatrix32 = numerics::CMatrix<f32>;
pub type Tolerances32 = numerics::Tolerances<f32>;
pub type PureState32 = states::PureState<f32>;
pub type DensityMatrix32 = states::DensityMatrix<f32>;
pub type KrausChannel32 = channels::KrausChannel<f32>;
