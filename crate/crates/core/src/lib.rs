//! Direct and inverse spectral problems for 2x2 canonical Hamiltonian
//! systems on the half-line.
//!
//! The library covers:
//!
//! - transfer-matrix integration of the system ΩẊ = zHX and the Bessel
//!   closed forms for diagonal power Hamiltonians ([`canon`]),
//! - reproducing kernels of the associated de Branges chain and the
//!   homogeneity scaling laws ([`debranges`]),
//! - spectral measure models, their Fourier kernel decomposition and the
//!   PW-sampling capacity test ([`measure`]),
//! - the constant-jump Riemann–Hilbert problem on [-t, t] ([`rh`]),
//! - a collocation solver for the truncated Toeplitz equation
//!   ψ∗μ̂ = 1 on (-t, t) ([`toeplitz`]),
//! - the Hamiltonian-recovery pipeline built on top of these ([`isp`]),
//! - special functions used by the closed forms ([`specfun`]),
//! - the validation suite run by `canon validate` ([`validate`]).

pub mod canon;
pub mod debranges;
pub mod error;
pub mod isp;
pub mod measure;
pub mod quad;
pub mod rh;
pub mod specfun;
pub mod toeplitz;
pub mod validate;

pub use error::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
