//! Certified upper bounds for the inverse norm `‖L⁻¹‖_{B(X,V)}` of perturbed
//! Laplace operators `L = A − Q` with homogeneous Dirichlet data on the unit
//! box `(0,1)ⁿ`, `n ∈ {1, 2}`, acting on `m`-component systems.
//!
//! The norm is the reciprocal square root of the smallest eigenvalue of the
//! form `(u,v)_V − ((Q+Q*)u,v)_X + (A⁻¹Q*u, Q*v)_X` against `(u,v)_X`.
//! Replacing `A⁻¹` by the Ritz-projected `R_h A⁻¹` gives a computable problem
//! whose smallest eigenvalue is a lower bound. That eigenvalue is bounded
//! from below with a projection-error estimate ([`liu`]) and sharpened with a
//! Lehmann–Maehly pencil ([`tlg`]) once a spectral gap is verified. The
//! pipeline lives in [`certify`].
//!
//! The crate is `no_std` (with `alloc`). The `std` feature only switches on
//! runtime CPU feature detection in the matrix-multiply kernel.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod assembly;
pub mod certify;
pub mod eig;
pub mod error;
pub mod linalg;
pub mod liu;
pub mod problems;
pub mod rigor;
pub mod spectral;
pub mod tlg;

pub use error::{Error, Result};
pub use rigor::Interval;
