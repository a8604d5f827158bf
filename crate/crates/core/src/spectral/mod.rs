//! Legendre-based spectral basis on `(0,1)ⁿ`, Gauss quadrature, and fields.
//!
//! The 1D basis is `ψ_i = x(1−x)P_i'(x) / (i(i+1))`, `i ≥ 1`, with `P_i` the
//! Legendre polynomial shifted to `[0,1]`. It satisfies `ψ_i' = −P_i`, so the
//! stiffness matrix is diagonal and the mass matrix is pentadiagonal with
//! closed-form entries.

mod field;
mod gram;
mod legendre;
pub(crate) mod poly;
mod quadrature;

pub use field::{
    BasisSpec, BasisTable, Deriv, GridField, Parity, ScalarField, Subspace, TensorTables,
    VectorField,
};
pub use gram::{mass_1d, mass_entry, stiffness_1d, stiffness_entry};
pub use legendre::{
    legendre_derivatives, legendre_eval, legendre_values, psi_deriv, psi_eval, psi_second_deriv,
    psi_values,
};
pub use poly::PolyField;
pub use quadrature::{gauss_rule, points_for_degree, QuadratureRule};
