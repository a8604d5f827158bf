//! Gram matrices, the perturbation matrix, the eigenvalue pencil, and the
//! matrix-free modified operator used by the Lehmann refinement.

mod coefficient;
mod gram;
mod pencil;
mod ritz;

pub use coefficient::CoefficientMatrix;
pub use gram::{gram_by_quadrature, GramMatrices};
pub use pencil::{assemble_pencil, assemble_q, assemble_q_grid, required_quadrature, PencilMatrices};
pub use ritz::{apply_modified_operator, ritz_solve};
