use alloc::vec::Vec;

use crate::eig::{Cholesky, KronCholesky};
use crate::error::{invalid, Error, Result};
use crate::linalg::{matmul, Mat};
use crate::spectral::{mass_1d, stiffness_1d, BasisTable, Deriv, QuadratureRule, Subspace};

/// Stiffness `D` and mass matrices on a subspace, with their factors. Both
/// are block diagonal over the `m` components with identical blocks; only
/// one block is stored.
#[derive(Clone, Debug)]
pub struct GramMatrices {
    pub subspace: Subspace,
    pub m: usize,
    /// `(∇φ_J, ∇φ_I)` on one component.
    pub stiffness: Mat,
    /// `(φ_J, φ_I)` on one component.
    pub mass: Mat,
    stiffness_factor: Cholesky,
    mass_factor: KronCholesky,
}

impl GramMatrices {
    /// Closed-form Gram matrices.
    pub fn new(sub: &Subspace, m: usize) -> Result<Self> {
        if m == 0 || sub.scalar_len() == 0 {
            return Err(invalid("empty space"));
        }
        let s1: Vec<Mat> = (0..sub.dim()).map(|d| stiffness_1d(sub.axis(d))).collect();
        let m1: Vec<Mat> = (0..sub.dim()).map(|d| mass_1d(sub.axis(d))).collect();
        let (stiffness, mass) = if sub.dim() == 1 {
            (s1[0].clone(), m1[0].clone())
        } else {
            let mut st = s1[0].kron(&m1[1]);
            st.axpy(1.0, &m1[0].kron(&s1[1]));
            (st, m1[0].kron(&m1[1]))
        };
        let stiffness_factor = Cholesky::factor(&stiffness)?;
        let mass_factor = KronCholesky::factor(&m1, m)?;
        Ok(GramMatrices { subspace: sub.clone(), m, stiffness, mass, stiffness_factor, mass_factor })
    }

    pub fn scalar_len(&self) -> usize {
        self.subspace.scalar_len()
    }

    pub fn len(&self) -> usize {
        self.m * self.scalar_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mass_factor(&self) -> &KronCholesky {
        &self.mass_factor
    }

    pub fn stiffness_factor(&self) -> &Cholesky {
        &self.stiffness_factor
    }

    fn block_diag(&self, block: &Mat) -> Mat {
        let s = self.scalar_len();
        let mut out = Mat::zeros(self.len(), self.len());
        for c in 0..self.m {
            out.set_block(c * s, c * s, block);
        }
        out
    }

    /// Full block-diagonal stiffness matrix `D`.
    pub fn stiffness_full(&self) -> Mat {
        self.block_diag(&self.stiffness)
    }

    /// Full block-diagonal mass matrix.
    pub fn mass_full(&self) -> Mat {
        self.block_diag(&self.mass)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Mismatch(alloc::format!(
                "vector of length {} on a space of dimension {}",
                x.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `x ← D⁻¹ x`.
    pub fn solve_stiffness(&self, x: &mut [f64]) -> Result<()> {
        self.check_len(x)?;
        for block in x.chunks_mut(self.scalar_len()) {
            self.stiffness_factor.solve(block);
        }
        Ok(())
    }

    /// `x ← Mass⁻¹ x`.
    pub fn solve_mass(&self, x: &mut [f64]) -> Result<()> {
        self.check_len(x)?;
        self.mass_factor.solve(x);
        Ok(())
    }

    pub fn apply_stiffness(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(x.chunks(self.scalar_len()).flat_map(|b| self.stiffness.matvec(b)).collect())
    }

    pub fn apply_mass(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(x.chunks(self.scalar_len()).flat_map(|b| self.mass.matvec(b)).collect())
    }

    /// Replaces the stiffness block, refactoring it. Used to inject
    /// deliberate faults in self-tests.
    pub fn with_stiffness(mut self, stiffness: Mat) -> Result<Self> {
        if stiffness.rows() != self.scalar_len() || !stiffness.is_square() {
            return Err(Error::Mismatch(alloc::string::String::from("stiffness block has the wrong order")));
        }
        self.stiffness_factor = Cholesky::factor(&stiffness)?;
        self.stiffness = stiffness;
        Ok(self)
    }
}

/// Scalar-block stiffness and mass matrices of a subspace assembled by
/// tensor quadrature, for cross-checking the closed forms.
pub fn gram_by_quadrature(sub: &Subspace, rule: &QuadratureRule) -> Result<(Mat, Mat)> {
    rule.require_degree(2 * (sub.n() + 1))?;
    let one_d = |d: usize, which: Deriv| {
        let t = BasisTable::new(sub.axis(d), rule);
        let b = t.get(which).clone();
        let mut bw = b.clone();
        for i in 0..bw.rows() {
            for (p, v) in bw.row_mut(i).iter_mut().enumerate() {
                *v *= rule.weights[p];
            }
        }
        matmul(&bw, &b.transpose())
    };
    let s: Vec<Mat> = (0..sub.dim()).map(|d| one_d(d, Deriv::D1)).collect();
    let m: Vec<Mat> = (0..sub.dim()).map(|d| one_d(d, Deriv::Val)).collect();
    if sub.dim() == 1 {
        return Ok((s[0].clone(), m[0].clone()));
    }
    let mut st = s[0].kron(&m[1]);
    st.axpy(1.0, &m[0].kron(&s[1]));
    Ok((st, m[0].kron(&m[1])))
}
