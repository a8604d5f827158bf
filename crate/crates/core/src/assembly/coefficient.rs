use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::spectral::{GridField, PolyField, QuadratureRule};

/// The `m × m` coefficient matrix `q(x)` of the perturbation `Q u = q·u`,
/// entries row-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientMatrix {
    pub dim: usize,
    pub m: usize,
    pub entries: Vec<PolyField>,
}

impl CoefficientMatrix {
    pub fn new(dim: usize, m: usize, entries: Vec<PolyField>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(invalid(alloc::format!("{} entries for a {m}x{m} coefficient", entries.len())));
        }
        if entries.iter().any(|e| e.dim != dim) {
            return Err(Error::Mismatch(alloc::string::String::from("entry dimension differs")));
        }
        Ok(CoefficientMatrix { dim, m, entries })
    }

    /// `c·I`.
    pub fn scalar_identity(dim: usize, m: usize, c: f64) -> Self {
        let entries = (0..m * m)
            .map(|k| PolyField::constant(dim, if k % (m + 1) == 0 { c } else { 0.0 }))
            .collect();
        CoefficientMatrix { dim, m, entries }
    }

    pub fn entry(&self, a: usize, b: usize) -> &PolyField {
        &self.entries[a * self.m + b]
    }

    /// Highest per-axis polynomial degree among the entries.
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|e| e.deg).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        let entries = (0..m * m).map(|k| self.entries[(k % m) * m + k / m].clone()).collect();
        CoefficientMatrix { dim: self.dim, m, entries }
    }

    /// `q + qᵀ`.
    pub fn symmetrized(&self) -> Result<Self> {
        let t = self.transpose();
        let entries = self
            .entries
            .iter()
            .zip(&t.entries)
            .map(|(a, b)| a.add_scaled(1.0, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientMatrix { dim: self.dim, m: self.m, entries })
    }

    /// `σI − (q + qᵀ)`.
    pub fn shifted(&self, sigma: f64) -> Result<Self> {
        let mut s = self.symmetrized()?;
        for (k, e) in s.entries.iter_mut().enumerate() {
            let diag = if k % (self.m + 1) == 0 { sigma } else { 0.0 };
            *e = PolyField::constant(self.dim, diag).add_scaled(-1.0, e)?;
        }
        Ok(s)
    }

    /// True if every entry is even under each reflection `x_d ↦ 1 − x_d`.
    pub fn is_reflection_even(&self) -> bool {
        (0..self.dim).all(|d| self.entries.iter().all(|e| e.is_reflection_even(d)))
    }

    /// Grid values of every entry.
    pub fn to_grid(&self, rule: &QuadratureRule) -> Vec<GridField> {
        self.entries.iter().map(|e| e.to_grid(rule)).collect()
    }

    /// Pointwise matrix `q(x)`, row-major.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|e| e.eval(x)).collect()
    }
}
