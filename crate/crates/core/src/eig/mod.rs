//! Symmetric and generalized symmetric-definite eigensolvers with
//! residual-based eigenvalue enclosures.

mod cholesky;
mod jacobi;
mod tridiag;

use alloc::vec::Vec;

pub use cholesky::{Cholesky, KronCholesky};
pub use jacobi::jacobi_eig;
pub use tridiag::{tridiagonal_eig_smallest, Tridiagonal};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, Mat};
use crate::rigor::{gamma, Interval};

/// Matrices up to this order are diagonalized by Jacobi rotations.
pub const JACOBI_LIMIT: usize = 120;

/// The `k` smallest eigenpairs of a symmetric matrix. Values ascending,
/// vectors as columns.
pub fn sym_eig_smallest(a: &Mat, k: usize) -> Result<(Vec<f64>, Mat)> {
    if !a.is_square() {
        return Err(Error::Mismatch(alloc::format!("eigenproblem of a {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let k = k.min(n);
    if n <= JACOBI_LIMIT {
        let (vals, vecs) = jacobi_eig(a);
        let cols: Vec<usize> = (0..k).collect();
        let rows: Vec<usize> = (0..n).collect();
        return Ok((vals[..k].to_vec(), vecs.select(&rows, &cols)));
    }
    Ok(tridiagonal_eig_smallest(a, k))
}

/// An approximate eigenpair of `P x = λ M x` with an enclosure of the
/// eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// `[value − r, value + r]` with `r` the residual bound.
    pub enclosure: Interval,
    pub residual: f64,
    /// `M`-normalized eigenvector.
    pub vector: Vec<f64>,
}

/// The smallest eigenpairs of a pencil, ascending.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpectrumSlice {
    pub pairs: Vec<EigenPair>,
}

impl SpectrumSlice {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Forms `B = L⁻¹ P L⁻ᵀ` for the mass factor `L`, symmetrized.
pub fn reduce_pencil(p: &Mat, mass: &KronCholesky) -> Result<Mat> {
    let n = p.rows();
    if !p.is_square() || n != mass.len() {
        return Err(Error::Mismatch(alloc::format!(
            "pencil of order {} against a mass factor of order {}",
            n,
            mass.len()
        )));
    }
    // rows of P·L⁻ᵀ are L⁻¹ applied to rows of P (P symmetric)
    let mut w = p.clone();
    for i in 0..n {
        mass.solve_lower(w.row_mut(i));
    }
    let mut b = w.transpose();
    drop(w);
    for i in 0..n {
        mass.solve_lower(b.row_mut(i));
    }
    b.symmetrize();
    Ok(b)
}

/// Rigorous bound on the distance from `theta` to the spectrum of the
/// symmetric matrix `b`, given the approximate eigenvector `y`.
pub fn residual_bound(b: &Mat, theta: f64, y: &[f64]) -> f64 {
    let n = y.len();
    let by = b.matvec(y);
    let mut r2 = Interval::ZERO;
    let mut abs2 = Interval::ZERO;
    for i in 0..n {
        let ri = by[i] - theta * y[i];
        r2 += Interval::point(ri).sqr();
        let row = b.row(i);
        let a: f64 = row.iter().zip(y).map(|(p, q)| (p * q).abs()).sum::<f64>() + (theta * y[i]).abs();
        abs2 += Interval::point(a).sqr();
    }
    let ynorm = Interval::point(dot(y, y)).sqrt_nonneg().lo * (1.0 - 4.0 * f64::EPSILON);
    let rnorm = r2.sqrt_nonneg().hi;
    // the |B||y| sums carry their own rounding, covered by the extra factor
    let err = abs2.sqrt_nonneg().hi * gamma(n + 2) * 1.01;
    if ynorm <= 0.0 {
        return f64::INFINITY;
    }
    ((Interval::point(rnorm) + Interval::point(err)) / Interval::point(ynorm))
        .map(|v| v.hi)
        .unwrap_or(f64::INFINITY)
}

/// The `k` smallest eigenpairs of `P x = λ M x` where `M = L Lᵀ` is given by
/// its Kronecker-structured factor.
pub fn gen_eig_smallest(p: &Mat, mass: &KronCholesky, k: usize) -> Result<SpectrumSlice> {
    if k == 0 {
        return Err(invalid("requested zero eigenpairs"));
    }
    let b = reduce_pencil(p, mass)?;
    let (vals, vecs) = sym_eig_smallest(&b, k)?;
    let mut pairs = Vec::with_capacity(vals.len());
    for (j, &theta) in vals.iter().enumerate() {
        let y = vecs.column(j);
        let r = residual_bound(&b, theta, &y);
        let ny = libm::sqrt(dot(&y, &y));
        let mut x: Vec<f64> = y.iter().map(|v| v / ny).collect();
        mass.solve_upper(&mut x);
        pairs.push(EigenPair { value: theta, enclosure: Interval::ball(theta, r), residual: r, vector: x });
    }
    Ok(SpectrumSlice { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_bound_vanishes_for_exact_pair() {
        let b = Mat::from_vec(2, 2, alloc::vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        let r = residual_bound(&b, 2.0, &[1.0, 0.0]);
        assert!(r < 1e-14 && r >= 0.0);
    }

    #[test]
    fn generalized_pairs_are_mass_normalized() {
        let m0 = Mat::from_vec(2, 2, alloc::vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let f = KronCholesky::factor(&[m0.clone()], 1).unwrap();
        let p = Mat::from_vec(2, 2, alloc::vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let s = gen_eig_smallest(&p, &f, 2).unwrap();
        for pair in &s.pairs {
            let x = &pair.vector;
            let mx = m0.matvec(x);
            assert!((dot(x, &mx) - 1.0).abs() < 1e-14);
            let px = p.matvec(x);
            for i in 0..2 {
                assert!((px[i] - pair.value * mx[i]).abs() < 1e-13);
            }
            assert!(pair.enclosure.contains(pair.value));
        }
    }
}
