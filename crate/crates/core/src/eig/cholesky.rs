use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Mat};

/// Lower Cholesky factor `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Mat,
}

impl Cholesky {
    pub fn factor(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Mismatch(alloc::format!("cholesky of a {}x{} matrix", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let s = a[(j, j)] - dot(&l.row(j)[..j], &l.row(j)[..j]);
            if !(s > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: s });
            }
            let d = libm::sqrt(s);
            l[(j, j)] = d;
            for i in j + 1..n {
                let (ri, rj) = (l.row(i), l.row(j));
                let v = (a[(i, j)] - dot(&ri[..j], &rj[..j])) / d;
                l[(i, j)] = v;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn l(&self) -> &Mat {
        &self.l
    }

    pub fn len(&self) -> usize {
        self.l.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x ← L⁻¹ x`.
    pub fn solve_lower(&self, x: &mut [f64]) {
        for i in 0..x.len() {
            let r = self.l.row(i);
            x[i] = (x[i] - dot(&r[..i], &x[..i])) / r[i];
        }
    }

    /// `x ← L⁻ᵀ x`.
    pub fn solve_upper(&self, x: &mut [f64]) {
        for i in (0..x.len()).rev() {
            x[i] /= self.l[(i, i)];
            let xi = x[i];
            axpy(-xi, &self.l.row(i)[..i], &mut x[..i]);
        }
    }

    /// `x ← A⁻¹ x`.
    pub fn solve(&self, x: &mut [f64]) {
        self.solve_lower(x);
        self.solve_upper(x);
    }

    /// `B ← L⁻¹ B` for a matrix right-hand side.
    pub fn solve_lower_mat(&self, b: &mut Mat) {
        let n = self.len();
        for i in 0..n {
            for j in 0..i {
                let f = self.l[(i, j)];
                if f != 0.0 {
                    let (ri, rj) = b.rows_mut2(i, j);
                    axpy(-f, rj, ri);
                }
            }
            let d = 1.0 / self.l[(i, i)];
            b.row_mut(i).iter_mut().for_each(|v| *v *= d);
        }
    }

    /// `B ← L⁻ᵀ B`.
    pub fn solve_upper_mat(&self, b: &mut Mat) {
        let n = self.len();
        for i in (0..n).rev() {
            let d = 1.0 / self.l[(i, i)];
            b.row_mut(i).iter_mut().for_each(|v| *v *= d);
            for j in 0..i {
                let f = self.l[(i, j)];
                if f != 0.0 {
                    let (rj, ri) = b.rows_mut2(j, i);
                    axpy(-f, ri, rj);
                }
            }
        }
    }

    /// `B ← A⁻¹ B`.
    pub fn solve_mat(&self, b: &mut Mat) {
        self.solve_lower_mat(b);
        self.solve_upper_mat(b);
    }
}

/// Cholesky factor of a block-diagonal matrix whose `m` identical blocks are
/// Kronecker products `A_0 ⊗ A_1` (or a single `A_0` in 1D). The factor is
/// `L_0 ⊗ L_1`, lower triangular in lexicographic order.
#[derive(Clone, Debug)]
pub struct KronCholesky {
    axes: Vec<Cholesky>,
    m: usize,
}

impl KronCholesky {
    pub fn factor(axes: &[Mat], m: usize) -> Result<Self> {
        let axes = axes.iter().map(Cholesky::factor).collect::<Result<Vec<_>>>()?;
        Ok(KronCholesky { axes, m })
    }

    pub fn scalar_len(&self) -> usize {
        self.axes.iter().map(Cholesky::len).product()
    }

    pub fn len(&self) -> usize {
        self.m * self.scalar_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn apply(&self, x: &mut [f64], transpose: bool) {
        let s = self.scalar_len();
        assert_eq!(x.len(), self.m * s);
        for block in x.chunks_mut(s) {
            if self.axes.len() == 1 {
                if transpose {
                    self.axes[0].solve_upper(block);
                } else {
                    self.axes[0].solve_lower(block);
                }
                continue;
            }
            let (n0, n1) = (self.axes[0].len(), self.axes[1].len());
            // (L0 ⊗ L1)⁻¹ vec(V) = vec(L0⁻¹ V L1⁻ᵀ)
            for row in block.chunks_mut(n1) {
                if transpose {
                    self.axes[1].solve_upper(row);
                } else {
                    self.axes[1].solve_lower(row);
                }
            }
            let mut col = vec![0.0; n0];
            for j in 0..n1 {
                for i in 0..n0 {
                    col[i] = block[i * n1 + j];
                }
                if transpose {
                    self.axes[0].solve_upper(&mut col);
                } else {
                    self.axes[0].solve_lower(&mut col);
                }
                for i in 0..n0 {
                    block[i * n1 + j] = col[i];
                }
            }
        }
    }

    /// `x ← L⁻¹ x`.
    pub fn solve_lower(&self, x: &mut [f64]) {
        self.apply(x, false);
    }

    /// `x ← L⁻ᵀ x`.
    pub fn solve_upper(&self, x: &mut [f64]) {
        self.apply(x, true);
    }

    /// `x ← A⁻¹ x`.
    pub fn solve(&self, x: &mut [f64]) {
        self.solve_lower(x);
        self.solve_upper(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: f64) -> Mat {
        let b = Mat::from_fn(n, n, |i, j| libm::sin(seed + (i * n + j) as f64));
        let mut a = crate::linalg::matmul_tn(&b, &b);
        for i in 0..n {
            a[(i, i)] += 1.0;
        }
        a
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = spd(7, 0.3);
        let c = Cholesky::factor(&a).unwrap();
        let x: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        let mut b = a.matvec(&x);
        c.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = Mat::from_vec(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(Cholesky::factor(&a), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }

    #[test]
    fn kronecker_factor_matches_dense() {
        let (a0, a1) = (spd(3, 0.1), spd(4, 0.7));
        let k = KronCholesky::factor(&[a0.clone(), a1.clone()], 2).unwrap();
        let dense = Cholesky::factor(&a0.kron(&a1)).unwrap();
        let x: Vec<f64> = (0..24).map(|i| libm::cos(i as f64)).collect();
        let mut y = x.clone();
        k.solve_lower(&mut y);
        let mut z = x[12..].to_vec();
        dense.solve_lower(&mut z);
        for (u, v) in y[12..].iter().zip(&z) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
