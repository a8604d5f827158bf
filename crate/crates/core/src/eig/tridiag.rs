use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{axpy, dot, Mat};

/// Householder reduction `A = H Tᵀ Hᵀ` of a symmetric matrix to tridiagonal
/// form, with the reflectors kept for back-transformation.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    // reflector k lives in row k, columns k+1.., with factor beta[k]
    reflectors: Mat,
    beta: Vec<f64>,
}

impl Tridiagonal {
    pub fn reduce(a: &Mat) -> Self {
        let n = a.rows();
        let mut a = a.clone();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut beta = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut v = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            let len = n - k - 1;
            for i in 0..len {
                v[i] = a[(k + 1 + i, k)];
            }
            let norm = libm::sqrt(dot(&v[..len], &v[..len]));
            if norm == 0.0 {
                off[k] = 0.0;
                beta[k] = 0.0;
                a.row_mut(k)[k + 1..].iter_mut().for_each(|x| *x = 0.0);
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vv = dot(&v[..len], &v[..len]);
            let b = 2.0 / vv;
            off[k] = alpha;
            beta[k] = b;
            // p = b·A22 v, w = p − (b/2)(vᵀp) v
            for i in 0..len {
                p[i] = b * dot(&a.row(k + 1 + i)[k + 1..], &v[..len]);
            }
            let kk = 0.5 * b * dot(&p[..len], &v[..len]);
            for i in 0..len {
                p[i] -= kk * v[i];
            }
            for i in 0..len {
                let row = &mut a.row_mut(k + 1 + i)[k + 1..];
                axpy(-v[i], &p[..len], row);
                axpy(-p[i], &v[..len], row);
            }
            a.row_mut(k)[k + 1..].copy_from_slice(&v[..len]);
        }
        for k in 0..n {
            diag[k] = a[(k, k)];
        }
        if n >= 2 {
            off[n - 2] = a[(n - 1, n - 2)];
            beta[n - 2] = 0.0;
        }
        Tridiagonal { diag, off, reflectors: a, beta }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues of `T` below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let scale = self.norm_bound().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale * 1e-3;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q.abs() < tiny {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + l + r
            })
            .fold(0.0, f64::max)
    }

    /// The `k` smallest eigenvalues by bisection.
    pub fn smallest_values(&self, k: usize) -> Vec<f64> {
        let r = self.norm_bound();
        let (lo0, hi0) = (-r * (1.0 + 1e-12) - 1e-300, r * (1.0 + 1e-12) + 1e-300);
        (0..k.min(self.len()))
            .map(|idx| {
                // the (idx+1)-th eigenvalue is the smallest x with count_below(x) > idx
                let (mut lo, mut hi) = (lo0, hi0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > idx {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Eigenvector of `T` for the approximate eigenvalue `lambda` by inverse
    /// iteration, orthogonalized against `previous` (vectors of nearby
    /// eigenvalues).
    pub fn inverse_iteration(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let scale = self.norm_bound().max(f64::MIN_POSITIVE);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * libm::sin(1.0 + i as f64)).collect();
        for _ in 0..4 {
            for p in previous {
                let c = dot(p, &x);
                axpy(-c, p, &mut x);
            }
            x = self.shifted_solve(lambda, &x, scale);
            let nx = libm::sqrt(dot(&x, &x));
            x.iter_mut().for_each(|v| *v /= nx);
        }
        for p in previous {
            let c = dot(p, &x);
            axpy(-c, p, &mut x);
        }
        let nx = libm::sqrt(dot(&x, &x));
        x.iter_mut().for_each(|v| *v /= nx);
        x
    }

    /// Solves `(T − λI) y = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, lambda: f64, b: &[f64], scale: f64) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * scale;
        // row i holds (d[i], u1[i], u2[i]) for columns i, i+1, i+2
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - lambda).collect();
        let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { self.off[i] } else { 0.0 }).collect();
        let mut u2 = vec![0.0; n];
        let mut y = b.to_vec();
        let mut sub: Vec<f64> = self.off.clone();
        for i in 0..n.saturating_sub(1) {
            let l = sub[i];
            if l.abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, u1i, u2i) = (d[i], u1[i], u2[i]);
                d[i] = l;
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                let f = di / l;
                d[i + 1] = u1i - f * u1[i];
                u1[i + 1] = u2i - f * u2[i];
                y.swap(i, i + 1);
                y[i + 1] -= f * y[i];
            } else {
                let piv = if d[i].abs() < tiny { tiny } else { d[i] };
                d[i] = piv;
                let f = l / piv;
                d[i + 1] -= f * u1[i];
                u1[i + 1] -= f * u2[i];
                y[i + 1] -= f * y[i];
            }
            sub[i] = 0.0;
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * y[i + 2];
            }
            y[i] = s / d[i];
        }
        y
    }

    /// `x ← H x`, mapping an eigenvector of `T` to one of the original matrix.
    pub fn back_transform(&self, x: &mut [f64]) {
        let n = self.len();
        for k in (0..n.saturating_sub(2)).rev() {
            let b = self.beta[k];
            if b == 0.0 {
                continue;
            }
            let v = &self.reflectors.row(k)[k + 1..];
            let c = b * dot(v, &x[k + 1..]);
            axpy(-c, v, &mut x[k + 1..]);
        }
    }
}

/// `k` smallest eigenpairs of a symmetric matrix through tridiagonal
/// reduction, bisection and inverse iteration.
pub fn tridiagonal_eig_smallest(a: &Mat, k: usize) -> (Vec<f64>, Mat) {
    let t = Tridiagonal::reduce(a);
    let vals = t.smallest_values(k);
    let n = a.rows();
    let gap_tol = 1e-7 * t.norm_bound().max(f64::MIN_POSITIVE);
    let mut tvecs: Vec<Vec<f64>> = Vec::with_capacity(vals.len());
    for (i, &lam) in vals.iter().enumerate() {
        let cluster: Vec<Vec<f64>> = (0..i)
            .filter(|&j| (vals[j] - lam).abs() < gap_tol)
            .map(|j| tvecs[j].clone())
            .collect();
        tvecs.push(t.inverse_iteration(lam, &cluster));
    }
    let mut vecs = Mat::zeros(n, vals.len());
    for (j, mut v) in tvecs.into_iter().enumerate() {
        t.back_transform(&mut v);
        for i in 0..n {
            vecs[(i, j)] = v[i];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_jacobi_on_random_matrix() {
        let n = 40;
        let b = Mat::from_fn(n, n, |i, j| libm::sin((i * 7 + j * 3) as f64) + if i == j { i as f64 * 0.1 } else { 0.0 });
        let mut a = b.clone();
        a.axpy(1.0, &b.transpose());
        let (jv, _) = super::super::jacobi::jacobi_eig(&a);
        let (tv, vecs) = tridiagonal_eig_smallest(&a, 5);
        for i in 0..5 {
            assert!((jv[i] - tv[i]).abs() < 1e-11, "{i}: {} {}", jv[i], tv[i]);
            let x = vecs.column(i);
            let ax = a.matvec(&x);
            let r: f64 = ax.iter().zip(&x).map(|(p, q)| (p - tv[i] * q).powi(2)).sum();
            assert!(libm::sqrt(r) < 1e-10);
        }
    }
}
