//! Lehmann–Maehly lower bounds (Temple for a single trial function).
//!
//! For a self-adjoint `S` with exactly `j−1` eigenvalues below `ρ` and trial
//! functions `u_1..u_n`, put `M0 = (u_i,u_k)`, `M1 = (Su_i,u_k)`,
//! `M2 = (Su_i,Su_k)` and solve `(M1 − ρM0) x = τ (M2 − 2ρM1 + ρ²M0) x`.
//! If the pencil has at least `p` eigenvalues below `t < 0`, then
//! `λ^{(j−p)} ≥ ρ + 1/t`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{apply_modified_operator, CoefficientMatrix, GramMatrices};
use crate::eig::{jacobi_eig, Cholesky};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rigor::{gamma, Interval};
use crate::spectral::{GridField, QuadratureRule, TensorTables};

/// Symmetric interval matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    pub n: usize,
    pub data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn from_points(a: &Mat) -> Self {
        IntervalMatrix { n: a.rows(), data: a.as_slice().iter().map(|v| Interval::point(*v)).collect() }
    }

    pub fn get(&self, i: usize, k: usize) -> Interval {
        self.data[i * self.n + k]
    }

    pub fn mid(&self) -> Mat {
        Mat::from_fn(self.n, self.n, |i, k| self.get(i, k).mid())
    }

    fn combine(&self, other: &IntervalMatrix, f: impl Fn(Interval, Interval) -> Interval) -> Self {
        IntervalMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() }
    }

    /// Hull of `A` and `Aᵀ`, so that every symmetric member is contained.
    fn symmetric_hull(mut self) -> Self {
        let n = self.n;
        for i in 0..n {
            for k in i + 1..n {
                let h = self.data[i * n + k].hull(self.data[k * n + i]);
                self.data[i * n + k] = h;
                self.data[k * n + i] = h;
            }
        }
        self
    }
}

/// True if every symmetric matrix in the interval matrix is positive
/// definite (interval Cholesky succeeds).
pub fn interval_positive_definite(a: &IntervalMatrix) -> bool {
    let n = a.n;
    let mut l = vec![Interval::ZERO; n * n];
    for j in 0..n {
        let mut s = a.get(j, j);
        for k in 0..j {
            s = s - l[j * n + k].sqr();
        }
        if !(s.lo > 0.0) {
            return false;
        }
        let d = s.sqrt_nonneg();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut t = a.get(i, j);
            for k in 0..j {
                t = t - l[i * n + k] * l[j * n + k];
            }
            match t / d {
                Ok(v) => l[i * n + j] = v,
                Err(_) => return false,
            }
        }
    }
    true
}

/// Gram data of the trial functions.
#[derive(Clone, Debug, PartialEq)]
pub struct LehmannMatrices {
    pub m0: IntervalMatrix,
    pub m1: IntervalMatrix,
    pub m2: IntervalMatrix,
}

impl LehmannMatrices {
    pub fn len(&self) -> usize {
        self.m0.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rayleigh quotient upper bounds `M1_ii / M0_ii`.
    pub fn rayleigh_quotients(&self) -> Vec<Interval> {
        (0..self.len())
            .map(|i| (self.m1.get(i, i) / self.m0.get(i, i)).unwrap_or(Interval::point(f64::INFINITY)))
            .collect()
    }
}

/// Outcome of the refinement.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefinedBound {
    pub rho: Interval,
    pub j: usize,
    pub trials: usize,
    /// Pencil eigenvalues (midpoint matrices), ascending.
    pub tau: Vec<f64>,
    /// `lower[i]` bounds `λ^{(i+1)}` from below, `i < j−1`.
    pub lower: Vec<Interval>,
    pub lambda1_lower: Interval,
}

/// Lehmann bounds for `λ^{(1)}, …, λ^{(j−1)}` given `ρ` with
/// `λ^{(j−1)} < ρ ≤ λ^{(j)}`.
pub fn lehmann_bounds(mats: &LehmannMatrices, rho: Interval, j: usize) -> Result<RefinedBound> {
    let n = mats.len();
    if j < 2 || n < j - 1 {
        return Err(Error::Refinement(alloc::format!("{n} trial functions cannot bound {} eigenvalues", j.saturating_sub(1))));
    }
    let rq = mats.rayleigh_quotients();
    if let Some(i) = (0..j - 1).find(|&i| !(rq[i].hi < rho.lo)) {
        return Err(Error::Refinement(alloc::format!(
            "Rayleigh quotient {} of trial {} is not below rho = {}",
            rq[i].hi,
            i + 1,
            rho.lo
        )));
    }
    let a0 = mats.m1.combine(&mats.m0, |m1, m0| m1 - rho * m0).symmetric_hull();
    let a1 = {
        let t = mats.m2.combine(&mats.m1, |m2, m1| m2 - rho * m1 * 2.0);
        t.combine(&mats.m0, |t, m0| t + rho.sqr() * m0).symmetric_hull()
    };
    if !interval_positive_definite(&a1) {
        return Err(Error::Refinement(String::from("M2 − 2ρM1 + ρ²M0 is not verifiably positive definite")));
    }
    // midpoint pencil
    let a0m = a0.mid();
    let a1m = a1.mid();
    let ch = Cholesky::factor(&a1m)?;
    let mut k = a0m.clone();
    ch.solve_lower_mat(&mut k);
    let mut k = k.transpose();
    ch.solve_lower_mat(&mut k);
    k.symmetrize();
    let (tau, z) = jacobi_eig(&k);
    let mut x = z.clone();
    ch.solve_upper_mat(&mut x);

    let mut lower = vec![Interval::ZERO; j - 1];
    for p in 1..j {
        let tp = tau[p - 1];
        if !(tp < 0.0) {
            return Err(Error::Refinement(alloc::format!("pencil has fewer than {p} negative eigenvalues")));
        }
        let cols: Vec<usize> = (0..p).collect();
        let rows: Vec<usize> = (0..n).collect();
        let v = x.select(&rows, &cols);
        let mut found = None;
        let mut delta = 1e-13;
        while delta <= 1e-2 {
            let t = tp + delta * tp.abs();
            if t >= 0.0 {
                break;
            }
            if negative_definite_on(&a0, &a1, t, &v) {
                found = Some(t);
                break;
            }
            delta *= 10.0;
        }
        let t = found.ok_or_else(|| {
            Error::Refinement(alloc::format!("could not verify {p} pencil eigenvalues below τ_{p} ≈ {tp}"))
        })?;
        let b = rho + (Interval::ONE / Interval::point(t))?;
        lower[j - 1 - p] = b;
    }
    let lambda1_lower = lower[0];
    if let Some(i) = (0..n).find(|&i| lambda1_lower.lo > rq[i].hi) {
        return Err(Error::Refinement(alloc::format!(
            "lower bound {} exceeds the Rayleigh quotient of trial {}",
            lambda1_lower.lo,
            i + 1
        )));
    }
    Ok(RefinedBound { rho, j, trials: n, tau, lower, lambda1_lower })
}

/// Checks that `Vᵀ(A0 − tA1)V` is negative definite for all members.
fn negative_definite_on(a0: &IntervalMatrix, a1: &IntervalMatrix, t: f64, v: &Mat) -> bool {
    let n = a0.n;
    let p = v.cols();
    let tt = Interval::point(t);
    let b: Vec<Interval> = a0.data.iter().zip(&a1.data).map(|(x, y)| *x - tt * *y).collect();
    let mut bv = vec![Interval::ZERO; n * p];
    for i in 0..n {
        for c in 0..p {
            let mut s = Interval::ZERO;
            for k in 0..n {
                s += b[i * n + k] * v[(k, c)];
            }
            bv[i * p + c] = s;
        }
    }
    let mut h = IntervalMatrix { n: p, data: vec![Interval::ZERO; p * p] };
    for r in 0..p {
        for c in 0..p {
            let mut s = Interval::ZERO;
            for i in 0..n {
                s += Interval::point(v[(i, r)]) * bv[i * p + c];
            }
            h.data[r * p + c] = -s;
        }
    }
    interval_positive_definite(&h.symmetric_hull())
}

/// Temple's bound `(ρη − M2)/(ρ − η)` with `η = M1/M0` for one trial.
pub fn temple_bound(m0: f64, m1: f64, m2: f64, rho: f64) -> Result<Interval> {
    let (m0, m1, m2, rho) = (Interval::point(m0), Interval::point(m1), Interval::point(m2), Interval::point(rho));
    let eta = (m1 / m0)?;
    let num = rho * eta - (m2 / m0)?;
    num / (rho - eta)
}

/// A trial function: coefficients on the subspace of `gram`.
pub struct Trial<'a> {
    pub gram: &'a GramMatrices,
    pub coeffs: &'a [f64],
}

/// `M0`, `M1`, `M2` for the operator `S u = −Δu − (q+qᵀ)u + q·R_hA⁻¹(qᵀu) + σu`,
/// integrated on the tensor `rule`, which must integrate `(Su_i)(Su_k)`
/// exactly. Each entry carries the rounding radius of its final quadrature
/// sum; grid values are treated as exact.
pub fn lehmann_matrices(trials: &[Trial<'_>], q: &CoefficientMatrix, sigma: f64, rule: &QuadratureRule) -> Result<LehmannMatrices> {
    let n = trials.len();
    let qgrid = q.to_grid(rule);
    let mut tables: BTreeMap<String, TensorTables> = BTreeMap::new();
    let mut u: Vec<Vec<GridField>> = Vec::with_capacity(n);
    let mut su: Vec<Vec<GridField>> = Vec::with_capacity(n);
    for t in trials {
        if t.gram.m != q.m {
            return Err(Error::Mismatch(String::from("trial and coefficient component counts differ")));
        }
        let key = String::from(t.gram.subspace.label());
        let tabs = tables.entry(key).or_insert_with(|| TensorTables::new(&t.gram.subspace, rule));
        let s = t.gram.scalar_len();
        u.push(t.coeffs.chunks(s).map(|c| tabs.values(c)).collect());
        su.push(apply_modified_operator(t.gram, tabs, &qgrid, t.coeffs, sigma)?);
    }
    let points = rule.len().pow(q.dim as u32) * q.m + 2;
    let entry = |a: &[GridField], b: &[GridField]| -> Interval {
        let mut v = 0.0;
        let mut abs = 0.0;
        for (x, y) in a.iter().zip(b) {
            v += x.inner(y, rule);
            let ax = GridField { values: x.values.iter().map(|t| t.abs()).collect(), ..x.clone() };
            let ay = GridField { values: y.values.iter().map(|t| t.abs()).collect(), ..y.clone() };
            abs += ax.inner(&ay, rule);
        }
        Interval::ball(v, gamma(points) * abs * 1.01)
    };
    let mut m0 = vec![Interval::ZERO; n * n];
    let mut m1 = vec![Interval::ZERO; n * n];
    let mut m2 = vec![Interval::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            m0[i * n + k] = entry(&u[i], &u[k]);
            m1[i * n + k] = entry(&su[i], &u[k]);
            m2[i * n + k] = entry(&su[i], &su[k]);
        }
    }
    Ok(LehmannMatrices {
        m0: IntervalMatrix { n, data: m0 }.symmetric_hull(),
        m1: IntervalMatrix { n, data: m1 }.symmetric_hull(),
        m2: IntervalMatrix { n, data: m2 }.symmetric_hull(),
    })
}
