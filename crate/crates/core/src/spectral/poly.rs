use alloc::vec;
use alloc::vec::Vec;

use super::field::{GridField, ScalarField};
use super::legendre::{legendre_derivatives, legendre_values};
use super::quadrature::{gauss_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::rigor::{gamma, Interval};

/// Polynomial `Σ c_{kl} P_k(x) P_l(y)` in the tensor Legendre basis of
/// degree `deg` per axis. Coefficient fields of the perturbation are kept
/// in this form so that constants and coordinate functions are exact.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolyField {
    pub dim: usize,
    pub deg: usize,
    pub coeffs: Vec<f64>,
}

/// Per-axis point data shared between the entries of a coefficient matrix.
pub(crate) struct AxisEval {
    p: Vec<f64>,
    dp: Vec<f64>,
}

impl AxisEval {
    pub(crate) fn new(deg: usize, x: f64) -> Self {
        let mut p = vec![0.0; deg + 1];
        let mut dp = vec![0.0; deg + 1];
        legendre_values(deg, x, &mut p);
        legendre_derivatives(deg, &p, &mut dp);
        AxisEval { p, dp }
    }
}

impl PolyField {
    pub fn zero(dim: usize) -> Self {
        PolyField::constant(dim, 0.0)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        PolyField { dim, deg: 0, coeffs: vec![c] }
    }

    /// The coordinate function `x_axis = (P_0 + P_1)/2`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut f = PolyField { dim, deg: 1, coeffs: vec![0.0; 2usize.pow(dim as u32)] };
        f.coeffs[0] = 0.5;
        let k = if dim == 1 || axis == 1 { 1 } else { 2 };
        f.coeffs[k] = 0.5;
        f
    }

    fn stride(&self) -> usize {
        self.deg + 1
    }

    pub fn coeff(&self, k: usize, l: usize) -> f64 {
        if self.dim == 1 {
            self.coeffs[k]
        } else {
            self.coeffs[k * self.stride() + l]
        }
    }

    /// Re-expresses a `ψ`-expansion exactly; degree becomes `n + 1`.
    pub fn from_scalar_field(f: &ScalarField) -> Self {
        let n = f.n;
        let deg = n + 1;
        // ψ_i = a_i (P_{i−1} − P_{i+1})
        let a = |i: usize| 1.0 / (2.0 * (2 * i + 1) as f64);
        if f.dim == 1 {
            let mut c = vec![0.0; deg + 1];
            for i in 1..=n {
                let v = f.coeffs[i - 1] * a(i);
                c[i - 1] += v;
                c[i + 1] -= v;
            }
            return PolyField { dim: 1, deg, coeffs: c };
        }
        let s = deg + 1;
        // first axis 0, then axis 1
        let mut t = vec![0.0; s * n];
        for i in 1..=n {
            for j in 0..n {
                let v = f.coeffs[(i - 1) * n + j] * a(i);
                t[(i - 1) * n + j] += v;
                t[(i + 1) * n + j] -= v;
            }
        }
        let mut c = vec![0.0; s * s];
        for k in 0..s {
            for j in 1..=n {
                let v = t[k * n + j - 1] * a(j);
                c[k * s + j - 1] += v;
                c[k * s + j + 1] -= v;
            }
        }
        PolyField { dim: 2, deg, coeffs: c }
    }

    /// Legendre projection of grid values onto degree `deg`. Exact when the
    /// sampled function is a polynomial of degree `≤ deg` and `rule`
    /// integrates degree `2·deg` exactly.
    pub fn from_grid(grid: &GridField, rule: &QuadratureRule, deg: usize) -> Result<Self> {
        rule.require_degree(2 * deg)?;
        let g = rule.len();
        let mut tab = vec![0.0; (deg + 1) * g];
        let mut p = vec![0.0; deg + 1];
        for (r, x) in rule.nodes.iter().enumerate() {
            legendre_values(deg, *x, &mut p);
            for k in 0..=deg {
                tab[k * g + r] = p[k] * rule.weights[r] * (2 * k + 1) as f64;
            }
        }
        let s = deg + 1;
        if grid.dim == 1 {
            let c = (0..s)
                .map(|k| (0..g).map(|r| tab[k * g + r] * grid.values[r]).sum())
                .collect();
            return Ok(PolyField { dim: 1, deg, coeffs: c });
        }
        let t = crate::linalg::gemm(
            crate::linalg::View::raw(&tab, s, g),
            crate::linalg::View::raw(&grid.values, g, g),
        );
        let c = crate::linalg::gemm(
            crate::linalg::View::of(&t),
            crate::linalg::View::raw(&tab, s, g).t(),
        );
        Ok(PolyField { dim: 2, deg, coeffs: c.into_vec() })
    }

    /// Same polynomial with degree raised to `deg` (zero padding).
    pub fn raised(&self, deg: usize) -> Self {
        if deg <= self.deg {
            return self.clone();
        }
        let s = deg + 1;
        let mut out = PolyField { dim: self.dim, deg, coeffs: vec![0.0; s.pow(self.dim as u32)] };
        if self.dim == 1 {
            out.coeffs[..self.stride()].copy_from_slice(&self.coeffs);
        } else {
            for k in 0..self.stride() {
                for l in 0..self.stride() {
                    out.coeffs[k * s + l] = self.coeff(k, l);
                }
            }
        }
        out
    }

    /// `self + alpha·other`.
    pub fn add_scaled(&self, alpha: f64, other: &PolyField) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Mismatch(alloc::string::String::from("polynomial dimensions differ")));
        }
        let deg = self.deg.max(other.deg);
        let mut out = self.raised(deg);
        let o = other.raised(deg);
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a += alpha * b;
        }
        Ok(out)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= alpha);
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let ax: Vec<AxisEval> = x.iter().map(|xd| AxisEval::new(self.deg, *xd)).collect();
        self.eval_axes(&ax).0
    }

    /// Value and gradient from precomputed axis data.
    pub(crate) fn eval_axes(&self, ax: &[AxisEval]) -> (f64, [f64; 2]) {
        let s = self.stride();
        if self.dim == 1 {
            let (mut v, mut g) = (0.0, 0.0);
            for k in 0..s {
                v += self.coeffs[k] * ax[0].p[k];
                g += self.coeffs[k] * ax[0].dp[k];
            }
            return (v, [g, 0.0]);
        }
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for k in 0..s {
            let row = &self.coeffs[k * s..(k + 1) * s];
            let (mut rv, mut rd) = (0.0, 0.0);
            for l in 0..s {
                rv += row[l] * ax[1].p[l];
                rd += row[l] * ax[1].dp[l];
            }
            v += ax[0].p[k] * rv;
            gx += ax[0].dp[k] * rv;
            gy += ax[0].p[k] * rd;
        }
        (v, [gx, gy])
    }

    pub fn to_grid(&self, rule: &QuadratureRule) -> GridField {
        let ax: Vec<AxisEval> = rule.nodes.iter().map(|x| AxisEval::new(self.deg, *x)).collect();
        let g = rule.len();
        let mut values = Vec::with_capacity(g.pow(self.dim as u32));
        if self.dim == 1 {
            for a in &ax {
                values.push(self.eval_axes(core::slice::from_ref(a)).0);
            }
        } else {
            let s = self.stride();
            // rows contracted with y first
            for a in &ax {
                let rowv: Vec<f64> = (0..s)
                    .map(|l| (0..s).map(|k| self.coeffs[k * s + l] * a.p[k]).sum())
                    .collect();
                for b in &ax {
                    values.push((0..s).map(|l| rowv[l] * b.p[l]).sum());
                }
            }
        }
        GridField { dim: self.dim, points: g, values }
    }

    /// Exact product (degree `deg₁ + deg₂`) by Legendre projection.
    pub fn product(&self, other: &PolyField) -> Result<Self> {
        let deg = self.deg + other.deg;
        let rule = gauss_rule(deg + 1)?;
        let mut a = self.to_grid(&rule);
        a.mul_assign(&other.to_grid(&rule));
        PolyField::from_grid(&a, &rule, deg)
    }

    /// True if the field is invariant under `x_axis ↦ 1 − x_axis`, i.e. every
    /// odd-degree coefficient along that axis is exactly zero.
    pub fn is_reflection_even(&self, axis: usize) -> bool {
        let s = self.stride();
        self.coeffs.iter().enumerate().all(|(idx, c)| {
            let k = match (self.dim, axis) {
                (1, _) => idx,
                (_, 0) => idx / s,
                _ => idx % s,
            };
            k % 2 == 0 || *c == 0.0
        })
    }

    /// The part invariant under every reflection: odd-degree coefficients
    /// along any axis set to zero.
    pub fn even_part(&self) -> Self {
        let s = self.stride();
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let odd = if self.dim == 1 { idx % 2 == 1 } else { (idx / s) % 2 == 1 || (idx % s) % 2 == 1 };
            if odd {
                *c = 0.0;
            }
        }
        out
    }

    /// `Σ |c|`, rounded up.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(Interval::ZERO, |acc, c| acc + Interval::point(c.abs()))
            .hi
    }

    /// Upper bounds for `sup|∂xx|`, `sup|∂xy|`, `sup|∂yy|` on the unit box,
    /// from `|P_k| ≤ 1`, `|P_k'| ≤ k(k+1)`, `|P_k''| ≤ (k−1)k(k+1)(k+2)/2`.
    pub fn hessian_bound(&self) -> [f64; 3] {
        let s = self.stride();
        let d1 = |k: usize| (k * (k + 1)) as f64;
        let d2 = |k: usize| if k < 2 { 0.0 } else { ((k - 1) * k * (k + 1) * (k + 2)) as f64 / 2.0 };
        let (mut hxx, mut hxy, mut hyy) = (Interval::ZERO, Interval::ZERO, Interval::ZERO);
        if self.dim == 1 {
            for k in 0..s {
                hxx += Interval::point(self.coeffs[k].abs()) * d2(k);
            }
            return [hxx.hi, 0.0, 0.0];
        }
        for k in 0..s {
            for l in 0..s {
                let c = Interval::point(self.coeffs[k * s + l].abs());
                if c.hi == 0.0 {
                    continue;
                }
                hxx += c * d2(k);
                hyy += c * d2(l);
                hxy += c * (d1(k) * d1(l));
            }
        }
        [hxx.hi, hxy.hi, hyy.hi]
    }

    /// Absolute floating-point error bounds `(value, gradient)` for
    /// [`PolyField::eval_axes`], assuming the forward Legendre recurrence on
    /// `[0,1]` carries an error of at most `4(k+1)u` in `P_k`.
    pub(crate) fn eval_error(&self) -> (f64, f64) {
        let u = f64::EPSILON * 0.5;
        let d = (self.deg + 1) as f64;
        let terms = self.coeffs.len() + 2;
        let s = self.abs_sum();
        let val = (8.0 * d * u + gamma(terms)) * s;
        let grad = (16.0 * d * d * d * u + gamma(terms) * d * d) * s;
        (val * 1.0001, grad * 1.0001)
    }
}
