use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::gram::mass_entry;
use super::legendre::psi_values;
use super::quadrature::QuadratureRule;
use crate::error::{invalid, Error, Result};
use crate::linalg::{gemm, gemm_into, Mat, View};

/// Discretization parameters: spatial dimension, number of components,
/// 1D polynomial count `N`, quadrature points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisSpec {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    pub quad_order: usize,
}

impl BasisSpec {
    pub fn new(dim: usize, m: usize, n: usize, quad_order: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid(alloc::format!("dimension {dim} not in {{1, 2}}")));
        }
        if m == 0 || n == 0 {
            return Err(invalid("need at least one component and one basis function"));
        }
        if quad_order < n + 1 {
            return Err(invalid(alloc::format!(
                "quadrature order {quad_order} below N + 1 = {}",
                n + 1
            )));
        }
        Ok(BasisSpec { dim, m, n, quad_order })
    }

    pub fn scalar_len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn len(&self) -> usize {
        self.m * self.scalar_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symmetry class under the reflection `x_d ↦ 1 − x_d`. `ψ_i` is even for
/// odd `i` and odd for even `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(i: usize) -> Parity {
        if i % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Tensor product of per-axis index sets (1-based `ψ` indices, ascending).
/// Flat ordering is lexicographic with axis 0 slowest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    n: usize,
    axes: Vec<Vec<usize>>,
    label: String,
}

impl Subspace {
    pub fn full(dim: usize, n: usize) -> Self {
        Subspace {
            n,
            axes: vec![(1..=n).collect(); dim],
            label: String::from("full"),
        }
    }

    pub fn with_parity(n: usize, parity: &[Parity]) -> Self {
        let axes = parity
            .iter()
            .map(|p| (1..=n).filter(|i| Parity::of_index(*i) == *p).collect())
            .collect();
        let label = parity
            .iter()
            .map(|p| if *p == Parity::Even { 'e' } else { 'o' })
            .collect();
        Subspace { n, axes, label }
    }

    /// All `2^dim` parity blocks, even-even first.
    pub fn parity_blocks(dim: usize, n: usize) -> Vec<Subspace> {
        (0..1usize << dim)
            .map(|mask| {
                let p: Vec<Parity> = (0..dim)
                    .map(|d| if mask >> (dim - 1 - d) & 1 == 0 { Parity::Even } else { Parity::Odd })
                    .collect();
                Subspace::with_parity(n, &p)
            })
            .filter(|s| s.scalar_len() > 0)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Largest 1D index of the ambient space.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axis(&self, d: usize) -> &[usize] {
        &self.axes[d]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scalar_len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    /// Multi-index (1-based per axis) of flat position `k`.
    pub fn multi_index(&self, mut k: usize) -> [usize; 2] {
        let mut out = [0usize; 2];
        for d in (0..self.dim()).rev() {
            let len = self.axes[d].len();
            out[d] = self.axes[d][k % len];
            k /= len;
        }
        out
    }

    /// Flat position in the full space of the same dimension.
    fn full_position(&self, k: usize) -> usize {
        let mi = self.multi_index(k);
        let mut pos = 0;
        for mi_d in mi.iter().take(self.dim()) {
            pos = pos * self.n + (mi_d - 1);
        }
        pos
    }

    /// Expands `m` stacked component blocks into full-space fields.
    pub fn embed(&self, coeffs: &[f64], m: usize) -> Result<VectorField> {
        let s = self.scalar_len();
        if coeffs.len() != m * s {
            return Err(Error::Mismatch(alloc::format!(
                "{} coefficients for {m} components of size {s}",
                coeffs.len()
            )));
        }
        let full = self.n.pow(self.dim() as u32);
        let comps = (0..m)
            .map(|c| {
                let mut v = vec![0.0; full];
                for k in 0..s {
                    v[self.full_position(k)] = coeffs[c * s + k];
                }
                ScalarField { dim: self.dim(), n: self.n, coeffs: v }
            })
            .collect();
        Ok(VectorField { comps })
    }

    /// Coefficients of `u` on this subspace (other coefficients dropped).
    pub fn restrict(&self, u: &VectorField) -> Result<Vec<f64>> {
        let s = self.scalar_len();
        let mut out = Vec::with_capacity(u.comps.len() * s);
        for c in &u.comps {
            if c.dim != self.dim() || c.n != self.n {
                return Err(Error::Mismatch(String::from("field and subspace differ")));
            }
            out.extend((0..s).map(|k| c.coeffs[self.full_position(k)]));
        }
        Ok(out)
    }

    /// `(u, v)_X` on one scalar block, from the closed-form mass entries.
    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.sparse_form(u, v, |_, i, j| mass_entry(i, j))
    }

    /// `(∇u, ∇v)_X` on one scalar block.
    pub fn stiffness_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let dim = self.dim();
        let mut total = 0.0;
        for grad_axis in 0..dim {
            total += self.sparse_form(u, v, |d, i, j| {
                if d == grad_axis {
                    super::gram::stiffness_entry(i, j)
                } else {
                    mass_entry(i, j)
                }
            });
        }
        total
    }

    fn sparse_form(&self, u: &[f64], v: &[f64], f: impl Fn(usize, usize, usize) -> f64) -> f64 {
        let s = self.scalar_len();
        let mut pos: Vec<alloc::collections::BTreeMap<usize, usize>> = Vec::new();
        for d in 0..self.dim() {
            pos.push(self.axes[d].iter().enumerate().map(|(k, i)| (*i, k)).collect());
        }
        let mut total = 0.0;
        for k in 0..s {
            if u[k] == 0.0 {
                continue;
            }
            let mi = self.multi_index(k);
            // entries vanish unless every index differs by 0 or 2
            let offsets: [i64; 3] = [-2, 0, 2];
            let combos = 3usize.pow(self.dim() as u32);
            for c in 0..combos {
                let mut cc = c;
                let mut flat = 0usize;
                let mut w = 1.0;
                let mut ok = true;
                for d in 0..self.dim() {
                    let j = mi[d] as i64 + offsets[cc % 3];
                    cc /= 3;
                    match (j >= 1).then(|| pos[d].get(&(j as usize))).flatten() {
                        Some(p) => {
                            flat = flat * self.axes[d].len() + p;
                            w *= f(d, mi[d], j as usize);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && w != 0.0 {
                    total += u[k] * w * v[flat];
                }
            }
        }
        total
    }
}

/// Scalar field `Σ c_I ψ_I` on the full tensor space of degree `n`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalarField {
    pub dim: usize,
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(dim: usize, n: usize) -> Self {
        ScalarField { dim, n, coeffs: vec![0.0; n.pow(dim as u32)] }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(invalid("point dimension mismatch"));
        }
        let tabs: Vec<Vec<f64>> = x
            .iter()
            .map(|xd| {
                let mut v = vec![0.0; self.n];
                let mut d1 = vec![0.0; self.n];
                let mut d2 = vec![0.0; self.n];
                let mut s = vec![0.0; 2 * (self.n + 2)];
                psi_values(self.n, *xd, &mut v, &mut d1, &mut d2, &mut s);
                v
            })
            .collect();
        Ok(match self.dim {
            1 => self.coeffs.iter().zip(&tabs[0]).map(|(c, p)| c * p).sum(),
            _ => {
                let mut s = 0.0;
                for i in 0..self.n {
                    for j in 0..self.n {
                        s += self.coeffs[i * self.n + j] * tabs[0][i] * tabs[1][j];
                    }
                }
                s
            }
        })
    }

    /// Re-expands in the full space of degree `n` (truncating or padding).
    pub fn resized(&self, n: usize) -> ScalarField {
        let mut out = ScalarField::zeros(self.dim, n);
        let k = n.min(self.n);
        match self.dim {
            1 => out.coeffs[..k].copy_from_slice(&self.coeffs[..k]),
            _ => {
                for i in 0..k {
                    for j in 0..k {
                        out.coeffs[i * n + j] = self.coeffs[i * self.n + j];
                    }
                }
            }
        }
        out
    }
}

/// `m`-component field.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VectorField {
    pub comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn zeros(dim: usize, m: usize, n: usize) -> Self {
        VectorField { comps: vec![ScalarField::zeros(dim, n); m] }
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn dim(&self) -> usize {
        self.comps[0].dim
    }

    pub fn n(&self) -> usize {
        self.comps[0].n
    }

    pub fn resized(&self, n: usize) -> VectorField {
        VectorField { comps: self.comps.iter().map(|c| c.resized(n)).collect() }
    }

    fn check_same(&self, other: &VectorField) -> Result<()> {
        if self.m() != other.m() || self.dim() != other.dim() || self.n() != other.n() {
            return Err(Error::Mismatch(String::from("fields live in different spaces")));
        }
        Ok(())
    }

    /// `(u, v)_X`.
    pub fn inner_x(&self, other: &VectorField) -> Result<f64> {
        self.check_same(other)?;
        let sub = Subspace::full(self.dim(), self.n());
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| sub.mass_inner(&a.coeffs, &b.coeffs))
            .sum())
    }

    /// `(u, v)_V = (∇u, ∇v)_X`.
    pub fn inner_v(&self, other: &VectorField) -> Result<f64> {
        self.check_same(other)?;
        let sub = Subspace::full(self.dim(), self.n());
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| sub.stiffness_inner(&a.coeffs, &b.coeffs))
            .sum())
    }

    /// Stacked coefficient vector.
    pub fn flat(&self) -> Vec<f64> {
        self.comps.iter().flat_map(|c| c.coeffs.iter().copied()).collect()
    }
}

/// Values on the tensor Gauss grid, lexicographic with axis 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub dim: usize,
    pub points: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(dim: usize, points: usize) -> Self {
        GridField { dim, points, values: vec![0.0; points.pow(dim as u32)] }
    }

    pub fn from_fn(rule: &QuadratureRule, dim: usize, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let g = rule.len();
        let mut values = Vec::with_capacity(g.pow(dim as u32));
        if dim == 1 {
            for x in &rule.nodes {
                values.push(f(&[*x]));
            }
        } else {
            for x in &rule.nodes {
                for y in &rule.nodes {
                    values.push(f(&[*x, *y]));
                }
            }
        }
        GridField { dim, points: g, values }
    }

    /// `∫ a b` by the tensor rule.
    pub fn inner(&self, other: &GridField, rule: &QuadratureRule) -> f64 {
        let w = &rule.weights;
        let g = self.points;
        if self.dim == 1 {
            (0..g).map(|p| w[p] * self.values[p] * other.values[p]).sum()
        } else {
            let mut s = 0.0;
            for p in 0..g {
                let mut row = 0.0;
                for r in 0..g {
                    row += w[r] * self.values[p * g + r] * other.values[p * g + r];
                }
                s += w[p] * row;
            }
            s
        }
    }

    pub fn axpy(&mut self, alpha: f64, other: &GridField) {
        crate::linalg::axpy(alpha, &other.values, &mut self.values);
    }

    pub fn mul_assign(&mut self, other: &GridField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a *= b;
        }
    }

    pub fn product(&self, other: &GridField) -> GridField {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }
}

/// Which derivative of the 1D basis to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deriv {
    Val,
    D1,
    D2,
}

/// `ψ_i`, `ψ_i'`, `ψ_i''` at the nodes of a rule, basis-major.
#[derive(Clone, Debug)]
pub struct BasisTable {
    pub idx: Vec<usize>,
    pub points: usize,
    val: Mat,
    d1: Mat,
    d2: Mat,
}

impl BasisTable {
    pub fn new(idx: &[usize], rule: &QuadratureRule) -> Self {
        let n = idx.iter().copied().max().unwrap_or(0);
        let g = rule.len();
        let mut val = Mat::zeros(idx.len(), g);
        let mut d1 = Mat::zeros(idx.len(), g);
        let mut d2 = Mat::zeros(idx.len(), g);
        let (mut v, mut a, mut b) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut s = vec![0.0; 2 * (n + 2)];
        for (p, x) in rule.nodes.iter().enumerate() {
            psi_values(n, *x, &mut v, &mut a, &mut b, &mut s);
            for (k, i) in idx.iter().enumerate() {
                val[(k, p)] = v[i - 1];
                d1[(k, p)] = a[i - 1];
                d2[(k, p)] = b[i - 1];
            }
        }
        BasisTable { idx: idx.to_vec(), points: g, val, d1, d2 }
    }

    pub fn get(&self, d: Deriv) -> &Mat {
        match d {
            Deriv::Val => &self.val,
            Deriv::D1 => &self.d1,
            Deriv::D2 => &self.d2,
        }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }
}

/// Per-axis basis tables of a subspace at a quadrature rule.
#[derive(Clone, Debug)]
pub struct TensorTables {
    pub rule: QuadratureRule,
    pub axes: Vec<BasisTable>,
}

impl TensorTables {
    pub fn new(sub: &Subspace, rule: &QuadratureRule) -> Self {
        TensorTables {
            rule: rule.clone(),
            axes: (0..sub.dim()).map(|d| BasisTable::new(sub.axis(d), rule)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn points(&self) -> usize {
        self.rule.len()
    }

    pub fn scalar_len(&self) -> usize {
        self.axes.iter().map(BasisTable::len).product()
    }

    /// Grid values of `Σ c_I ∂^{d}ψ_I` for one scalar block.
    pub fn synthesize(&self, coeffs: &[f64], derivs: &[Deriv]) -> GridField {
        let g = self.points();
        assert_eq!(coeffs.len(), self.scalar_len());
        if self.dim() == 1 {
            let b = self.axes[0].get(derivs[0]);
            let mut values = vec![0.0; g];
            gemm_into(1.0, View::raw(coeffs, 1, b.rows()), View::of(b), 0.0, &mut values);
            return GridField { dim: 1, points: g, values };
        }
        let b0 = self.axes[0].get(derivs[0]);
        let b1 = self.axes[1].get(derivs[1]);
        let c = View::raw(coeffs, b0.rows(), b1.rows());
        let t = gemm(c, View::of(b1));
        let v = gemm(View::of(b0).t(), View::of(&t));
        GridField { dim: 2, points: g, values: v.into_vec() }
    }

    pub fn values(&self, coeffs: &[f64]) -> GridField {
        self.synthesize(coeffs, &[Deriv::Val, Deriv::Val][..self.dim()])
    }

    /// Grid values of `Δ(Σ c_I ψ_I)`.
    pub fn laplacian(&self, coeffs: &[f64]) -> GridField {
        if self.dim() == 1 {
            return self.synthesize(coeffs, &[Deriv::D2]);
        }
        let mut a = self.synthesize(coeffs, &[Deriv::D2, Deriv::Val]);
        let b = self.synthesize(coeffs, &[Deriv::Val, Deriv::D2]);
        a.axpy(1.0, &b);
        a
    }

    /// Load vector `∫ g ψ_I` of grid values.
    pub fn load(&self, grid: &GridField) -> Vec<f64> {
        let g = self.points();
        let w = &self.rule.weights;
        if self.dim() == 1 {
            let wg: Vec<f64> = (0..g).map(|p| w[p] * grid.values[p]).collect();
            return self.axes[0].val.matvec(&wg);
        }
        let mut wg = grid.values.clone();
        for p in 0..g {
            for r in 0..g {
                wg[p * g + r] *= w[p] * w[r];
            }
        }
        let t = gemm(View::of(&self.axes[0].val), View::raw(&wg, g, g));
        gemm(View::of(&t), View::of(&self.axes[1].val).t()).into_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::gauss_rule;

    #[test]
    fn parity_blocks_partition_the_space() {
        let blocks = Subspace::parity_blocks(2, 5);
        assert_eq!(blocks.len(), 4);
        assert_eq!(blocks.iter().map(Subspace::scalar_len).sum::<usize>(), 25);
        assert_eq!(blocks[0].label(), "ee");
        assert_eq!(blocks[0].axis(0), &[1, 3, 5]);
    }

    #[test]
    fn load_of_synthesized_field_is_mass_times_coefficients() {
        let rule = gauss_rule(8).unwrap();
        let sub = Subspace::with_parity(6, &[Parity::Even, Parity::Odd]);
        let tabs = TensorTables::new(&sub, &rule);
        let c: Vec<f64> = (0..sub.scalar_len()).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let grid = tabs.values(&c);
        let load = tabs.load(&grid);
        for k in 0..sub.scalar_len() {
            let mut e = vec![0.0; sub.scalar_len()];
            e[k] = 1.0;
            let exact = sub.mass_inner(&e, &c);
            assert!((load[k] - exact).abs() < 1e-15, "{k}: {} vs {exact}", load[k]);
        }
    }
}
