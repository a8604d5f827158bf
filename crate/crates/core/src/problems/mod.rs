//! Model problems `−Δu = f(u)` and a damped Newton–Galerkin solver whose
//! linearization `q = f′[û]` feeds the certification pipeline.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assembly::{assemble_q_grid, CoefficientMatrix, GramMatrices};
use crate::error::{invalid, Error, Result};
use crate::linalg::{lu_solve, norm2, Mat};
use crate::spectral::{gauss_rule, points_for_degree, GridField, PolyField, QuadratureRule, Subspace, TensorTables, VectorField};

/// A pointwise nonlinearity `f(x, u)` with `m` components.
pub trait Nonlinearity: Send + Sync {
    fn m(&self) -> usize;
    /// Polynomial degree of `f` in `u`.
    fn degree(&self) -> usize;
    /// Polynomial degree of `f` in each coordinate of `x`.
    fn x_degree(&self) -> usize {
        0
    }
    fn eval(&self, x: &[f64], u: &[f64], out: &mut [f64]);
    /// `∂f_a/∂u_b`, row-major.
    fn jacobian(&self, x: &[f64], u: &[f64], out: &mut [f64]);
}

/// A semilinear problem on the unit box.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub m: usize,
    pub f: Arc<dyn Nonlinearity>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec").field("name", &self.name).field("dim", &self.dim).field("m", &self.m).finish()
    }
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, dim: usize, f: Arc<dyn Nonlinearity>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid("dimension must be 1 or 2"));
        }
        if f.m() == 0 {
            return Err(invalid("at least one component required"));
        }
        Ok(ProblemSpec { name: name.into(), dim, m: f.m(), f })
    }

    /// The Fréchet derivative `f′[û]` as polynomial coefficient fields.
    pub fn jacobian_coefficients(&self, u: &VectorField) -> Result<CoefficientMatrix> {
        self.check_field(u)?;
        let jdeg = self.f.degree().saturating_sub(1);
        let deg = jdeg * (u.n() + 1) + self.f.x_degree();
        let rule = gauss_rule(points_for_degree(2 * deg))?;
        let grids = self.jacobian_grids(u, &rule)?;
        let mut entries = grids.iter().map(|g| PolyField::from_grid(g, &rule, deg)).collect::<Result<Vec<_>>>()?;
        if self.f.x_degree() == 0 && is_reflection_even(u) {
            // the projection leaves rounding-level odd coefficients behind
            entries = entries.iter().map(PolyField::even_part).collect();
        }
        CoefficientMatrix::new(self.dim, self.m, entries)
    }

    fn check_field(&self, u: &VectorField) -> Result<()> {
        if u.m() != self.m || u.dim() != self.dim {
            return Err(Error::Mismatch(alloc::format!(
                "field has {} components in {} dimensions, problem has {} in {}",
                u.m(),
                u.dim(),
                self.m,
                self.dim
            )));
        }
        Ok(())
    }

    fn point_values(&self, u: &VectorField, rule: &QuadratureRule) -> (Vec<[f64; 2]>, Vec<Vec<f64>>) {
        let mut xs = Vec::new();
        let _ = GridField::from_fn(rule, self.dim, |x| {
            xs.push([x[0], if x.len() > 1 { x[1] } else { 0.0 }]);
            0.0
        });
        let sub = Subspace::full(self.dim, u.n());
        let tables = TensorTables::new(&sub, rule);
        let comps: Vec<Vec<f64>> = u.comps.iter().map(|c| tables.values(&c.coeffs).values).collect();
        (xs, comps)
    }

    fn jacobian_grids(&self, u: &VectorField, rule: &QuadratureRule) -> Result<Vec<GridField>> {
        let m = self.m;
        let (xs, comps) = self.point_values(u, rule);
        let mut grids = vec![GridField::zeros(self.dim, rule.len()); m * m];
        let mut uv = vec![0.0; m];
        let mut jac = vec![0.0; m * m];
        for (p, x) in xs.iter().enumerate() {
            for a in 0..m {
                uv[a] = comps[a][p];
            }
            self.f.jacobian(&x[..self.dim], &uv, &mut jac);
            for (g, v) in grids.iter_mut().zip(&jac) {
                g.values[p] = *v;
            }
        }
        Ok(grids)
    }
}

/// True if every component is invariant under all reflections `x_d ↦ 1 − x_d`
/// (`ψ_i` is even exactly for odd `i`).
pub fn is_reflection_even(u: &VectorField) -> bool {
    u.comps.iter().all(|c| {
        c.coeffs.iter().enumerate().all(|(k, v)| {
            let (i, j) = if c.dim == 1 { (k + 1, 1) } else { (k / c.n + 1, k % c.n + 1) };
            *v == 0.0 || (i % 2 == 1 && j % 2 == 1)
        })
    })
}

/// `−Δu = 6u − u² + 2uv`, `−Δv = 4v + 4uv − v²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LotkaVolterra;

impl Nonlinearity for LotkaVolterra {
    fn m(&self) -> usize {
        2
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval(&self, _x: &[f64], u: &[f64], out: &mut [f64]) {
        let (a, b) = (u[0], u[1]);
        out[0] = 6.0 * a - a * a + 2.0 * a * b;
        out[1] = 4.0 * b + 4.0 * a * b - b * b;
    }
    fn jacobian(&self, _x: &[f64], u: &[f64], out: &mut [f64]) {
        let (a, b) = (u[0], u[1]);
        out[0] = 6.0 - 2.0 * a + 2.0 * b;
        out[1] = 2.0 * a;
        out[2] = 4.0 * b;
        out[3] = 4.0 + 4.0 * a - 2.0 * b;
    }
}

pub fn lotka_volterra() -> ProblemSpec {
    ProblemSpec { name: String::from("lotka-volterra"), dim: 2, m: 2, f: Arc::new(LotkaVolterra) }
}

/// `f(x, u) = C u + g(x)` with a constant matrix `C` and a polynomial source.
#[derive(Clone, Debug)]
pub struct Affine {
    pub matrix: Vec<f64>,
    pub source: Vec<PolyField>,
}

impl Nonlinearity for Affine {
    fn m(&self) -> usize {
        self.source.len()
    }
    fn degree(&self) -> usize {
        1
    }
    fn x_degree(&self) -> usize {
        self.source.iter().map(|s| s.deg).max().unwrap_or(0)
    }
    fn eval(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        let m = self.m();
        for a in 0..m {
            out[a] = self.source[a].eval(x) + (0..m).map(|b| self.matrix[a * m + b] * u[b]).sum::<f64>();
        }
    }
    fn jacobian(&self, _x: &[f64], _u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matrix);
    }
}

/// Constant `q = c·I`: `f(u) = c u`.
pub fn constant_q(c: f64, dim: usize, m: usize) -> Result<ProblemSpec> {
    let mut matrix = vec![0.0; m * m];
    for a in 0..m {
        matrix[a * m + a] = c;
    }
    let f = Affine { matrix, source: vec![PolyField::zero(dim); m] };
    ProblemSpec::new(alloc::format!("constant-q(c={c}, dim={dim}, m={m})"), dim, Arc::new(f))
}

/// Source `f = −Δu*` for the single-component manufactured solution
/// `u* = ψ₁ ⊗ ψ₁` (or `ψ₁` in 1D); independent of `u`.
pub fn manufactured(dim: usize) -> Result<ProblemSpec> {
    // −Δ(x−x²) = 2, and 2(x−x²) = 1/3 P₀ − 1/3 P₂ in shifted Legendre form
    let source = if dim == 1 {
        PolyField::constant(1, 2.0)
    } else {
        let mut p = PolyField { dim: 2, deg: 2, coeffs: vec![0.0; 9] };
        p.coeffs[0] = 2.0 / 3.0;
        p.coeffs[2] = -1.0 / 3.0;
        p.coeffs[6] = -1.0 / 3.0;
        p
    };
    let f = Affine { matrix: vec![0.0], source: vec![source] };
    ProblemSpec::new("manufactured", dim, Arc::new(f))
}

/// One accepted Newton step.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NewtonStep {
    pub iteration: usize,
    pub residual: f64,
    pub damping: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest step fraction tried before giving up.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 60, min_damping: 1.0 / 1024.0 }
    }
}

/// An approximate Galerkin solution.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApproxSolution {
    pub field: VectorField,
    /// Euclidean norm of the Galerkin residual vector.
    pub residual: f64,
    pub log: Vec<NewtonStep>,
    /// Starting amplitudes, when built from the default family.
    pub start: Option<Vec<f64>>,
}

impl ApproxSolution {
    /// `∫ Σ_a u_a` over the box.
    pub fn interior_mean(&self) -> f64 {
        // ∫ψ_1 = 1/6 and ∫ψ_i = 0 otherwise
        let dim = self.field.dim();
        self.field.comps.iter().map(|c| c.coeffs.first().copied().unwrap_or(0.0)).sum::<f64>() / libm::pow(6.0, dim as f64)
    }
}

struct Galerkin<'a> {
    spec: &'a ProblemSpec,
    gram: GramMatrices,
    tables: TensorTables,
    xs: Vec<[f64; 2]>,
}

impl<'a> Galerkin<'a> {
    fn new(spec: &'a ProblemSpec, sub: &Subspace) -> Result<Self> {
        let gram = GramMatrices::new(sub, spec.m)?;
        let n = sub.n();
        let deg = spec.f.degree().max(1) * (n + 1) + spec.f.x_degree() + n + 1;
        let rule = gauss_rule(points_for_degree(deg) + 2)?;
        let mut xs = Vec::new();
        let _ = GridField::from_fn(&rule, spec.dim, |x| {
            xs.push([x[0], if x.len() > 1 { x[1] } else { 0.0 }]);
            0.0
        });
        let tables = TensorTables::new(sub, &rule);
        Ok(Galerkin { spec, gram, tables, xs })
    }

    fn grid_values(&self, c: &[f64]) -> Vec<GridField> {
        c.chunks(self.gram.scalar_len()).map(|b| self.tables.values(b)).collect()
    }

    fn residual(&self, c: &[f64]) -> Result<Vec<f64>> {
        let m = self.spec.m;
        let ug = self.grid_values(c);
        let mut fg = vec![GridField::zeros(self.spec.dim, self.tables.points()); m];
        let mut uv = vec![0.0; m];
        let mut fv = vec![0.0; m];
        for (p, x) in self.xs.iter().enumerate() {
            for a in 0..m {
                uv[a] = ug[a].values[p];
            }
            self.spec.f.eval(&x[..self.spec.dim], &uv, &mut fv);
            for a in 0..m {
                fg[a].values[p] = fv[a];
            }
        }
        let mut r = self.gram.apply_stiffness(c)?;
        for (a, g) in fg.iter().enumerate() {
            let load = self.tables.load(g);
            let s = self.gram.scalar_len();
            for (ri, li) in r[a * s..(a + 1) * s].iter_mut().zip(load) {
                *ri -= li;
            }
        }
        Ok(r)
    }

    fn jacobian(&self, c: &[f64]) -> Result<Mat> {
        let m = self.spec.m;
        let ug = self.grid_values(c);
        let mut qg = vec![GridField::zeros(self.spec.dim, self.tables.points()); m * m];
        let mut uv = vec![0.0; m];
        let mut jv = vec![0.0; m * m];
        for (p, x) in self.xs.iter().enumerate() {
            for a in 0..m {
                uv[a] = ug[a].values[p];
            }
            self.spec.f.jacobian(&x[..self.spec.dim], &uv, &mut jv);
            for (g, v) in qg.iter_mut().zip(&jv) {
                g.values[p] = *v;
            }
        }
        let mut j = assemble_q_grid(&self.tables, m, &qg)?;
        j.scale(-1.0);
        let d = self.gram.stiffness_full();
        let s = self.gram.scalar_len();
        for a in 0..m {
            for i in 0..s {
                for k in 0..s {
                    j.row_mut(a * s + i)[a * s + k] += d[(i, k)];
                }
            }
        }
        Ok(j)
    }
}

/// Damped Newton on the Galerkin system over `sub`. A step is accepted only
/// if it strictly reduces the residual norm; the step fraction is halved
/// down to `min_damping`.
pub fn newton_solve(spec: &ProblemSpec, sub: &Subspace, init: &[f64], opts: &NewtonOptions) -> Result<ApproxSolution> {
    let g = Galerkin::new(spec, sub)?;
    if init.len() != g.gram.len() {
        return Err(Error::Mismatch(alloc::format!("{} initial coefficients for {} unknowns", init.len(), g.gram.len())));
    }
    let mut c = init.to_vec();
    let mut r = g.residual(&c)?;
    let mut res = norm2(&r);
    let mut log = vec![NewtonStep { iteration: 0, residual: res, damping: 0.0 }];
    let mut it = 0;
    while res >= opts.tol {
        if it == opts.max_iter {
            return Err(Error::NoConvergence(alloc::format!(
                "Newton stopped after {it} iterations at residual {res:.3e}"
            )));
        }
        it += 1;
        let j = g.jacobian(&c)?;
        let step = lu_solve(&j, &r)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = c.iter().zip(&step).map(|(ci, si)| ci - t * si).collect();
            let rt = g.residual(&trial)?;
            let nt = norm2(&rt);
            if nt < res {
                debug_assert!(nt < res);
                c = trial;
                r = rt;
                res = nt;
                log.push(NewtonStep { iteration: it, residual: res, damping: t });
                break;
            }
            t *= 0.5;
            if t < opts.min_damping {
                if res < 1e3 * opts.tol {
                    // stagnated at rounding level
                    return finish(sub, spec, c, res, log);
                }
                return Err(Error::NoConvergence(alloc::format!(
                    "no damped step reduces the residual {res:.3e} at iteration {it}"
                )));
            }
        }
    }
    finish(sub, spec, c, res, log)
}

fn finish(sub: &Subspace, spec: &ProblemSpec, c: Vec<f64>, residual: f64, log: Vec<NewtonStep>) -> Result<ApproxSolution> {
    Ok(ApproxSolution { field: sub.embed(&c, spec.m)?, residual, log, start: None })
}

/// The default start `α_a · 16 ψ₁(x)ψ₁(y)` on `sub`.
pub fn default_start(sub: &Subspace, m: usize, amplitudes: &[f64]) -> Result<Vec<f64>> {
    if amplitudes.len() != m {
        return Err(invalid("one amplitude per component required"));
    }
    let scale = if sub.dim() == 1 { 4.0 } else { 16.0 };
    let mut field = VectorField::zeros(sub.dim(), m, sub.n());
    for (comp, a) in field.comps.iter_mut().zip(amplitudes) {
        comp.coeffs[0] = a * scale;
    }
    sub.restrict(&field)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiStartOptions {
    pub amplitudes: Vec<f64>,
    /// Degree of the coarse screening solve.
    pub n_coarse: usize,
    /// Restrict to fields even under every reflection `x_d ↦ 1 − x_d`.
    pub symmetric: bool,
    pub newton: NewtonOptions,
}

impl Default for MultiStartOptions {
    fn default() -> Self {
        MultiStartOptions {
            amplitudes: vec![-12.0, -6.0, -2.0, 2.0, 6.0, 12.0],
            n_coarse: 12,
            symmetric: true,
            newton: NewtonOptions::default(),
        }
    }
}

/// Outcome of one start.
#[derive(Clone, Debug)]
pub struct StartOutcome {
    pub amplitudes: Vec<f64>,
    pub result: Result<ApproxSolution>,
}

fn solve_space(dim: usize, n: usize, symmetric: bool) -> Subspace {
    if symmetric {
        Subspace::parity_blocks(dim, n).swap_remove(0)
    } else {
        Subspace::full(dim, n)
    }
}

/// All amplitude combinations, first component varying slowest.
pub fn start_grid(m: usize, amplitudes: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| {
                amplitudes.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Coarse solve from one start.
pub fn run_start(spec: &ProblemSpec, amplitudes: &[f64], opts: &MultiStartOptions) -> StartOutcome {
    let sub = solve_space(spec.dim, opts.n_coarse, opts.symmetric);
    let result = default_start(&sub, spec.m, amplitudes).and_then(|c| newton_solve(spec, &sub, &c, &opts.newton));
    StartOutcome { amplitudes: amplitudes.to_vec(), result }
}

/// Among converged outcomes, the largest interior mean; converged residuals
/// count as tied. Earlier starts win exact ties.
pub fn select_start(outcomes: &[StartOutcome]) -> Option<&StartOutcome> {
    let mut best: Option<(&StartOutcome, f64)> = None;
    for o in outcomes {
        if let Ok(s) = &o.result {
            let mean = s.interior_mean();
            if best.map_or(true, |(_, b)| mean > b) {
                best = Some((o, mean));
            }
        }
    }
    best.map(|(o, _)| o)
}

/// Refines a coarse solution at degree `n_solve`.
pub fn refine(spec: &ProblemSpec, coarse: &ApproxSolution, n_solve: usize, opts: &MultiStartOptions) -> Result<ApproxSolution> {
    let sub = solve_space(spec.dim, n_solve, opts.symmetric);
    let init = sub.restrict(&coarse.field.resized(n_solve))?;
    let mut sol = newton_solve(spec, &sub, &init, &opts.newton)?;
    sol.start = coarse.start.clone();
    Ok(sol)
}

/// Multi-start Newton: every start solved at the coarse degree, the
/// selected one refined at `n_solve`. Starts run sequentially; see
/// [`run_start`] and [`select_start`] for a parallel driver.
pub fn multi_start(spec: &ProblemSpec, n_solve: usize, opts: &MultiStartOptions) -> Result<ApproxSolution> {
    let outcomes: Vec<StartOutcome> =
        start_grid(spec.m, &opts.amplitudes).iter().map(|a| run_start(spec, a, opts)).collect();
    finish_multi_start(spec, n_solve, opts, &outcomes)
}

/// Selection and refinement after the starts have run.
pub fn finish_multi_start(
    spec: &ProblemSpec,
    n_solve: usize,
    opts: &MultiStartOptions,
    outcomes: &[StartOutcome],
) -> Result<ApproxSolution> {
    let best = select_start(outcomes).ok_or_else(|| Error::NoConvergence(String::from("no start converged")))?;
    let mut coarse = best.result.clone()?;
    coarse.start = Some(best.amplitudes.clone());
    refine(spec, &coarse, n_solve, opts)
}

/// Relative defect between `q(û)·h` and the central difference
/// `(f(û + εh) − f(û − εh))/(2ε)` at the points of `rule`.
pub fn derivative_defect(spec: &ProblemSpec, u: &VectorField, h: &VectorField, eps: f64, rule: &QuadratureRule) -> Result<f64> {
    spec.check_field(u)?;
    spec.check_field(h)?;
    let m = spec.m;
    let (xs, uc) = spec.point_values(u, rule);
    let (_, hc) = spec.point_values(h, rule);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let (mut up, mut um, mut fp, mut fm) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut jac = vec![0.0; m * m];
    let mut uv = vec![0.0; m];
    for (p, x) in xs.iter().enumerate() {
        let x = &x[..spec.dim];
        for a in 0..m {
            uv[a] = uc[a][p];
            up[a] = uc[a][p] + eps * hc[a][p];
            um[a] = uc[a][p] - eps * hc[a][p];
        }
        spec.f.eval(x, &up, &mut fp);
        spec.f.eval(x, &um, &mut fm);
        spec.f.jacobian(x, &uv, &mut jac);
        for a in 0..m {
            let lin: f64 = (0..m).map(|b| jac[a * m + b] * hc[b][p]).sum();
            let fd = (fp[a] - fm[a]) / (2.0 * eps);
            worst = worst.max((lin - fd).abs());
            scale = scale.max(lin.abs());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// A problem as handed to the certification pipeline.
#[derive(Clone, Debug)]
pub enum Problem {
    /// Fixed polynomial coefficients.
    Coefficients { name: String, q: CoefficientMatrix },
    /// Linearization at a Newton solution found by multi-start.
    Nonlinear { spec: ProblemSpec, start: MultiStartOptions },
    /// Linearization at a given solution.
    Pinned { spec: ProblemSpec, solution: Box<ApproxSolution> },
}

impl Problem {
    pub fn constant(c: f64, dim: usize, m: usize) -> Self {
        Problem::Coefficients {
            name: alloc::format!("constant-q(c={c}, dim={dim}, m={m})"),
            q: CoefficientMatrix::scalar_identity(dim, m, c),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Problem::Coefficients { name, .. } => name,
            Problem::Nonlinear { spec, .. } | Problem::Pinned { spec, .. } => &spec.name,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lotka_volterra_jacobian_at_constants() {
        let spec = lotka_volterra();
        let mut j = [0.0; 4];
        spec.f.jacobian(&[0.3, 0.4], &[0.0, 0.0], &mut j);
        assert_eq!(j, [6.0, 0.0, 0.0, 4.0]);
        spec.f.jacobian(&[0.3, 0.4], &[1.0, 0.0], &mut j);
        assert_eq!(j, [4.0, 2.0, 0.0, 8.0]);
    }

    #[test]
    fn manufactured_solution_is_recovered() {
        for dim in [1, 2] {
            let spec = manufactured(dim).unwrap();
            let sub = Subspace::full(dim, 6);
            let sol = newton_solve(&spec, &sub, &vec![0.0; sub.scalar_len()], &NewtonOptions::default()).unwrap();
            for (k, c) in sol.field.comps[0].coeffs.iter().enumerate() {
                let want = if k == 0 { 1.0 } else { 0.0 };
                assert!((c - want).abs() < 1e-10, "dim {dim} coefficient {k}: {c}");
            }
            assert!(sol.log.len() <= 3);
        }
    }

    #[test]
    fn start_grid_enumerates_all_pairs() {
        let g = start_grid(2, &[1.0, 2.0, 3.0]);
        assert_eq!(g.len(), 9);
        assert_eq!(g[1], vec![1.0, 2.0]);
    }
}
