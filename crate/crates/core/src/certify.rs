//! The certification pipeline: constants, sup norms, assembly, discrete
//! eigenvalues, Liu bounds, gap search, Lehmann refinement and the final
//! inverse-norm bound, all recorded in a [`Certificate`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::assembly::{assemble_pencil, CoefficientMatrix, GramMatrices};
use crate::eig::{gen_eig_smallest, EigenPair};
use crate::error::{invalid, Error, Result};
use crate::liu::{
    ch_heuristic, ch_table, cms, find_gap, lower_upper_bounds, poincare_constant, ChSource, EigBounds,
    GapCertificate, LiuConstants,
};
use crate::problems::{multi_start, ApproxSolution, NewtonStep, Problem};
use crate::rigor::{sup_operator_norm, Interval, NormTarget, SupNormBound, SupNormOptions};
use crate::spectral::{gauss_rule, points_for_degree, Subspace};
use crate::tlg::{lehmann_bounds, lehmann_matrices, RefinedBound, Trial};

pub use crate::liu::inverse_norm_bound as inverse_norm_bound_raw;

/// How `C_h` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "mode", content = "value"))]
pub enum ChMode {
    /// Table value, heuristic formula when `N` is not tabulated.
    #[default]
    Auto,
    Table,
    Heuristic,
    User(f64),
}

/// `C_h` for degree `n` and its provenance.
pub fn ritz_error_constant(n: usize, mode: ChMode) -> Result<(Interval, ChSource)> {
    match mode {
        ChMode::Table => Ok((ch_table(n)?, ChSource::Table)),
        ChMode::Heuristic => Ok((ch_heuristic(n), ChSource::Heuristic)),
        ChMode::Auto => match ch_table(n) {
            Ok(c) => Ok((c, ChSource::Table)),
            Err(_) => Ok((ch_heuristic(n), ChSource::Heuristic)),
        },
        ChMode::User(v) => {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid("C_h must be positive"));
            }
            Ok((Interval::enclose(v), ChSource::User))
        }
    }
}

/// `σ = ‖Q + Q*‖ + margin`, strictly above the norm's upper end.
pub fn select_sigma(norm_qqstar: Interval, margin: f64) -> Result<Interval> {
    if !(margin > 0.0) || !norm_qqstar.hi.is_finite() {
        return Err(invalid("σ margin must be positive and the norm finite"));
    }
    let mut s = norm_qqstar.hi + margin;
    while s <= norm_qqstar.hi {
        s = libm::nextafter(s, f64::INFINITY);
    }
    Ok(Interval::point(s))
}

/// `1/√λ` rounded outward, or `None` when `λ.lo ≤ 0`.
pub fn inverse_norm_bound(lambda_lower: Interval) -> Option<Interval> {
    crate::liu::inverse_norm_bound(lambda_lower).ok()
}

/// Replacement norm values. Each is accepted only if it is not below the
/// computed bound.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormOverrides {
    pub norm_q: Option<f64>,
    pub norm_qqstar: Option<f64>,
    pub norm_shift: Option<f64>,
}

impl NormOverrides {
    fn any(&self) -> bool {
        self.norm_q.is_some() || self.norm_qqstar.is_some() || self.norm_shift.is_some()
    }
}

/// Separation parameter for the Lehmann pencil.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RhoChoice {
    /// `ν`, the upper bound of `λ^{(j−1)}`. The Ritz vector behind `ν` then
    /// makes `M2 − 2ρM1 + ρ²M0` nearly singular.
    Nu,
    /// The lower bound of `λ^{(j)}`.
    #[default]
    GapTop,
    /// A fixed value, which must lie in `[ν, lower(j)]`.
    Value(f64),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertifyOptions {
    /// Number of discrete eigenvalues computed.
    pub k: usize,
    pub ch: ChMode,
    pub sigma_margin: f64,
    pub overrides: NormOverrides,
    pub supnorm: SupNormOptions,
    pub rho: RhoChoice,
    pub refine: bool,
    /// Split the space by reflection parity when `q` allows it.
    pub parity: bool,
    /// Points per axis for assembling `Q`; chosen from the degrees if absent.
    pub quad_points: Option<usize>,
    /// Test hook: relative perturbation of the stiffness matrix diagonal.
    pub gram_fault: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            k: 10,
            ch: ChMode::Auto,
            sigma_margin: 1e-4,
            overrides: NormOverrides::default(),
            supnorm: SupNormOptions::default(),
            rho: RhoChoice::GapTop,
            refine: true,
            parity: true,
            quad_points: None,
            gram_fault: None,
        }
    }
}

/// Receives stage notifications; supplies wall-clock time if available.
pub trait Observer {
    fn now(&self) -> Option<f64> {
        None
    }
    fn stage(&mut self, _name: &str) {}
}

/// An observer that does nothing.
pub struct Silent;

impl Observer for Silent {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RigorLevel {
    #[cfg_attr(feature = "serde", serde(rename = "interval+residual"))]
    IntervalResidual,
    #[cfg_attr(feature = "serde", serde(rename = "float-only"))]
    FloatOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum NormSource {
    Computed,
    User,
}

/// A norm constant with its provenance and the computed bound it rests on.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormConstant {
    pub value: Interval,
    pub source: NormSource,
    pub computed: SupNormBound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constants {
    pub c_p: Interval,
    pub c_h: Interval,
    pub c_h_source: ChSource,
    pub sigma: Interval,
    pub sigma_margin: f64,
    pub norm_q: NormConstant,
    #[cfg_attr(feature = "serde", serde(rename = "norm_QQstar"))]
    pub norm_qqstar: NormConstant,
    pub norm_shift: NormConstant,
    /// `C_{M_σ}`.
    pub c_ms: Interval,
}

impl Constants {
    pub fn liu(&self) -> LiuConstants {
        LiuConstants {
            c_p: self.c_p,
            c_h: self.c_h,
            sigma: self.sigma,
            norm_q: self.norm_q.value,
            norm_shift: self.norm_shift.value,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProblemDescriptor {
    pub name: String,
    pub dim: usize,
    pub m: usize,
    pub q_degree: usize,
    /// SHA-256 of the coefficient data.
    pub hash: String,
}

impl ProblemDescriptor {
    pub fn new(name: &str, q: &CoefficientMatrix) -> Self {
        ProblemDescriptor {
            name: String::from(name),
            dim: q.dim,
            m: q.m,
            q_degree: q.degree(),
            hash: coefficient_hash(q),
        }
    }
}

/// SHA-256 over the dimensions and the little-endian coefficient bits.
pub fn coefficient_hash(q: &CoefficientMatrix) -> String {
    let mut h = Sha256::new();
    h.update((q.dim as u64).to_le_bytes());
    h.update((q.m as u64).to_le_bytes());
    for e in &q.entries {
        h.update((e.deg as u64).to_le_bytes());
        for c in &e.coeffs {
            h.update(c.to_bits().to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// One discrete eigenvalue.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenSummary {
    pub value: f64,
    pub enclosure: Interval,
    pub residual: f64,
    /// Parity block label, `"full"` without splitting.
    pub block: String,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "kebab-case"))]
pub enum GapOutcome {
    Found(GapCertificate),
    NotFound,
}

impl GapOutcome {
    pub fn found(&self) -> Option<&GapCertificate> {
        match self {
            GapOutcome::Found(g) => Some(g),
            GapOutcome::NotFound => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LowerSource {
    Liu,
    Lehmann,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolutionSummary {
    pub n_solve: usize,
    pub residual: f64,
    pub log: Vec<NewtonStep>,
    pub start: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub problem: ProblemDescriptor,
    pub n_cert: usize,
    pub solution: Option<SolutionSummary>,
    pub constants: Constants,
    pub spectrum: Vec<EigenSummary>,
    pub bounds: EigBounds,
    pub gap: GapOutcome,
    pub refined: Option<RefinedBound>,
    pub refinement_error: Option<String>,
    pub lambda_lower: Interval,
    pub lambda_lower_source: LowerSource,
    pub inv_norm_upper: Option<Interval>,
    pub rigor_level: RigorLevel,
    /// Unproven inputs the result depends on.
    pub assumptions: Vec<String>,
    /// Largest relative asymmetry of an assembled pencil matrix.
    pub symmetry_defect: f64,
    pub timings: Vec<Timing>,
}

impl Certificate {
    /// The record with wall-clock timings removed.
    pub fn without_timings(&self) -> Certificate {
        Certificate { timings: Vec::new(), ..self.clone() }
    }

    /// `C_{M_σ}` as reported.
    pub fn c_ms(&self) -> Interval {
        self.constants.c_ms
    }

    /// `λ_h^{(1)}` enclosure.
    pub fn lambda_h1(&self) -> Option<Interval> {
        self.spectrum.first().map(|e| e.enclosure)
    }
}

struct Clock<'a> {
    obs: &'a mut dyn Observer,
    last: Option<f64>,
    timings: Vec<Timing>,
}

impl<'a> Clock<'a> {
    fn new(obs: &'a mut dyn Observer) -> Self {
        let last = obs.now();
        Clock { obs, last, timings: Vec::new() }
    }

    fn begin(&mut self, stage: &str) {
        self.obs.stage(stage);
    }

    fn end(&mut self, stage: &str) {
        if let (Some(t0), Some(t1)) = (self.last, self.obs.now()) {
            self.timings.push(Timing { stage: String::from(stage), seconds: t1 - t0 });
            self.last = Some(t1);
        }
    }
}

/// Solves a nonlinear problem if needed and returns the coefficients to
/// certify.
pub fn linearize(problem: &Problem, n_solve: usize) -> Result<(String, CoefficientMatrix, Option<ApproxSolution>)> {
    match problem {
        Problem::Coefficients { name, q } => Ok((name.clone(), q.clone(), None)),
        Problem::Nonlinear { spec, start } => {
            let sol = multi_start(spec, n_solve, start).map_err(|e| e.in_stage("solve"))?;
            let q = spec.jacobian_coefficients(&sol.field).map_err(|e| e.in_stage("solve"))?;
            Ok((spec.name.clone(), q, Some(sol)))
        }
        Problem::Pinned { spec, solution } => {
            let q = spec.jacobian_coefficients(&solution.field).map_err(|e| e.in_stage("solve"))?;
            Ok((spec.name.clone(), q, Some((**solution).clone())))
        }
    }
}

/// Full pipeline for `problem`.
pub fn run_pipeline(
    problem: &Problem,
    n_solve: usize,
    n_cert: usize,
    opts: &CertifyOptions,
    obs: &mut dyn Observer,
) -> Result<Certificate> {
    obs.stage("solve");
    let t0 = obs.now();
    let (name, q, sol) = linearize(problem, n_solve)?;
    let t1 = obs.now();
    let mut cert = certify_coefficients(&name, &q, n_cert, opts, obs)?;
    if let Some(s) = sol {
        cert.solution = Some(SolutionSummary { n_solve, residual: s.residual, log: s.log, start: s.start });
        if let (Some(a), Some(b)) = (t0, t1) {
            cert.timings.insert(0, Timing { stage: String::from("solve"), seconds: b - a });
        }
    }
    Ok(cert)
}

fn norm_constant(
    q: &CoefficientMatrix,
    target: NormTarget,
    user: Option<f64>,
    opts: &SupNormOptions,
    label: &str,
) -> Result<NormConstant> {
    let computed = sup_operator_norm(q, target, opts)?;
    match user {
        None => Ok(NormConstant { value: Interval::point(computed.upper), source: NormSource::Computed, computed }),
        Some(v) => {
            let value = Interval::enclose(v);
            if value.lo < computed.upper {
                return Err(invalid(format!(
                    "user value {v} for {label} is below the computed bound {}",
                    computed.upper
                )));
            }
            Ok(NormConstant { value, source: NormSource::User, computed })
        }
    }
}

/// Sup-norm constants and `σ`.
pub fn compute_constants(q: &CoefficientMatrix, n_cert: usize, opts: &CertifyOptions) -> Result<Constants> {
    let c_p = poincare_constant(q.dim);
    let (c_h, c_h_source) = ritz_error_constant(n_cert, opts.ch)?;
    let ov = &opts.overrides;
    let norm_q = norm_constant(q, NormTarget::Plain, ov.norm_q, &opts.supnorm, "‖Q‖")?;
    let norm_qqstar = norm_constant(q, NormTarget::Symmetrized, ov.norm_qqstar, &opts.supnorm, "‖Q+Q*‖")?;
    let sigma = select_sigma(norm_qqstar.value, opts.sigma_margin)?;
    let norm_shift = norm_constant(q, NormTarget::Shifted(sigma.hi), ov.norm_shift, &opts.supnorm, "‖σ−(Q+Q*)‖")?;
    Ok(Constants {
        c_p,
        c_h,
        c_h_source,
        sigma,
        sigma_margin: opts.sigma_margin,
        norm_q,
        norm_qqstar,
        norm_shift,
        c_ms: Interval::ZERO,
    })
}

/// Gram matrices on `sub`, with the stiffness diagonal scaled by `1 + ε`
/// when a fault is requested.
pub fn gram_with_fault(sub: &Subspace, m: usize, fault: Option<f64>) -> Result<GramMatrices> {
    let gram = GramMatrices::new(sub, m)?;
    match fault {
        None => Ok(gram),
        Some(eps) => {
            let mut d = gram.stiffness.clone();
            for i in 0..d.rows() {
                let v = d[(i, i)];
                d.row_mut(i)[i] = v * (1.0 + eps);
            }
            gram.with_stiffness(d)
        }
    }
}

struct Block {
    gram: GramMatrices,
    pairs: Vec<EigenPair>,
}

/// Pipeline from fixed coefficients.
pub fn certify_coefficients(
    name: &str,
    q: &CoefficientMatrix,
    n_cert: usize,
    opts: &CertifyOptions,
    obs: &mut dyn Observer,
) -> Result<Certificate> {
    if opts.k < 2 {
        return Err(invalid("at least two eigenvalues are needed for a gap search"));
    }
    let mut clock = Clock::new(obs);

    clock.begin("constants");
    let mut constants = compute_constants(q, n_cert, opts).map_err(|e| e.in_stage("constants"))?;
    clock.end("constants");

    clock.begin("assembly");
    let subspaces = if opts.parity && q.is_reflection_even() {
        Subspace::parity_blocks(q.dim, n_cert)
    } else {
        alloc::vec![Subspace::full(q.dim, n_cert)]
    };
    let rule = match opts.quad_points {
        Some(p) => Some(gauss_rule(p).map_err(|e| e.in_stage("assembly"))?),
        None => None,
    };
    let mut blocks = Vec::with_capacity(subspaces.len());
    let mut symmetry_defect: f64 = 0.0;
    for sub in &subspaces {
        let mut build = || -> Result<Block> {
            let gram = gram_with_fault(sub, q.m, opts.gram_fault)?;
            let pencil = assemble_pencil(&gram, q, rule.as_ref(), None)?;
            symmetry_defect = symmetry_defect.max(pencil.symmetry_defect);
            let k = opts.k.min(gram.len());
            let slice = gen_eig_smallest(&pencil.lhs, gram.mass_factor(), k).map_err(|e| e.in_stage("eigen"))?;
            Ok(Block { gram, pairs: slice.pairs })
        };
        blocks.push(build().map_err(|e| if e.stage().is_some() { e } else { e.in_stage("assembly") })?);
    }
    clock.end("assembly+eigen");

    // merged ascending list of (block, pair index)
    let mut order: Vec<(usize, usize)> =
        blocks.iter().enumerate().flat_map(|(b, blk)| (0..blk.pairs.len()).map(move |i| (b, i))).collect();
    order.sort_by(|x, y| {
        let (a, b) = (&blocks[x.0].pairs[x.1], &blocks[y.0].pairs[y.1]);
        a.value.total_cmp(&b.value).then(x.cmp(y))
    });
    order.truncate(opts.k);
    let label = |b: usize| -> String {
        if blocks.len() == 1 {
            String::from("full")
        } else {
            String::from(blocks[b].gram.subspace.label())
        }
    };
    let spectrum: Vec<EigenSummary> = order
        .iter()
        .map(|&(b, i)| {
            let p = &blocks[b].pairs[i];
            EigenSummary { value: p.value, enclosure: p.enclosure, residual: p.residual, block: label(b) }
        })
        .collect();

    clock.begin("bounds");
    let enclosures: Vec<Interval> = spectrum.iter().map(|s| s.enclosure).collect();
    let liu_c = constants.liu();
    let c_ms = cms(&liu_c, enclosures[0]).map_err(|e| e.in_stage("bounds"))?;
    constants.c_ms = c_ms;
    let bounds = lower_upper_bounds(&enclosures, &liu_c, c_ms).map_err(|e| e.in_stage("bounds"))?;
    let gap = match find_gap(&bounds) {
        Some(g) => GapOutcome::Found(g),
        None => GapOutcome::NotFound,
    };
    clock.end("bounds");

    let mut refined = None;
    let mut refinement_error = None;
    if let (true, GapOutcome::Found(g)) = (opts.refine, &gap) {
        clock.begin("refinement");
        let rho = match opts.rho {
            RhoChoice::Nu => Interval::point(g.nu.hi),
            RhoChoice::GapTop => Interval::point(g.lower_j.lo),
            RhoChoice::Value(v) => Interval::point(v),
        };
        let ntrial = (g.j + 2).min(order.len());
        let trials: Vec<Trial<'_>> = order[..ntrial]
            .iter()
            .map(|&(b, i)| Trial { gram: &blocks[b].gram, coeffs: &blocks[b].pairs[i].vector })
            .collect();
        let outcome = if rho.lo < g.nu.hi || rho.hi > g.lower_j.lo {
            Err(Error::Refinement(format!("ρ = {} is outside the verified gap [{}, {}]", rho.lo, g.nu.hi, g.lower_j.lo)))
        } else {
            refine(&trials, q, rho, g.j, n_cert, enclosures[0])
        };
        match outcome {
            Ok(r) => refined = Some(r),
            Err(e) => refinement_error = Some(e.in_stage("refinement").to_string()),
        }
        clock.end("refinement");
    }

    let liu_lower = bounds.lower[0];
    let (lambda_lower, lambda_lower_source) = match &refined {
        Some(r) if r.lambda1_lower.lo > liu_lower.lo => (r.lambda1_lower, LowerSource::Lehmann),
        _ => (liu_lower, LowerSource::Liu),
    };
    let inv_norm_upper = inverse_norm_bound(lambda_lower);

    let mut assumptions = Vec::new();
    let mut rigor_level = RigorLevel::IntervalResidual;
    match constants.c_h_source {
        ChSource::Table => assumptions.push(String::from("C_h taken from the published table")),
        ChSource::Heuristic => {
            assumptions.push(String::from("C_h from the unproven heuristic formula"));
            rigor_level = RigorLevel::FloatOnly;
        }
        ChSource::User => assumptions.push(String::from("C_h supplied by the user")),
    }
    if opts.overrides.any() {
        assumptions.push(String::from("norm constants replaced by user values (checked against computed bounds)"));
    }
    if opts.gram_fault.is_some() {
        rigor_level = RigorLevel::FloatOnly;
        assumptions.push(String::from("stiffness matrix deliberately perturbed"));
    }

    Ok(Certificate {
        problem: ProblemDescriptor::new(name, q),
        n_cert,
        solution: None,
        constants,
        spectrum,
        bounds,
        gap,
        refined,
        refinement_error,
        lambda_lower,
        lambda_lower_source,
        inv_norm_upper,
        rigor_level,
        assumptions,
        symmetry_defect,
        timings: clock.timings,
    })
}

/// Lehmann refinement on the given trials, with the per-run consistency
/// checks: the first `j − 1` trials lie strictly below `ρ`, and the bound
/// does not exceed any Rayleigh quotient.
pub fn refine(
    trials: &[Trial<'_>],
    q: &CoefficientMatrix,
    rho: Interval,
    j: usize,
    n_cert: usize,
    lambda_h1: Interval,
) -> Result<RefinedBound> {
    let rule = gauss_rule(points_for_degree(2 * (q.degree() + n_cert + 1)))?;
    let mats = lehmann_matrices(trials, q, 0.0, &rule)?;
    let rq = mats.rayleigh_quotients();
    if let Some((i, r)) = rq.iter().take(j - 1).enumerate().find(|(_, r)| r.hi >= rho.lo) {
        return Err(Error::Refinement(format!(
            "trial {} has Rayleigh quotient {} not below ρ = {}",
            i + 1,
            r.hi,
            rho.lo
        )));
    }
    let b = lehmann_bounds(&mats, rho, j)?;
    if let Some(r) = rq.iter().find(|r| b.lambda1_lower.lo > r.hi) {
        return Err(Error::Refinement(format!("bound {} exceeds a trial Rayleigh quotient {}", b.lambda1_lower.lo, r.hi)));
    }
    if b.lambda1_lower.hi > lambda_h1.hi {
        return Err(Error::Refinement(format!("bound {} exceeds λ_h1 {}", b.lambda1_lower.hi, lambda_h1.hi)));
    }
    Ok(b)
}

/// Exact `‖L⁻¹‖_{B(X,V)} = max_k √μ_k/|μ_k − c|` for `Q = cI` over the
/// Dirichlet eigenvalues `μ = π²|k|²` of the unit box, or `None` if `c` is
/// an eigenvalue.
pub fn constant_q_exact_norm(c: f64, dim: usize) -> Option<f64> {
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    let kmax = 200usize;
    let mut best: f64 = 0.0;
    for k1 in 1..=kmax {
        let k2s: &mut dyn Iterator<Item = usize> = if dim == 1 { &mut (0..1) } else { &mut (1..=kmax) };
        for k2 in k2s {
            let mu = pi2 * (k1 * k1 + k2 * k2) as f64;
            if mu == c {
                return None;
            }
            best = best.max(libm::sqrt(mu) / (mu - c).abs());
        }
    }
    Some(best)
}
