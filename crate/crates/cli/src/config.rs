//! Run configuration, read from a TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use invnorm_core::certify::{CertifyOptions, ChMode, NormOverrides, RhoChoice};
use invnorm_core::problems::{MultiStartOptions, NewtonOptions};
use invnorm_core::rigor::SupNormOptions;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// The two-species competition system; solved by multi-start Newton
    /// unless `solution` names a solution file.
    LotkaVolterra {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        solution: Option<PathBuf>,
    },
    /// `q = c·I` with `m` components on the `dim`-dimensional unit box.
    ConstantQ {
        c: f64,
        dim: usize,
        #[serde(default = "one")]
        m: usize,
    },
    /// Coefficient matrix read from JSON (shifted Legendre coefficients).
    Custom { coefficients: PathBuf },
}

fn one() -> usize {
    1
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig::LotkaVolterra { solution: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Discretization {
    pub n_solve: usize,
    pub n_cert: usize,
    /// Number of discrete eigenvalues.
    pub k: usize,
    /// Points per axis for assembling `Q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    pub parity: bool,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { n_solve: 40, n_cert: 60, k: 10, quad_points: None, parity: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChSetting {
    Auto,
    Table,
    Heuristic,
    User,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub sigma_margin: f64,
    pub c_h: ChSetting,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_h_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_qqstar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_shift: Option<f64>,
    pub supnorm_tol: f64,
    pub supnorm_max_depth: usize,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let s = SupNormOptions::default();
        ConstantsConfig {
            sigma_margin: 1e-4,
            c_h: ChSetting::Auto,
            c_h_value: None,
            norm_q: None,
            norm_qqstar: None,
            norm_shift: None,
            supnorm_tol: s.tol,
            supnorm_max_depth: s.max_depth,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoSetting {
    GapTop,
    Nu,
    Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefinementConfig {
    pub enabled: bool,
    pub rho: RhoSetting,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_value: Option<f64>,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig { enabled: true, rho: RhoSetting::GapTop, rho_value: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub amplitudes: Vec<f64>,
    pub n_coarse: usize,
    pub symmetric: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub min_damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let m = MultiStartOptions::default();
        SolverConfig {
            amplitudes: m.amplitudes,
            n_coarse: m.n_coarse,
            symmetric: m.symmetric,
            tol: m.newton.tol,
            max_iter: m.newton.max_iter,
            min_damping: m.newton.min_damping,
        }
    }
}

/// `strict` refuses to run with an unproven `C_h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigorMode {
    Permissive,
    Strict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub threads: usize,
    /// Seeds the random directions of the derivative check.
    pub seed: u64,
    pub rigor: RigorMode,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { threads: 1, seed: 0, rigor: RigorMode::Permissive }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<PathBuf>,
    /// gnuplot grid of the solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    pub grid_points: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { certificate: None, solution: None, grid: None, grid_points: 65 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableConfig {
    /// Degrees certified by `table --config`.
    pub n_cert: Vec<usize>,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig { n_cert: vec![60, 80, 100] }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub problem: ProblemConfig,
    pub discretization: Discretization,
    pub constants: ConstantsConfig,
    pub refinement: RefinementConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub table: TableConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative paths inside are taken relative to its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(dir) = path.parent() {
            cfg.rebase(dir);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        match &mut self.problem {
            ProblemConfig::LotkaVolterra { solution: Some(p) } => fix(p),
            ProblemConfig::Custom { coefficients } => fix(coefficients),
            _ => {}
        }
        for p in [&mut self.output.certificate, &mut self.output.solution, &mut self.output.grid].into_iter().flatten() {
            fix(p);
        }
    }

    pub fn dump_defaults() -> String {
        toml::to_string(&RunConfig::default()).expect("defaults serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.discretization;
        if d.n_cert == 0 || d.n_solve == 0 {
            bail!("n_cert and n_solve must be positive");
        }
        if d.k < 2 {
            bail!("k must be at least 2");
        }
        if let ProblemConfig::ConstantQ { c, dim, m } = &self.problem {
            if !c.is_finite() || !(1..=2).contains(dim) || *m == 0 {
                bail!("constant-q needs finite c, dim 1 or 2 and m ≥ 1");
            }
        }
        let c = &self.constants;
        if !(c.sigma_margin > 0.0) {
            bail!("sigma_margin must be positive");
        }
        match (c.c_h, c.c_h_value) {
            (ChSetting::User, None) => bail!("c_h = \"user\" requires c_h_value"),
            (ChSetting::User, Some(v)) if !(v > 0.0) => bail!("c_h_value must be positive"),
            (ChSetting::User, Some(_)) => {}
            (_, Some(_)) => bail!("c_h_value is only used with c_h = \"user\""),
            _ => {}
        }
        if self.run.rigor == RigorMode::Strict && c.c_h == ChSetting::Heuristic {
            bail!("strict rigor mode does not accept the heuristic C_h");
        }
        let r = &self.refinement;
        match (r.rho, r.rho_value) {
            (RhoSetting::Value, None) => bail!("rho = \"value\" requires rho_value"),
            (RhoSetting::Value, Some(_)) => {}
            (_, Some(_)) => bail!("rho_value is only used with rho = \"value\""),
            _ => {}
        }
        if self.run.threads == 0 {
            bail!("threads must be at least 1");
        }
        if self.solver.amplitudes.is_empty() {
            bail!("at least one start amplitude is required");
        }
        Ok(())
    }

    pub fn certify_options(&self) -> CertifyOptions {
        let c = &self.constants;
        let ch = match c.c_h {
            ChSetting::Auto => ChMode::Auto,
            ChSetting::Table => ChMode::Table,
            ChSetting::Heuristic => ChMode::Heuristic,
            ChSetting::User => ChMode::User(c.c_h_value.unwrap_or(f64::NAN)),
        };
        let rho = match self.refinement.rho {
            RhoSetting::GapTop => RhoChoice::GapTop,
            RhoSetting::Nu => RhoChoice::Nu,
            RhoSetting::Value => RhoChoice::Value(self.refinement.rho_value.unwrap_or(f64::NAN)),
        };
        CertifyOptions {
            k: self.discretization.k,
            ch,
            sigma_margin: c.sigma_margin,
            overrides: NormOverrides { norm_q: c.norm_q, norm_qqstar: c.norm_qqstar, norm_shift: c.norm_shift },
            supnorm: SupNormOptions { tol: c.supnorm_tol, max_depth: c.supnorm_max_depth, ..SupNormOptions::default() },
            rho,
            refine: self.refinement.enabled,
            parity: self.discretization.parity,
            quad_points: self.discretization.quad_points,
            gram_fault: None,
        }
    }

    pub fn multi_start_options(&self) -> MultiStartOptions {
        let s = &self.solver;
        MultiStartOptions {
            amplitudes: s.amplitudes.clone(),
            n_coarse: s.n_coarse,
            symmetric: s.symmetric,
            newton: NewtonOptions { tol: s.tol, max_iter: s.max_iter, min_damping: s.min_damping },
        }
    }
}
