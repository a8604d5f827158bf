//! The `certify` driver.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use invnorm_core::assembly::CoefficientMatrix;
use invnorm_core::certify::{run_pipeline, Certificate, Observer, Timing};
use invnorm_core::problems::{
    derivative_defect, finish_multi_start, lotka_volterra, run_start, start_grid, ApproxSolution, MultiStartOptions,
    Problem, ProblemSpec, StartOutcome,
};
use invnorm_core::spectral::{gauss_rule, VectorField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::{ProblemConfig, RunConfig};
use crate::files;

/// Wall clock and optional progress lines on stderr.
pub struct Progress {
    start: Instant,
    verbose: bool,
}

impl Progress {
    pub fn new(verbose: bool) -> Self {
        Progress { start: Instant::now(), verbose }
    }
}

impl Observer for Progress {
    fn now(&self) -> Option<f64> {
        Some(self.start.elapsed().as_secs_f64())
    }

    fn stage(&mut self, name: &str) {
        if self.verbose {
            eprintln!("[{:8.2} s] {name}", self.start.elapsed().as_secs_f64());
        }
    }
}

/// Multi-start Newton with the coarse starts spread over `threads` workers.
/// Outcomes keep grid order, so the selection does not depend on `threads`.
pub fn solve_parallel(spec: &ProblemSpec, n_solve: usize, opts: &MultiStartOptions, threads: usize) -> Result<ApproxSolution> {
    let grid = start_grid(spec.m, &opts.amplitudes);
    let outcomes: Vec<StartOutcome> = if threads <= 1 || grid.len() <= 1 {
        grid.iter().map(|a| run_start(spec, a, opts)).collect()
    } else {
        let chunk = grid.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = grid
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|a| run_start(spec, a, opts)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("start worker panicked")).collect()
        })
    };
    Ok(finish_multi_start(spec, n_solve, opts, &outcomes)?)
}

/// Worst relative defect of `q(û)` against central differences over
/// `samples` random directions.
pub fn check_derivative(spec: &ProblemSpec, u: &VectorField, seed: u64, samples: usize) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let rule = gauss_rule(u.n() + 4)?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut h = VectorField::zeros(u.dim(), u.m(), u.n().min(8));
        for c in h.comps.iter_mut() {
            for v in c.coeffs.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        worst = worst.max(derivative_defect(spec, u, &h.resized(u.n()), 1e-6, &rule)?);
    }
    Ok(worst)
}

pub struct Outcome {
    pub certificate: Certificate,
    pub solution: Option<ApproxSolution>,
}

impl Outcome {
    /// 0 when a norm bound was certified, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.certificate.inv_norm_upper.is_some() {
            0
        } else {
            2
        }
    }
}

fn read_coefficients(path: &Path) -> Result<CoefficientMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let q: CoefficientMatrix = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    // re-validate through the constructor
    Ok(CoefficientMatrix::new(q.dim, q.m, q.entries)?)
}

pub fn certify(cfg: &RunConfig, n_cert: usize, progress: &mut Progress) -> Result<Outcome> {
    let opts = cfg.certify_options();
    let n_solve = cfg.discretization.n_solve;
    let mut solve_time = None;
    let problem = match &cfg.problem {
        ProblemConfig::ConstantQ { c, dim, m } => Problem::constant(*c, *dim, *m),
        ProblemConfig::Custom { coefficients } => {
            let q = read_coefficients(coefficients)?;
            let name = coefficients.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Problem::Coefficients { name: format!("custom:{name}"), q }
        }
        ProblemConfig::LotkaVolterra { solution } => {
            let spec = lotka_volterra();
            let sol = match solution {
                Some(p) => {
                    let f = files::read_solution(p)?;
                    if f.m != spec.m || f.dim != spec.dim {
                        bail!("solution in {} does not fit {}", p.display(), spec.name);
                    }
                    f.solution
                }
                None => {
                    progress.stage("solve");
                    let t = Instant::now();
                    let s = solve_parallel(&spec, n_solve, &cfg.multi_start_options(), cfg.run.threads)
                        .context("stage solve")?;
                    solve_time = Some(t.elapsed().as_secs_f64());
                    s
                }
            };
            let defect = check_derivative(&spec, &sol.field, cfg.run.seed, 4)?;
            if defect > 1e-6 {
                bail!("stage solve: linearization disagrees with finite differences (relative defect {defect:e})");
            }
            Problem::Pinned { spec, solution: Box::new(sol) }
        }
    };
    let mut cert = run_pipeline(&problem, n_solve, n_cert, &opts, progress)?;
    if let Some(t) = solve_time {
        match cert.timings.first_mut() {
            Some(first) if first.stage == "solve" => first.seconds += t,
            _ => cert.timings.insert(0, Timing { stage: "solve".into(), seconds: t }),
        }
    }
    let solution = match &problem {
        Problem::Pinned { solution, .. } => Some((**solution).clone()),
        _ => None,
    };
    Ok(Outcome { certificate: cert, solution })
}

/// Runs `cfg` and writes the requested files.
pub fn certify_and_write(cfg: &RunConfig, out: Option<&Path>, progress: &mut Progress) -> Result<Outcome> {
    let outcome = certify(cfg, cfg.discretization.n_cert, progress)?;
    let path = out.map(Path::to_path_buf).or_else(|| cfg.output.certificate.clone());
    if let Some(p) = path {
        files::write_certificate(&p, &outcome.certificate)?;
    }
    if let Some(sol) = &outcome.solution {
        if let Some(p) = &cfg.output.solution {
            files::write_solution(p, &outcome.certificate.problem.name, sol)?;
        }
        if let Some(p) = &cfg.output.grid {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?);
            files::write_grid(&mut f, &sol.field, cfg.output.grid_points)?;
        }
    }
    Ok(outcome)
}

/// One-line summary for the terminal.
pub fn summary(c: &Certificate) -> String {
    let gap = match c.gap.found() {
        Some(g) => format!("gap j={} (distinct {}) nu={:.10}", g.j, g.j_distinct, g.nu.hi),
        None => "no gap".to_string(),
    };
    let bound = match c.inv_norm_upper {
        Some(b) => format!("‖L⁻¹‖ ≤ {:.10}", b.hi),
        None => "no norm bound".to_string(),
    };
    let lam = c.lambda_h1().map(|l| format!("{:.10}", l.mid())).unwrap_or_default();
    format!(
        "{} N={} lambda_h1={lam} C_Ms={:.4e} {gap} lambda_lower={:.10} {bound} [{}]",
        c.problem.name,
        c.n_cert,
        c.c_ms().hi,
        c.lambda_lower.lo,
        match c.rigor_level {
            invnorm_core::certify::RigorLevel::IntervalResidual => "interval+residual",
            invnorm_core::certify::RigorLevel::FloatOnly => "float-only",
        }
    )
}
