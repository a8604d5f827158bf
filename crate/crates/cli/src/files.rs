//! Certificate and solution JSON, the two table layouts as CSV, and the
//! gnuplot grid dump.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use invnorm_core::certify::Certificate;
use invnorm_core::problems::ApproxSolution;
use invnorm_core::spectral::VectorField;
use serde::{Deserialize, Serialize};

pub fn write_certificate(path: &Path, cert: &Certificate) -> Result<()> {
    let text = serde_json::to_string_pretty(cert)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_certificate(path: &Path) -> Result<Certificate> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing certificate {}", path.display()))
}

/// A solution together with the basis it is expanded in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    /// `psi-tensor`: products of `ψ_i(x) = (P_{i−1} − P_{i+1})/(2(2i+1))`
    /// in shifted Legendre polynomials on `(0,1)`.
    pub basis: String,
    pub problem: String,
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    pub solution: ApproxSolution,
}

pub const BASIS: &str = "psi-tensor";

impl SolutionFile {
    pub fn new(problem: &str, solution: ApproxSolution) -> Self {
        let f = &solution.field;
        SolutionFile { basis: BASIS.to_string(), problem: problem.to_string(), dim: f.dim(), m: f.m(), n: f.n(), solution }
    }
}

pub fn write_solution(path: &Path, problem: &str, sol: &ApproxSolution) -> Result<()> {
    let text = serde_json::to_string_pretty(&SolutionFile::new(problem, sol.clone()))?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_solution(path: &Path) -> Result<SolutionFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s: SolutionFile = serde_json::from_str(&text).with_context(|| format!("parsing solution {}", path.display()))?;
    if s.basis != BASIS {
        bail!("unsupported basis {:?}", s.basis);
    }
    let f = &s.solution.field;
    if f.dim() != s.dim || f.m() != s.m || f.n() != s.n {
        bail!("solution header does not match its coefficients");
    }
    Ok(s)
}

/// Point values on a uniform grid with `points` nodes per axis, blank line
/// between rows (gnuplot `splot` format).
pub fn write_grid(out: &mut impl Write, field: &VectorField, points: usize) -> Result<()> {
    let points = points.max(2);
    let h = 1.0 / (points - 1) as f64;
    let eval = |x: &[f64]| -> Result<Vec<f64>> { field.comps.iter().map(|c| Ok(c.eval(x)?)).collect() };
    let row = |x: &[f64], vals: &[f64]| {
        let mut s: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
        s.extend(vals.iter().map(|v| format!("{v:.12e}")));
        s.join(" ")
    };
    writeln!(out, "# {} component(s) on a {points}-point grid", field.m())?;
    if field.dim() == 1 {
        for i in 0..points {
            let x = [i as f64 * h];
            writeln!(out, "{}", row(&x, &eval(&x)?))?;
        }
    } else {
        for i in 0..points {
            for j in 0..points {
                let x = [i as f64 * h, j as f64 * h];
                writeln!(out, "{}", row(&x, &eval(&x)?))?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub const TABLE1_HEADER: [&str; 5] = ["N", "C_h", "C_Ms", "lambda_h1", "liu_lower"];
pub const TABLE2_HEADER: [&str; 5] = ["N", "j", "nu", "lambda1_lower", "invnorm_upper"];

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

const MISSING: &str = "--";

/// One row per certificate. Table 1: `C_h` and `C_Ms` upper ends, the lower
/// end of the `λ_h^{(1)}` enclosure and of its Liu bound. Table 2: the gap
/// index (with multiplicity), `ν`, the final lower bound and the norm
/// bound; `--` where no gap was found.
pub fn write_table(out: impl Write, which: u8, certs: &[Certificate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match which {
        1 => {
            w.write_record(TABLE1_HEADER)?;
            for c in certs {
                let lam = c.lambda_h1().map(|l| num(l.lo)).unwrap_or_else(|| MISSING.into());
                let lower = c.bounds.lower.first().map(|l| num(l.lo)).unwrap_or_else(|| MISSING.into());
                w.write_record([c.n_cert.to_string(), num(c.constants.c_h.hi), num(c.c_ms().hi), lam, lower])?;
            }
        }
        2 => {
            w.write_record(TABLE2_HEADER)?;
            for c in certs {
                let row = match c.gap.found() {
                    Some(g) => [
                        c.n_cert.to_string(),
                        g.j.to_string(),
                        num(g.nu.hi),
                        num(c.lambda_lower.lo),
                        c.inv_norm_upper.map(|b| num(b.hi)).unwrap_or_else(|| MISSING.into()),
                    ],
                    None => [c.n_cert.to_string(), MISSING.into(), MISSING.into(), MISSING.into(), MISSING.into()],
                };
                w.write_record(row)?;
            }
        }
        _ => bail!("table must be 1 or 2"),
    }
    w.flush()?;
    Ok(())
}

/// Every certificate in `dir`, ordered by `N`. Other JSON files are skipped.
pub fn collect_certificates(dir: &Path) -> Result<Vec<(PathBuf, Certificate)>> {
    let mut out = Vec::new();
    let entries = std::fs::read_dir(dir).with_context(|| format!("reading run directory {}", dir.display()))?;
    for e in entries {
        let p = e?.path();
        if p.extension().is_some_and(|x| x == "json") {
            if let Ok(c) = read_certificate(&p) {
                out.push((p, c));
            }
        }
    }
    if out.is_empty() {
        bail!("no certificates in {}", dir.display());
    }
    out.sort_by(|a, b| a.1.n_cert.cmp(&b.1.n_cert).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}
