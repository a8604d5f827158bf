//! Oracle suite behind `invnorm selftest`.

use invnorm_core::assembly::{assemble_pencil, assemble_q, gram_by_quadrature, CoefficientMatrix, GramMatrices};
use invnorm_core::certify::{certify_coefficients, constant_q_exact_norm, gram_with_fault, inverse_norm_bound, select_sigma, CertifyOptions, ChMode, Silent};
use invnorm_core::eig::{gen_eig_smallest, jacobi_eig};
use invnorm_core::linalg::Mat;
use invnorm_core::liu::{cms, liu_lower, poincare_constant, LiuConstants};
use invnorm_core::spectral::{gauss_rule, legendre_eval, psi_deriv, psi_eval, PolyField, Subspace};
use invnorm_core::tlg::{lehmann_bounds, temple_bound, IntervalMatrix, LehmannMatrices};
use invnorm_core::Interval;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PI: f64 = std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scale the stiffness diagonal by `1 + 5e-2`.
    Gram,
}

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Context {
    fn gram_fault(&self) -> Option<f64> {
        (self.fault == Some(Fault::Gram)).then_some(5e-2)
    }

    fn rng(&self, salt: u64) -> StdRng {
        StdRng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn gram(&self, sub: &Subspace) -> Result<GramMatrices, String> {
        gram_with_fault(sub, 1, self.gram_fault()).map_err(|e| e.to_string())
    }
}

type CheckFn = fn(&Context) -> Result<String, String>;

pub struct Check {
    pub stage: &'static str,
    pub name: &'static str,
    pub run: CheckFn,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub stage: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} [{}] {}: {}", self.stage, self.name, self.detail)
    }
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { stage: "spectral", name: "Legendre and ψ values", run: basis_values },
        Check { stage: "spectral", name: "ψ′ = −P identity", run: psi_derivative_identity },
        Check { stage: "spectral", name: "Gauss rule exactness", run: quadrature_exactness },
        Check { stage: "rigor", name: "interval containment (10⁵ cases)", run: interval_containment },
        Check { stage: "assembly", name: "Gram matrices against quadrature", run: gram_against_quadrature },
        Check { stage: "assembly", name: "Q = cI gives c·Mass", run: constant_q_matrix },
        Check { stage: "eig", name: "Jacobi against characteristic roots", run: jacobi_against_roots },
        Check { stage: "eig", name: "Dirichlet Laplacian pencil", run: laplacian_pencil },
        Check { stage: "eig", name: "Rayleigh–Ritz monotonicity in N", run: ritz_monotonicity },
        Check { stage: "liu", name: "Poincaré constant", run: poincare },
        Check { stage: "liu", name: "published constants reproduce C_Ms and the lower bound", run: published_row },
        Check { stage: "liu", name: "lower bound never exceeds λ_h (10⁴ cases)", run: liu_fuzz },
        Check { stage: "tlg", name: "one-trial Lehmann equals Temple", run: lehmann_temple },
        Check { stage: "tlg", name: "diagonal operator brute force", run: lehmann_diagonal },
        Check { stage: "certify", name: "final bound arithmetic", run: final_bound },
        Check { stage: "certify", name: "constant-coefficient oracles", run: constant_oracles },
    ]
}

pub fn run(ctx: &Context, mut report: impl FnMut(&CheckResult)) -> Vec<CheckResult> {
    checks()
        .into_iter()
        .map(|c| {
            let r = match (c.run)(ctx) {
                Ok(detail) => CheckResult { stage: c.stage, name: c.name, passed: true, detail },
                Err(detail) => CheckResult { stage: c.stage, name: c.name, passed: false, detail },
            };
            report(&r);
            r
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn basis_values(_: &Context) -> Result<String, String> {
    let e = |v: Result<f64, invnorm_core::Error>| v.map_err(|e| e.to_string());
    ensure(legendre_eval(0, 0.37) == 1.0 && legendre_eval(1, 0.5) == 0.0, || "P_0 or P_1".into())?;
    ensure((legendre_eval(2, 0.0) - 1.0).abs() < 1e-15, || "P_2(0)".into())?;
    ensure(e(psi_eval(1, 0.0))? == 0.0, || "ψ_1(0)".into())?;
    ensure((e(psi_eval(1, 0.5))? - 0.25).abs() < 1e-15, || "ψ_1(1/2)".into())?;
    ensure((e(psi_eval(2, 0.25))? + 0.09375).abs() < 1e-15, || "ψ_2(1/4)".into())?;
    Ok("P_0, P_1, P_2, ψ_1, ψ_2".into())
}

fn psi_derivative_identity(ctx: &Context) -> Result<String, String> {
    let mut rng = ctx.rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let i = rng.gen_range(1..=60);
        let x: f64 = rng.gen_range(0.0..=1.0);
        let d = psi_deriv(i, x).map_err(|e| e.to_string())?;
        worst = worst.max((d + legendre_eval(i, x)).abs());
    }
    ensure(worst <= 1e-12, || format!("max |ψ_i′ + P_i| = {worst:e}"))?;
    Ok(format!("max defect {worst:.1e}"))
}

fn quadrature_exactness(_: &Context) -> Result<String, String> {
    let r = gauss_rule(5).map_err(|e| e.to_string())?;
    let v = r.integrate(|x| x.powi(9));
    ensure((v - 0.1).abs() < 1e-14, || format!("∫x⁹ = {v}"))?;
    Ok(format!("∫x⁹ = {v}"))
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn interval_containment(ctx: &Context) -> Result<String, String> {
    let mut rng = ctx.rng(2);
    let draw = |rng: &mut StdRng| -> Interval {
        let e: i32 = rng.gen_range(-60..60);
        let a = rng.gen_range(-1.0..1.0) * 2f64.powi(e);
        let w = rng.gen_range(0.0..1e-3) * a.abs().max(1e-3);
        Interval::new(a, a + w).expect("ordered")
    };
    let cases = 100_000;
    for k in 0..cases {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let ta = rat(rng.gen_range(0.0..=1.0));
        let tb = rat(rng.gen_range(0.0..=1.0));
        let x = rat(a.lo) + (rat(a.hi) - rat(a.lo)) * ta;
        let y = rat(b.lo) + (rat(b.hi) - rat(b.lo)) * tb;
        let inside = |iv: Interval, v: &BigRational| rat(iv.lo) <= *v && *v <= rat(iv.hi);
        let ok = match k % 6 {
            0 => inside(a + b, &(&x + &y)),
            1 => inside(a - b, &(&x - &y)),
            2 => inside(a * b, &(&x * &y)),
            3 => match a / b {
                Ok(q) => !y.is_zero() && inside(q, &(&x / &y)),
                Err(_) => b.lo <= 0.0 && b.hi >= 0.0,
            },
            4 => inside(a.sqr(), &(&x * &x)),
            _ => {
                let s = a.abs().sqrt().map_err(|e| e.to_string())?;
                let xa = x.abs();
                rat(s.lo) * rat(s.lo) <= xa && xa <= rat(s.hi) * rat(s.hi)
            }
        };
        ensure(ok, || format!("case {k}: {a:?} op{} {b:?}", k % 6))?;
    }
    Ok(format!("{cases} cases"))
}

fn gram_against_quadrature(ctx: &Context) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for (dim, n) in [(1, 12), (2, 8)] {
        let sub = Subspace::full(dim, n);
        let g = ctx.gram(&sub)?;
        let rule = gauss_rule(n + 3).map_err(|e| e.to_string())?;
        let (s, m) = gram_by_quadrature(&sub, &rule).map_err(|e| e.to_string())?;
        let d = |a: &Mat, b: &Mat| a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(d(&g.stiffness_full(), &s)).max(d(&g.mass_full(), &m));
    }
    ensure(worst <= 1e-12, || format!("max entry deviation {worst:e}"))?;
    Ok(format!("max entry deviation {worst:.1e}"))
}

fn constant_q_matrix(ctx: &Context) -> Result<String, String> {
    let g = ctx.gram(&Subspace::full(2, 6))?;
    let q = assemble_q(&g, &CoefficientMatrix::scalar_identity(2, 1, 3.5), None).map_err(|e| e.to_string())?;
    let m = g.mass_full();
    let worst = q.as_slice().iter().zip(m.as_slice()).map(|(a, b)| (a - 3.5 * b).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("deviation {worst:e}"))?;
    Ok(format!("deviation {worst:.1e}"))
}

fn char_poly(a: &[[i64; 4]; 4]) -> [i128; 5] {
    let n = 4;
    let mut c = [0i128; 5];
    c[4] = 1;
    let mut m = [[0i128; 4]; 4];
    for k in 1..=n {
        let mut next = [[0i128; 4]; 4];
        for i in 0..n {
            for j in 0..n {
                let s: i128 = (0..n).map(|l| a[i][l] as i128 * m[l][j]).sum();
                next[i][j] = s + if i == j { c[n - k + 1] } else { 0 };
            }
        }
        m = next;
        let tr: i128 = (0..n).map(|i| (0..n).map(|l| a[i][l] as i128 * m[l][i]).sum::<i128>()).sum();
        c[n - k] = -tr / k as i128;
    }
    c
}

// sign changes on a fine grid refined by bisection; exact BigInt
// evaluation keeps the signs right
fn real_roots(c: &[i128; 5], lo: f64, hi: f64) -> Vec<f64> {
    let sign = |x: f64| {
        let xr = rat(x);
        let v = c.iter().rev().fold(BigRational::zero(), |acc, ci| acc * &xr + BigRational::from_integer(BigInt::from(*ci)));
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };
    let steps = 4000;
    let h = (hi - lo) / steps as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut s0 = sign(x0);
    for i in 1..=steps {
        let x1 = lo + i as f64 * h;
        let s1 = sign(x1);
        if s0 == 0 {
            out.push(x0);
        } else if s0 * s1 < 0 {
            let (mut a, mut b) = (x0, x1);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let sm = sign(mid);
                if sm == 0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if sm == s0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        x0 = x1;
        s0 = s1;
    }
    out
}

fn jacobi_against_roots(ctx: &Context) -> Result<String, String> {
    let mut rng = ctx.rng(3);
    let mut tested = 0;
    while tested < 20 {
        let mut a = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = rng.gen_range(-5..=5);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let (vals, _) = jacobi_eig(&Mat::from_fn(4, 4, |i, j| a[i][j] as f64));
        if vals.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let roots = real_roots(&char_poly(&a), -21.0, 21.0);
        ensure(roots.len() == 4, || format!("{a:?}: {} roots", roots.len()))?;
        for (r, v) in roots.iter().zip(&vals) {
            ensure((r - v).abs() < 1e-9, || format!("{a:?}: {r} vs {v}"))?;
        }
        tested += 1;
    }
    Ok(format!("{tested} matrices"))
}

fn laplacian_pencil(ctx: &Context) -> Result<String, String> {
    let pi2 = PI * PI;
    let mut out = Vec::new();
    for (dim, exact) in [(1, pi2), (2, 2.0 * pi2)] {
        let g = ctx.gram(&Subspace::full(dim, 8))?;
        let p = assemble_pencil(&g, &CoefficientMatrix::scalar_identity(dim, 1, 0.0), None, None).map_err(|e| e.to_string())?;
        let v = gen_eig_smallest(&p.lhs, g.mass_factor(), 1).map_err(|e| e.to_string())?.values()[0];
        ensure(v >= exact && v - exact <= 1e-3, || format!("dim {dim}: {v} vs {exact}"))?;
        out.push(format!("{v:.8}"));
    }
    Ok(out.join(", "))
}

fn ritz_monotonicity(ctx: &Context) -> Result<String, String> {
    let mut rng = ctx.rng(4);
    for _ in 0..6 {
        let x = PolyField::coordinate(2, 0);
        let y = PolyField::coordinate(2, 1);
        let q = PolyField::constant(2, rng.gen_range(-10.0..10.0))
            .add_scaled(rng.gen_range(-10.0..10.0), &x)
            .and_then(|p| p.add_scaled(rng.gen_range(-10.0..10.0), &x.product(&y)?))
            .map_err(|e| e.to_string())?;
        let q = CoefficientMatrix::new(2, 1, vec![q]).map_err(|e| e.to_string())?;
        let mut prev: Option<Vec<f64>> = None;
        for n in [3, 5, 7] {
            let g = ctx.gram(&Subspace::full(2, n))?;
            let mut p = g.stiffness_full();
            p.axpy(-2.0, &assemble_q(&g, &q, None).map_err(|e| e.to_string())?);
            p.symmetrize();
            let v = gen_eig_smallest(&p, g.mass_factor(), 4).map_err(|e| e.to_string())?.values();
            if let Some(pv) = &prev {
                for (a, b) in v.iter().zip(pv) {
                    ensure(*a <= b + 1e-10 * b.abs().max(1.0), || format!("N={n}: {a} > {b}"))?;
                }
            }
            prev = Some(v);
        }
    }
    Ok("6 random coefficients, N = 3, 5, 7".into())
}

fn poincare(_: &Context) -> Result<String, String> {
    let c2 = poincare_constant(2);
    let c1 = poincare_constant(1);
    ensure(c2.contains(0.2250790790392765) && c1.contains(1.0 / PI), || format!("{c1:?} {c2:?}"))?;
    Ok(format!("{:.12}", c2.mid()))
}

fn published_row(_: &Context) -> Result<String, String> {
    let c = LiuConstants {
        c_p: poincare_constant(2),
        c_h: Interval::enclose(7.88e-3),
        sigma: select_sigma(Interval::enclose(155.29112928765162), 1e-4).map_err(|e| e.to_string())?,
        norm_q: Interval::enclose(82.580303007092866),
        norm_shift: Interval::enclose(308.06051565984086),
    };
    let lam = Interval::point(5.8616931651409078);
    let v = cms(&c, lam).map_err(|e| e.to_string())?;
    let l = liu_lower(lam, v, c.sigma).map_err(|e| e.to_string())?;
    ensure((v.mid() - 0.0399).abs() <= 5e-4, || format!("C_Ms = {}", v.mid()))?;
    ensure((l.mid() + 26.963).abs() <= 0.3, || format!("lower = {}", l.mid()))?;
    Ok(format!("C_Ms = {:.6}, lower = {:.6}", v.mid(), l.mid()))
}

fn liu_fuzz(ctx: &Context) -> Result<String, String> {
    let mut rng = ctx.rng(5);
    for _ in 0..10_000 {
        let lam: f64 = rng.gen_range(-50.0..1e4);
        let sigma = rng.gen_range(0.0..1e3) + (-lam).max(0.0) + 1e-3;
        let (c1, c2): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let (a, b) = (c1.min(c2), c1.max(c2));
        let p = Interval::point;
        let la = liu_lower(p(lam), p(a), p(sigma)).map_err(|e| e.to_string())?;
        let lb = liu_lower(p(lam), p(b), p(sigma)).map_err(|e| e.to_string())?;
        ensure(la.lo <= lam && lb.lo <= lam, || format!("λ={lam} σ={sigma} C={a},{b}: bound above λ_h"))?;
        ensure(lb.lo <= la.hi, || format!("λ={lam} σ={sigma}: increasing in C"))?;
    }
    Ok("10000 cases".into())
}

fn diagonal(mu: &[f64], trials: &Mat) -> LehmannMatrices {
    let n = trials.cols();
    let f = |k: i32| Mat::from_fn(n, n, |i, l| (0..mu.len()).map(|r| trials[(r, i)] * mu[r].powi(k) * trials[(r, l)]).sum());
    LehmannMatrices {
        m0: IntervalMatrix::from_points(&f(0)),
        m1: IntervalMatrix::from_points(&f(1)),
        m2: IntervalMatrix::from_points(&f(2)),
    }
}

fn lehmann_temple(_: &Context) -> Result<String, String> {
    let u = Mat::from_vec(2, 1, vec![1.0, 0.1]).map_err(|e| e.to_string())?;
    let b = lehmann_bounds(&diagonal(&[1.0, 3.0], &u), Interval::point(2.0), 2).map_err(|e| e.to_string())?;
    let t = temple_bound(1.01, 1.03, 1.09, 2.0).map_err(|e| e.to_string())?;
    let d = (b.lambda1_lower.mid() - t.mid()).abs();
    ensure(d <= 1e-12 && t.hi <= 1.0, || format!("Lehmann {:?} vs Temple {:?}", b.lambda1_lower, t))?;
    Ok(format!("{:.12} (difference {d:.1e})", t.mid()))
}

fn lehmann_diagonal(_: &Context) -> Result<String, String> {
    let u = Mat::from_fn(3, 2, |r, c| if r == c { 1.0 } else { 0.0 });
    let b = lehmann_bounds(&diagonal(&[1.0, 2.0, 10.0], &u), Interval::point(5.0), 3).map_err(|e| e.to_string())?;
    for (i, exact) in [1.0, 2.0].into_iter().enumerate() {
        let l = b.lower[i].lo;
        ensure(l >= exact - 1e-12 && l <= exact, || format!("λ_{}: {l}", i + 1))?;
    }
    Ok(format!("{:.14}, {:.14}", b.lower[0].lo, b.lower[1].lo))
}

fn final_bound(_: &Context) -> Result<String, String> {
    let b = inverse_norm_bound(Interval::point(5.8616914678651141)).ok_or("no bound")?;
    ensure(b.hi <= 0.4131, || format!("{}", b.hi))?;
    let c = inverse_norm_bound(Interval::pi().sqr() * 2.0).ok_or("no bound")?;
    ensure(c.contains(0.2250790790392765), || format!("{c:?}"))?;
    ensure(inverse_norm_bound(Interval::new(-1.0, -0.5).expect("ordered")).is_none(), || "negative λ certified".into())?;
    Ok(format!("{:.10}", b.hi))
}

fn constant_oracles(ctx: &Context) -> Result<String, String> {
    let opts = CertifyOptions { ch: ChMode::Heuristic, gram_fault: ctx.gram_fault(), ..CertifyOptions::default() };
    let mut worst: f64 = f64::INFINITY;
    for (dim, n) in [(1, 10), (1, 20), (2, 10)] {
        for c in [0.0, 1.0, 5.0, -3.0] {
            let q = CoefficientMatrix::scalar_identity(dim, 1, c);
            let cert = certify_coefficients("oracle", &q, n, &opts, &mut Silent).map_err(|e| e.to_string())?;
            let exact = constant_q_exact_norm(c, dim).ok_or("resonant c")?;
            let bound = cert.inv_norm_upper.ok_or_else(|| format!("dim {dim} N {n} c {c}: no bound"))?.hi;
            ensure(bound >= exact, || format!("dim {dim} N {n} c {c}: bound {bound} below exact {exact}"))?;
            // the refined λ′ stays below the analytic minimum (μ − c)²/μ
            let lam_min = 1.0 / (exact * exact);
            ensure(cert.lambda_lower.lo <= lam_min * (1.0 + 1e-12), || {
                format!("dim {dim} N {n} c {c}: λ′ {} above {lam_min}", cert.lambda_lower.lo)
            })?;
            worst = worst.min(exact / bound);
        }
    }
    Ok(format!("12 runs, tightest ratio exact/bound {worst:.12}"))
}
