use invnorm_core::assembly::{CoefficientMatrix, GramMatrices};
use invnorm_core::certify::{inverse_norm_bound, ritz_error_constant, select_sigma, ChMode};
use invnorm_core::linalg::Mat;
use invnorm_core::liu::{
    cms, find_gap, liu_lower, lower_upper_bounds, poincare_constant, ChSource, EigBounds, LiuConstants,
};
use invnorm_core::spectral::{gauss_rule, Subspace};
use invnorm_core::tlg::{lehmann_bounds, lehmann_matrices, temple_bound, IntervalMatrix, LehmannMatrices, Trial};
use invnorm_core::Interval;
use proptest::prelude::*;

const PI: f64 = std::f64::consts::PI;

fn p(x: f64) -> Interval {
    Interval::point(x)
}

// printed N=60 row constants
fn printed_constants(c_h: f64) -> LiuConstants {
    LiuConstants {
        c_p: poincare_constant(2),
        c_h: Interval::enclose(c_h),
        sigma: select_sigma(Interval::enclose(155.29112928765162), 1e-4).unwrap(),
        norm_q: Interval::enclose(82.580303007092866),
        norm_shift: Interval::enclose(308.06051565984086),
    }
}

#[test]
fn poincare_examples() {
    let c2 = poincare_constant(2);
    assert!(c2.contains(1.0 / (2f64.sqrt() * PI)) && c2.contains(0.2250790790392765));
    let c1 = poincare_constant(1);
    assert!(c1.contains(1.0 / PI));
    for c in [c1, c2] {
        let ulp = f64::from_bits(c.hi.to_bits() + 1) - c.hi;
        assert!(c.hi - c.lo <= 4.0 * ulp);
    }
}

#[test]
fn ritz_error_constant_examples() {
    let (c, src) = ritz_error_constant(60, ChMode::Table).unwrap();
    assert!(c.contains(7.88e-3) && src == ChSource::Table);
    let (c, src) = ritz_error_constant(80, ChMode::Heuristic).unwrap();
    let want = 1.0 / (165.0f64 * 169.0).sqrt();
    assert!((c.mid() - want).abs() < 1e-15 && src == ChSource::Heuristic);
    assert!((c.mid() - 5.99e-3).abs() < 5e-6);
    let (c, _) = ritz_error_constant(100, ChMode::Table).unwrap();
    assert!(c.contains(4.84e-3));
    assert!(ritz_error_constant(70, ChMode::Table).is_err());
    let (c, src) = ritz_error_constant(70, ChMode::Auto).unwrap();
    assert!(src == ChSource::Heuristic && c.hi < 7.88e-3);
    let (c, src) = ritz_error_constant(70, ChMode::User(0.02)).unwrap();
    assert!(c.contains(0.02) && src == ChSource::User);
    assert!(ritz_error_constant(70, ChMode::User(-1.0)).is_err());
}

#[test]
fn select_sigma_examples() {
    let s = select_sigma(p(155.29112928765162), 1e-4).unwrap();
    assert!((s.mid() - 155.29122928765162).abs() < 1e-12);
    let s = select_sigma(p(0.0), 1.0).unwrap();
    assert_eq!(s.lo, 1.0);
    let s = select_sigma(Interval::new(1.0, 1e17).unwrap(), 1e-4).unwrap();
    assert!(s.lo > 1e17);
    assert!(select_sigma(p(1.0), 0.0).is_err());
}

#[test]
fn cms_examples() {
    let c = printed_constants(7.88e-3);
    let v = cms(&c, p(5.8616931651409078)).unwrap();
    assert!((v.mid() - 0.0399).abs() <= 5e-4, "{v:?}");

    let c0 = LiuConstants {
        c_p: poincare_constant(2),
        c_h: p(0.01),
        sigma: p(1e-4),
        norm_q: p(0.0),
        norm_shift: p(1e-4),
    };
    let v = cms(&c0, p(19.73)).unwrap();
    assert!((v.mid() - 0.01 * (1.0 + 1e-4 / 19.7301)).abs() < 1e-15);
    assert!((v.mid() - 0.0100000507).abs() < 1e-10);

    let z = LiuConstants { c_h: p(0.0), ..c };
    assert!(cms(&z, p(5.86)).unwrap().mag() < 1e-300);
    assert!(cms(&c, p(-200.0)).is_err());
}

#[test]
fn table1_rows() {
    // (N, C_h, λ_h1 lower end, printed C_Ms, printed lower bound)
    let rows = [
        (7.88e-3, 5.8616931651409078, 0.0399, -26.963087160457065),
        (5.99e-3, 5.8616930544573868, 0.0303, -14.900551378456357),
        (4.84e-3, 5.8616927624274461, 0.0245, -8.2725800704491519),
    ];
    for (c_h, lam, c_ms, lower) in rows {
        let c = printed_constants(c_h);
        let v = cms(&c, p(lam)).unwrap();
        assert!((v.mid() - c_ms).abs() <= 5e-4, "{c_h}: {v:?}");
        let l = liu_lower(p(lam), v, c.sigma).unwrap();
        assert!((l.mid() - lower).abs() <= 0.3, "{c_h}: {l:?} vs {lower}");
        // with the rounded C_Ms the agreement is 1e-2 relative
        let l3 = liu_lower(p(lam), p(c_ms), c.sigma).unwrap();
        assert!(((l3.mid() - lower) / lower).abs() <= 1e-2, "{c_h}: {l3:?}");
    }
}

#[test]
fn liu_lower_examples() {
    let l = liu_lower(p(5.8616931651409078), p(0.0), p(155.29122928765162)).unwrap();
    assert!(l.contains(5.8616931651409078) && l.width() < 1e-12);
    let l = liu_lower(p(5.0), p(0.0), p(1.0)).unwrap();
    assert!(l.contains(5.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn liu_lower_never_exceeds_discrete_eigenvalue(
        lam in -50.0f64..1e4,
        sigma in 0.0f64..1e3,
        c1 in 0.0f64..1.0,
        c2 in 0.0f64..1.0,
    ) {
        let sigma = sigma + (-lam).max(0.0) + 1e-3;
        let (a, b) = (c1.min(c2), c1.max(c2));
        let la = liu_lower(p(lam), p(a), p(sigma)).unwrap();
        let lb = liu_lower(p(lam), p(b), p(sigma)).unwrap();
        prop_assert!(la.lo <= lam && lb.lo <= lam);
        // nonincreasing in C
        prop_assert!(lb.lo <= la.hi);
        // interval-monotone: widening C never shrinks the result
        let lw = liu_lower(p(lam), Interval::new(a, b).unwrap(), p(sigma)).unwrap();
        prop_assert!(lw.lo <= la.lo.min(lb.lo) && lw.hi >= la.hi.max(lb.hi));
    }

    #[test]
    fn cms_is_interval_monotone(
        lam in 1.0f64..100.0, w in 0.0f64..1.0, ch in 1e-4f64..1e-1, nq in 0.0f64..100.0, ns in 0.0f64..300.0,
    ) {
        let c = LiuConstants { c_p: poincare_constant(2), c_h: p(ch), sigma: p(ns / 2.0 + 1.0), norm_q: p(nq), norm_shift: p(ns) };
        let narrow = cms(&c, p(lam)).unwrap();
        let wide = cms(&LiuConstants { norm_q: Interval::new(nq, nq + w).unwrap(), ..c }, Interval::new(lam - w, lam + w).unwrap()).unwrap();
        prop_assert!(wide.contains_interval(narrow));
    }
}

#[test]
fn gap_examples() {
    let b = EigBounds { lower: vec![p(1.0), p(5.0)], upper: vec![p(2.0), p(6.0)] };
    let g = find_gap(&b).unwrap();
    assert_eq!(g.j, 2);
    assert_eq!(g.nu, p(2.0));
    assert!(g.nu.hi < g.lower_j.lo);

    let b = EigBounds { lower: vec![p(1.0), p(1.5), p(2.5)], upper: vec![p(2.0), p(3.0), p(3.5)] };
    assert!(find_gap(&b).is_none());

    let c = printed_constants(7.88e-3);
    let lam = [p(5.8616931651409078), p(7.8241), p(7.8241), p(37.14)];
    let v = cms(&c, lam[0]).unwrap();
    let b = lower_upper_bounds(&lam, &c, v).unwrap();
    assert!(find_gap(&b).is_none());
    for (l, u) in b.lower.iter().zip(&b.upper) {
        assert!(l.lo <= u.lo);
    }
}

fn diagonal(mu: &[f64], trials: &Mat) -> LehmannMatrices {
    let n = trials.cols();
    let f = |k: i32| {
        Mat::from_fn(n, n, |i, l| (0..mu.len()).map(|r| trials[(r, i)] * mu[r].powi(k) * trials[(r, l)]).sum())
    };
    LehmannMatrices {
        m0: IntervalMatrix::from_points(&f(0)),
        m1: IntervalMatrix::from_points(&f(1)),
        m2: IntervalMatrix::from_points(&f(2)),
    }
}

#[test]
fn temple_example() {
    let mats = diagonal(&[1.0, 3.0], &Mat::from_vec(2, 1, vec![1.0, 0.1]).unwrap());
    let rq: f64 = 1.03 / 1.01;
    assert!((rq - 1.0198).abs() < 1e-4);
    let t = temple_bound(1.01, 1.03, 1.09, 2.0).unwrap();
    let direct = (2.0 * rq - 1.09 / 1.01) / (2.0 - rq);
    assert!((t.mid() - direct).abs() < 1e-14);
    assert!((t.mid() - 0.9798).abs() < 1e-4 && t.hi <= 1.0);
    let b = lehmann_bounds(&mats, p(2.0), 2).unwrap();
    assert!((b.lambda1_lower.mid() - t.mid()).abs() <= 1e-12, "{:?} vs {:?}", b.lambda1_lower, t);
    assert!(b.lambda1_lower.lo <= 1.0);
}

#[test]
fn diagonal_brute_force() {
    let u = Mat::from_fn(3, 2, |r, c| if r == c { 1.0 } else { 0.0 });
    let b = lehmann_bounds(&diagonal(&[1.0, 2.0, 10.0], &u), p(5.0), 3).unwrap();
    for (i, exact) in [1.0, 2.0].into_iter().enumerate() {
        assert!(b.lower[i].lo >= exact - 1e-12 && b.lower[i].lo <= exact, "{i}: {:?}", b.lower[i]);
    }
    // perturbed trials against the 2×2 pencil solved in closed form
    let u = Mat::from_vec(3, 2, vec![1.0, 0.05, 0.02, 1.0, 0.1, 0.1]).unwrap();
    let mats = diagonal(&[1.0, 2.0, 10.0], &u);
    let b = lehmann_bounds(&mats, p(5.0), 3).unwrap();
    let e = |m: &IntervalMatrix, i, k| m.get(i, k).mid();
    let rho = 5.0;
    let a0 = |i, k| e(&mats.m1, i, k) - rho * e(&mats.m0, i, k);
    let a1 = |i, k| e(&mats.m2, i, k) - 2.0 * rho * e(&mats.m1, i, k) + rho * rho * e(&mats.m0, i, k);
    // det(A0 − τA1) = aτ² + bτ + c
    let qa = a1(0, 0) * a1(1, 1) - a1(0, 1) * a1(1, 0);
    let qb = -(a0(0, 0) * a1(1, 1) + a1(0, 0) * a0(1, 1) - a0(0, 1) * a1(1, 0) - a1(0, 1) * a0(1, 0));
    let qc = a0(0, 0) * a0(1, 1) - a0(0, 1) * a0(1, 0);
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let (t1, t2) = ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa));
    let (t1, t2) = (t1.min(t2), t1.max(t2));
    assert!(t1 < 0.0 && t2 < 0.0);
    // the most negative τ bounds the eigenvalue nearest ρ
    let (l1, l2) = (rho + 1.0 / t2, rho + 1.0 / t1);
    assert!((b.lower[0].mid() - l1).abs() < 1e-10 && b.lower[0].lo <= 1.0, "{:?} vs {l1}", b.lower[0]);
    assert!((b.lower[1].mid() - l2).abs() < 1e-10 && b.lower[1].lo <= 2.0, "{:?} vs {l2}", b.lower[1]);
    assert!(lehmann_bounds(&diagonal(&[1.0, 2.0, 10.0], &u), p(1.5), 3).is_err());
}

proptest! {
    #[test]
    fn lehmann_improves_with_rho(e in proptest::array::uniform6(-0.2f64..0.2), r1 in 2.5f64..10.0, r2 in 2.5f64..10.0) {
        let mu = [1.0, 2.0, 10.0];
        let u = Mat::from_vec(3, 2, vec![1.0, e[0], e[1], 1.0, e[2] + 0.05, e[3] + 0.05]).unwrap();
        let mats = diagonal(&mu, &u);
        let rq = mats.rayleigh_quotients();
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        prop_assume!(rq.iter().all(|r| r.hi < lo));
        let a = lehmann_bounds(&mats, p(lo), 3);
        let b = lehmann_bounds(&mats, p(hi), 3);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(b.lambda1_lower.lo >= a.lambda1_lower.lo - 1e-12);
            prop_assert!(b.lambda1_lower.lo <= 1.0 && a.lambda1_lower.lo <= 1.0);
            prop_assert!(b.lower[1].lo <= 2.0);
        }
    }
}

#[test]
fn lehmann_matrices_single_psi1() {
    let g = GramMatrices::new(&Subspace::full(1, 1), 1).unwrap();
    let rule = gauss_rule(6).unwrap();
    let q = CoefficientMatrix::scalar_identity(1, 1, 0.0);
    let m = lehmann_matrices(&[Trial { gram: &g, coeffs: &[1.0] }], &q, 0.0, &rule).unwrap();
    assert!(m.m0.get(0, 0).contains(1.0 / 30.0) || (m.m0.get(0, 0).mid() - 1.0 / 30.0).abs() < 1e-15);
    assert!((m.m1.get(0, 0).mid() - 1.0 / 3.0).abs() < 1e-14);
    assert!((m.m2.get(0, 0).mid() - 4.0).abs() < 1e-13);
    assert!(lehmann_matrices(&[], &q, 0.0, &rule).unwrap().is_empty());
    assert!(lehmann_bounds(&lehmann_matrices(&[], &q, 0.0, &rule).unwrap(), p(1.0), 2).is_err());
}

#[test]
fn lehmann_matrices_constant_q_terms() {
    // M1 = aᵀDa − 2c aᵀMa + c² aᵀM D⁻¹M a
    for dim in [1, 2] {
        let n = 5;
        let g = GramMatrices::new(&Subspace::full(dim, n), 1).unwrap();
        let len = g.len();
        let a: Vec<f64> = (0..len).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0 + 0.1 * i as f64).collect();
        let b: Vec<f64> = (0..len).map(|i| ((i * 3 + 1) % 4) as f64 - 1.5).collect();
        let c = 2.5;
        let q = CoefficientMatrix::scalar_identity(dim, 1, c);
        let rule = gauss_rule(2 * n + 4).unwrap();
        let trials = [Trial { gram: &g, coeffs: &a }, Trial { gram: &g, coeffs: &b }];
        let m = lehmann_matrices(&trials, &q, 0.0, &rule).unwrap();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(s, t)| s * t).sum::<f64>();
        let ma = g.apply_mass(&a).unwrap();
        let mb = g.apply_mass(&b).unwrap();
        let mut dmb = mb.clone();
        g.solve_stiffness(&mut dmb).unwrap();
        let want = dot(&a, &g.apply_stiffness(&b).unwrap()) - 2.0 * c * dot(&a, &mb) + c * c * dot(&ma, &dmb);
        let got = m.m1.get(0, 1).mid();
        assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "dim {dim}: {got} vs {want}");
        assert!((m.m0.get(0, 1).mid() - dot(&a, &mb)).abs() < 1e-12);
    }
}

#[test]
fn inverse_norm_examples() {
    let b = inverse_norm_bound(p(5.8616914678651141)).unwrap();
    assert!(b.hi <= 0.4131 && b.hi >= 1.0 / 5.8616914678651141f64.sqrt());
    assert!(b.width() < 1e-15);
    let b = inverse_norm_bound(Interval::pi().sqr() * 2.0).unwrap();
    assert!(b.contains(0.2250790790392765) && b.width() < 1e-15);
    assert!(inverse_norm_bound(Interval::new(-1.0, -0.5).unwrap()).is_none());
    assert!(inverse_norm_bound(Interval::new(0.0, 1.0).unwrap()).is_none());
    // enlarging λ never enlarges the bound
    let small = inverse_norm_bound(p(3.0)).unwrap();
    let large = inverse_norm_bound(p(4.0)).unwrap();
    assert!(large.hi <= small.hi);
}
