use invnorm_core::assembly::{assemble_pencil, assemble_q, CoefficientMatrix, GramMatrices};
use invnorm_core::eig::{gen_eig_smallest, jacobi_eig, sym_eig_smallest, tridiagonal_eig_smallest};
use invnorm_core::linalg::Mat;
use invnorm_core::rigor::{sup_operator_norm, Interval, NormTarget, SupNormOptions};
use invnorm_core::spectral::{PolyField, Subspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn encloses(iv: Interval, exact: &BigRational) -> bool {
    rat(iv.lo) <= *exact && *exact <= rat(iv.hi)
}

#[test]
fn interval_examples() {
    let s = Interval::point(1.0) + Interval::point(2.0);
    assert!(s.contains(3.0));
    assert!(s.hi - s.lo <= 2.0 * f64::EPSILON * 3.0);
    let r = Interval::point(2.0).sqrt().unwrap();
    // √2 to 30 digits
    let root = BigRational::new(
        BigInt::parse_bytes(b"141421356237309504880168872421", 10).unwrap(),
        BigInt::from(10u8).pow(29),
    );
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10u8).pow(28));
    assert!(rat(r.lo) <= &root + &tol && &root - &tol <= rat(r.hi));
    assert!(rat(r.lo) * rat(r.lo) <= rat(2.0) && rat(2.0) <= rat(r.hi) * rat(r.hi));
    let p = Interval::new(-1.0, 2.0).unwrap() * Interval::point(3.0);
    assert!(p.lo <= -3.0 && p.hi >= 6.0 && p.lo > -3.0 - 1e-14 && p.hi < 6.0 + 1e-14);
    assert!(Interval::new(2.0, 1.0).is_err());
    assert!((Interval::ONE / Interval::new(-1.0, 1.0).unwrap()).is_err());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        -1.0f64..1.0,
        (-300i32..300, -1.0f64..1.0).prop_map(|(e, m)| m * 2f64.powi(e / 4)),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (finite(), 0.0f64..1e3).prop_map(|(a, w)| Interval::new(a, a + w * a.abs().max(1e-3) * 1e-3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn interval_operations_contain_exact_results(a in interval(), b in interval(), op in 0u8..6, ta in 0.0f64..=1.0, tb in 0.0f64..=1.0) {
        // exact points inside each operand
        let x = rat(a.lo) + (rat(a.hi) - rat(a.lo)) * rat(ta);
        let y = rat(b.lo) + (rat(b.hi) - rat(b.lo)) * rat(tb);
        match op {
            0 => prop_assert!(encloses(a + b, &(&x + &y))),
            1 => prop_assert!(encloses(a - b, &(&x - &y))),
            2 => prop_assert!(encloses(a * b, &(&x * &y))),
            3 => {
                if let Ok(q) = a / b {
                    prop_assert!(!y.is_zero());
                    prop_assert!(encloses(q, &(&x / &y)));
                } else {
                    prop_assert!(b.lo <= 0.0 && b.hi >= 0.0);
                }
            }
            4 => prop_assert!(encloses(a.sqr(), &(&x * &x))),
            _ => {
                let s = a.abs().sqrt().unwrap();
                let xa = x.abs();
                prop_assert!(rat(s.lo) * rat(s.lo) <= xa && xa <= rat(s.hi) * rat(s.hi));
            }
        }
    }
}

#[test]
fn sup_norm_examples() {
    let opts = SupNormOptions::default();
    let q = CoefficientMatrix::scalar_identity(2, 2, 5.0);
    let b = sup_operator_norm(&q, NormTarget::Plain, &opts).unwrap();
    assert!(b.upper >= 5.0 && b.upper <= 5.0 + 1e-9);

    let six = PolyField::constant(2, 6.0);
    let four = PolyField::constant(2, 4.0);
    let z = PolyField::zero(2);
    let q = CoefficientMatrix::new(2, 2, vec![six, z.clone(), z.clone(), four]).unwrap();
    let b = sup_operator_norm(&q, NormTarget::Plain, &opts).unwrap();
    assert!(b.upper >= 6.0 && b.upper <= 6.0 + 1e-9);

    let x1 = PolyField::coordinate(2, 0);
    let q = CoefficientMatrix::new(2, 2, vec![x1, z.clone(), z.clone(), z]).unwrap();
    let b = sup_operator_norm(&q, NormTarget::Plain, &opts).unwrap();
    assert!(b.upper >= 1.0 && b.upper <= 1.0 + opts.tol * 1.01);
}

// characteristic polynomial of an integer matrix by Faddeev–LeVerrier,
// exact in i128
fn char_poly(a: &[[i64; 4]; 4]) -> [i128; 5] {
    let n = 4;
    let mut c = [0i128; 5];
    c[4] = 1;
    let mut m = [[0i128; 4]; 4];
    let ai: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|v| *v as i128).collect()).collect();
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I
        let mut next = [[0i128; 4]; 4];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0;
                for l in 0..n {
                    s += ai[i][l] * m[l][j];
                }
                next[i][j] = s + if i == j { c[n - k + 1] } else { 0 };
            }
        }
        m = next;
        let mut tr = 0;
        for i in 0..n {
            for l in 0..n {
                tr += ai[i][l] * m[l][i];
            }
        }
        c[n - k] = -tr / k as i128;
    }
    c
}

fn poly_roots(c: &[i128; 5], lo: f64, hi: f64) -> Vec<f64> {
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + *ci as f64);
    let steps = 40_000;
    let h = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = p(x0);
    for s in 1..=steps {
        let x1 = lo + s as f64 * h;
        let f1 = p(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = p(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

proptest! {
    #[test]
    fn jacobi_matches_characteristic_roots(entries in proptest::array::uniform10(-5i64..=5)) {
        let mut a = [[0i64; 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                a[i][j] = entries[k];
                a[j][i] = entries[k];
                k += 1;
            }
        }
        let m = Mat::from_fn(4, 4, |i, j| a[i][j] as f64);
        let (vals, _) = jacobi_eig(&m);
        let gaps = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        prop_assume!(gaps > 0.05);
        let roots = poly_roots(&char_poly(&a), -21.0, 21.0);
        prop_assert_eq!(roots.len(), 4);
        for (r, v) in roots.iter().zip(&vals) {
            prop_assert!((r - v).abs() < 1e-9, "{} vs {}", r, v);
        }
    }
}

#[test]
fn tridiagonal_path_agrees_with_jacobi() {
    let n = 150;
    let a = Mat::from_fn(n, n, |i, j| {
        let (i, j) = (i.min(j) as f64, i.max(j) as f64);
        1.0 / (1.0 + i + j) + if i == j { i / 10.0 } else { 0.0 }
    });
    let (vj, _) = jacobi_eig(&a);
    let (vt, _) = tridiagonal_eig_smallest(&a, 8);
    let (vs, _) = sym_eig_smallest(&a, 8).unwrap();
    for i in 0..8 {
        assert!((vj[i] - vt[i]).abs() < 1e-11 && (vs[i] - vj[i]).abs() < 1e-11);
    }
}

fn laplace_pencil_smallest(dim: usize, n: usize, k: usize) -> Vec<f64> {
    let g = GramMatrices::new(&Subspace::full(dim, n), 1).unwrap();
    let p = assemble_pencil(&g, &CoefficientMatrix::scalar_identity(dim, 1, 0.0), None, None).unwrap();
    gen_eig_smallest(&p.lhs, g.mass_factor(), k).unwrap().values()
}

#[test]
fn laplacian_pencil_reproduces_dirichlet_spectrum() {
    let pi2 = std::f64::consts::PI.powi(2);
    let v = laplace_pencil_smallest(1, 8, 1);
    assert!(v[0] >= pi2 && v[0] <= pi2 + 1e-4, "{}", v[0]);
    let v = laplace_pencil_smallest(1, 5, 1);
    assert!(v[0] >= pi2 && v[0] - pi2 < 1e-3);
    let v = laplace_pencil_smallest(2, 8, 1);
    assert!(v[0] - 2.0 * pi2 >= 0.0 && v[0] - 2.0 * pi2 <= 1e-3, "{}", v[0]);
    let v = laplace_pencil_smallest(2, 5, 1);
    assert!(v[0] >= 2.0 * pi2);
}

// −Δ − 2q for a scalar polynomial q: nested spaces give non-increasing
// Ritz values
fn self_adjoint_smallest(n: usize, q: &CoefficientMatrix, k: usize) -> Vec<f64> {
    let g = GramMatrices::new(&Subspace::full(2, n), 1).unwrap();
    let mut p = g.stiffness_full();
    let qm = assemble_q(&g, q, None).unwrap();
    p.axpy(-2.0, &qm);
    p.symmetrize();
    gen_eig_smallest(&p, g.mass_factor(), k).unwrap().values()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ritz_values_decrease_with_degree(c0 in -10.0f64..10.0, c1 in -10.0f64..10.0, c2 in -10.0f64..10.0) {
        let x = PolyField::coordinate(2, 0);
        let y = PolyField::coordinate(2, 1);
        let q = PolyField::constant(2, c0).add_scaled(c1, &x).unwrap().add_scaled(c2, &x.product(&y).unwrap()).unwrap();
        let q = CoefficientMatrix::new(2, 1, vec![q]).unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for n in [3, 5, 7, 9] {
            let v = self_adjoint_smallest(n, &q, 5);
            if let Some(p) = &prev {
                for (a, b) in v.iter().zip(p) {
                    prop_assert!(*a <= b + 1e-10 * b.abs().max(1.0), "N={}: {} > {}", n, a, b);
                }
            }
            prev = Some(v);
        }
    }
}

#[test]
fn generalized_pairs_have_small_residual_enclosures() {
    let g = GramMatrices::new(&Subspace::full(2, 10), 1).unwrap();
    let x = PolyField::coordinate(2, 0);
    let q = CoefficientMatrix::new(2, 1, vec![x.scaled(7.0)]).unwrap();
    let p = assemble_pencil(&g, &q, None, None).unwrap();
    let s = gen_eig_smallest(&p.lhs, g.mass_factor(), 6).unwrap();
    for pair in &s.pairs {
        assert!(pair.enclosure.contains(pair.value));
        assert!(pair.enclosure.width() < 1e-8 * pair.value.abs().max(1.0));
        let mv = g.apply_mass(&pair.vector).unwrap();
        let nrm: f64 = mv.iter().zip(&pair.vector).map(|(a, b)| a * b).sum();
        assert!((nrm - 1.0).abs() < 1e-10);
    }
    assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
}
