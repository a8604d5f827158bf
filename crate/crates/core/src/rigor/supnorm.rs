use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::Interval;
use crate::assembly::CoefficientMatrix;
use crate::error::{invalid, Result};
use crate::spectral::poly::AxisEval;
use crate::spectral::PolyField;

/// Which pointwise matrix norm to bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormTarget {
    /// `sup ‖q(x)‖₂`.
    Plain,
    /// `sup ‖q(x) + q(x)ᵀ‖₂`.
    Symmetrized,
    /// `sup ‖σI − (q(x) + q(x)ᵀ)‖₂`.
    Shifted(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupNormOptions {
    /// Stop once the upper bound is within `tol·max(1, lower)` of the best
    /// sampled value.
    pub tol: f64,
    pub max_depth: usize,
    pub max_boxes: usize,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        SupNormOptions { tol: 1e-4, max_depth: 24, max_boxes: 400_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupNormBound {
    /// Rigorous upper bound.
    pub upper: f64,
    /// Largest norm found at a sample point (a lower bound for the sup).
    pub sampled: f64,
    /// Set when the depth or box budget ran out before reaching `tol`.
    pub coarse: bool,
    pub boxes: usize,
}

struct Cell {
    upper: f64,
    lo: [f64; 2],
    hi: [f64; 2],
    depth: usize,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.upper.total_cmp(&o.upper) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.upper.total_cmp(&o.upper)
    }
}

struct Entry {
    poly: PolyField,
    hess: [f64; 3],
    err_val: f64,
    err_grad: f64,
}

/// Upper bound of `sup_x ‖T(q(x))‖₂` over the unit box by branch and bound.
///
/// Each entry is enclosed on a box by its second-order Taylor form around
/// the center (with a global Hessian bound), and the matrix norm of the
/// entry enclosures is bounded in closed form for `m ≤ 2` and by
/// `√(‖·‖₁‖·‖∞)` otherwise.
pub fn sup_operator_norm(
    q: &CoefficientMatrix,
    target: NormTarget,
    opts: &SupNormOptions,
) -> Result<SupNormBound> {
    if !(opts.tol > 0.0) {
        return Err(invalid("sup-norm tolerance must be positive"));
    }
    let (mat, symmetric) = match target {
        NormTarget::Plain => (q.clone(), false),
        NormTarget::Symmetrized => (q.symmetrized()?, true),
        NormTarget::Shifted(s) => (q.shifted(s)?, true),
    };
    let dim = q.dim;
    let m = q.m;
    let deg = mat.degree();
    let entries: Vec<Entry> = mat
        .entries
        .iter()
        .map(|e| {
            let poly = e.raised(deg);
            let (err_val, err_grad) = poly.eval_error();
            Entry { hess: poly.hessian_bound(), poly, err_val, err_grad }
        })
        .collect();

    let eval_box = |lo: &[f64; 2], hi: &[f64; 2]| -> (f64, f64) {
        let mut c = [0.0; 2];
        let mut h = [0.0; 2];
        for d in 0..dim {
            c[d] = 0.5 * (lo[d] + hi[d]);
            h[d] = (hi[d] - c[d]).max(c[d] - lo[d]);
        }
        let ax: Vec<AxisEval> = (0..dim).map(|d| AxisEval::new(deg, c[d])).collect();
        let mut enc = Vec::with_capacity(m * m);
        let mut center = Vec::with_capacity(m * m);
        for e in &entries {
            let (v, g) = e.poly.eval_axes(&ax);
            let hi_ = Interval::point;
            let lin = (hi_(g[0].abs()) + e.err_grad) * h[0] + (hi_(g[1].abs()) + e.err_grad) * h[1];
            let quad = (hi_(e.hess[0]) * (h[0] * h[0])
                + hi_(2.0 * e.hess[1]) * (h[0] * h[1])
                + hi_(e.hess[2]) * (h[1] * h[1]))
                * 0.5;
            let r = (lin + quad + e.err_val).hi;
            enc.push(Interval::point(v) + Interval::new(-r, r).unwrap_or(Interval::ZERO));
            center.push(v);
        }
        (norm_upper(&enc, m, symmetric), norm_lower(&center, m, symmetric))
    };

    let root_lo = [0.0, 0.0];
    let root_hi = [1.0, if dim == 2 { 1.0 } else { 0.0 }];
    let (u0, s0) = eval_box(&root_lo, &root_hi);
    let mut sampled = s0;
    for corner in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
        let p = [corner[0], if dim == 2 { corner[1] } else { 0.0 }];
        sampled = sampled.max(eval_box(&p, &p).1);
    }
    let mut heap = BinaryHeap::new();
    heap.push(Cell { upper: u0, lo: root_lo, hi: root_hi, depth: 0 });
    let mut frozen = f64::NEG_INFINITY;
    let mut boxes = 1usize;
    let mut coarse = false;

    while let Some(cell) = heap.pop() {
        let bound = cell.upper.max(frozen);
        if bound - sampled <= opts.tol * sampled.max(1.0) {
            return Ok(SupNormBound { upper: bound, sampled, coarse, boxes });
        }
        if cell.depth >= opts.max_depth {
            coarse = true;
            frozen = frozen.max(cell.upper);
            continue;
        }
        if boxes >= opts.max_boxes {
            coarse = true;
            return Ok(SupNormBound { upper: bound, sampled, coarse, boxes });
        }
        let mid = [0.5 * (cell.lo[0] + cell.hi[0]), 0.5 * (cell.lo[1] + cell.hi[1])];
        let splits = if dim == 2 { 4 } else { 2 };
        for k in 0..splits {
            let mut lo = cell.lo;
            let mut hi = cell.hi;
            for d in 0..dim {
                if k >> d & 1 == 0 {
                    hi[d] = mid[d];
                } else {
                    lo[d] = mid[d];
                }
            }
            let (u, s) = eval_box(&lo, &hi);
            sampled = sampled.max(s);
            boxes += 1;
            heap.push(Cell { upper: u.min(cell.upper), lo, hi, depth: cell.depth + 1 });
        }
    }
    Ok(SupNormBound { upper: frozen.max(sampled), sampled, coarse, boxes })
}

fn norm_upper(e: &[Interval], m: usize, symmetric: bool) -> f64 {
    match m {
        1 => e[0].mag(),
        2 if symmetric => {
            let (a, b, d) = (e[0], e[1].hull(e[2]), e[3]);
            let half_tr = ((a + d) * 0.5).mag();
            let disc = ((a - d) * 0.5).sqr() + b.sqr();
            let root = disc.sqrt_nonneg().hi;
            (Interval::point(half_tr) + Interval::point(root)).hi
        }
        2 => {
            // σ_max = (√((a+d)² + (c−b)²) + √((a−d)² + (b+c)²)) / 2
            let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
            let r1 = ((a + d).sqr() + (c - b).sqr()).sqrt_nonneg();
            let r2 = ((a - d).sqr() + (b + c).sqr()).sqrt_nonneg();
            ((r1 + r2) * 0.5).hi
        }
        _ => {
            let mut n1 = Interval::ZERO;
            let mut ninf = Interval::ZERO;
            for j in 0..m {
                let col = (0..m).fold(Interval::ZERO, |acc, i| acc + Interval::point(e[i * m + j].mag()));
                let row = (0..m).fold(Interval::ZERO, |acc, k| acc + Interval::point(e[j * m + k].mag()));
                n1 = n1.max(col);
                ninf = ninf.max(row);
            }
            (n1 * ninf).sqrt_nonneg().hi
        }
    }
}

/// A value not exceeding `‖A‖₂` for the float matrix `A`.
fn norm_lower(a: &[f64], m: usize, symmetric: bool) -> f64 {
    let lower = match m {
        1 => a[0].abs(),
        2 if symmetric => {
            let b = 0.5 * (a[1] + a[2]);
            (0.5 * (a[0] + a[3])).abs() + libm::hypot(0.5 * (a[0] - a[3]), b)
        }
        2 => {
            let r1 = libm::hypot(a[0] + a[3], a[2] - a[1]);
            let r2 = libm::hypot(a[0] - a[3], a[1] + a[2]);
            0.5 * (r1 + r2)
        }
        _ => (0..m)
            .map(|j| libm::sqrt((0..m).map(|i| a[i * m + j] * a[i * m + j]).sum()))
            .fold(0.0, f64::max),
    };
    // shave rounding so the sample stays below the true value
    lower * (1.0 - 8.0 * f64::EPSILON)
}
