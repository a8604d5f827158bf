//! Two-sided eigenvalue bounds from a projection-error constant, and the
//! spectral gap search.
//!
//! For the shifted problem with `σ > ‖Q + Q*‖`, every discrete eigenvalue
//! `λ_h` gives the lower bound
//! `(λ_h + σ) / (1 + C_{M_σ}² (λ_h + σ)) − σ` for the exact one, where
//! `C_{M_σ} = C_h (1 + (‖σ − (Q+Q*)‖ + C_p² ‖Q‖²) / (λ_h^{(1)} + σ))`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::rigor::Interval;

/// Where the interpolation constant `C_h` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ChSource {
    /// Published value for `N ∈ {60, 80, 100}`.
    Table,
    /// `1/√((2N+5)(2N+9))`, the first omitted mode's ratio; not proven.
    Heuristic,
    /// Supplied by the user.
    User,
}

/// Published `C_h` values.
pub const CH_TABLE: [(usize, f64); 3] = [(60, 7.88e-3), (80, 5.99e-3), (100, 4.84e-3)];

/// `C_h` from the published table.
pub fn ch_table(n: usize) -> Result<Interval> {
    CH_TABLE
        .iter()
        .find(|(k, _)| *k == n)
        .map(|(_, v)| Interval::enclose(*v))
        .ok_or(Error::TableMiss(n))
}

/// Heuristic `C_h = 1/√((2N+5)(2N+9))`.
pub fn ch_heuristic(n: usize) -> Interval {
    let p = Interval::point((2 * n + 5) as f64) * Interval::point((2 * n + 9) as f64);
    (Interval::ONE / p.sqrt_nonneg()).unwrap_or(Interval::point(f64::INFINITY))
}

/// Poincaré constant `1/(π√n)` of the unit box in `n` dimensions.
pub fn poincare_constant(dim: usize) -> Interval {
    match dim {
        1 => Interval::enclose(0.318_309_886_183_790_671_537_767_526_745_028_7),
        2 => Interval::enclose(0.225_079_079_039_276_517_388_799_797_751_685_1),
        _ => {
            let d = Interval::point(dim as f64).sqrt_nonneg();
            (Interval::ONE / (Interval::pi() * d)).unwrap_or(Interval::point(f64::INFINITY))
        }
    }
}

/// Constants entering the bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LiuConstants {
    pub c_p: Interval,
    pub c_h: Interval,
    pub sigma: Interval,
    /// `‖Q‖_{B(X)}`.
    pub norm_q: Interval,
    /// `‖σ − (Q + Q*)‖_{B(X)}`.
    pub norm_shift: Interval,
}

/// `C_{M_σ}`, decreasing in `λ_h^{(1)}`; callers use the upper end.
pub fn cms(c: &LiuConstants, lambda_h1: Interval) -> Result<Interval> {
    let denom = lambda_h1 + c.sigma;
    if denom.lo <= 0.0 {
        return Err(invalid("λ_h1 + σ must be positive"));
    }
    let num = c.norm_shift + c.c_p.sqr() * c.norm_q.sqr();
    Ok(c.c_h * (Interval::ONE + (num / denom)?))
}

/// `(λ + σ)/(1 + C²(λ + σ)) − σ`. Increasing in `λ` and decreasing in `C`,
/// so the result's lower end uses `λ.lo` and `C.hi`.
pub fn liu_lower(lambda_h: Interval, cms: Interval, sigma: Interval) -> Result<Interval> {
    let f = |lam: f64, c: f64| -> Result<Interval> {
        let s = Interval::point(lam) + sigma;
        let c = Interval::point(c);
        Ok((s / (Interval::ONE + c.sqr() * s))? - sigma)
    };
    let lo = f(lambda_h.lo, cms.hi)?;
    let hi = f(lambda_h.hi, cms.lo)?;
    Interval::new(lo.lo, hi.hi.max(lo.lo))
}

/// Per-index lower and upper bounds of the exact eigenvalues.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigBounds {
    pub lower: Vec<Interval>,
    pub upper: Vec<Interval>,
}

/// Bounds for each enclosed discrete eigenvalue. The upper bound is the
/// discrete eigenvalue enclosure itself.
pub fn lower_upper_bounds(enclosures: &[Interval], c: &LiuConstants, cms: Interval) -> Result<EigBounds> {
    let lower = enclosures
        .iter()
        .map(|e| liu_lower(*e, cms, c.sigma))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigBounds { lower, upper: enclosures.to_vec() })
}

/// A verified separation `upper(j−1) < lower(j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapCertificate {
    /// 1-based index counted with multiplicity.
    pub j: usize,
    /// The same index counting clusters of numerically equal eigenvalues once.
    pub j_distinct: usize,
    /// `ν = upper(j−1) ≥ λ^{(j−1)}`.
    pub nu: Interval,
    /// `lower(j) ≤ λ^{(j)}`.
    pub lower_j: Interval,
}

/// Smallest `j ≥ 2` with `upper(j−1).hi < lower(j).lo`.
pub fn find_gap(bounds: &EigBounds) -> Option<GapCertificate> {
    let k = bounds.lower.len().min(bounds.upper.len());
    (2..=k).find_map(|j| {
        let nu = bounds.upper[j - 2];
        let lj = bounds.lower[j - 1];
        (nu.hi < lj.lo).then(|| GapCertificate {
            j,
            j_distinct: distinct_index(&bounds.upper[..j]),
            nu,
            lower_j: lj,
        })
    })
}

/// Position of the last entry when values within a relative `1e-6` of their
/// predecessor are merged.
fn distinct_index(values: &[Interval]) -> usize {
    let mut count = 1;
    for w in values.windows(2) {
        let (a, b) = (w[0].mid(), w[1].mid());
        if (b - a).abs() > 1e-6 * a.abs().max(b.abs()).max(1.0) {
            count += 1;
        }
    }
    count
}

/// `‖L⁻¹‖ ≤ 1/√λ` for a certified positive lower bound `λ`.
pub fn inverse_norm_bound(lambda_lower: Interval) -> Result<Interval> {
    if lambda_lower.lo <= 0.0 {
        return Err(invalid("lower bound must be positive to bound the inverse"));
    }
    let lo = Interval::point(lambda_lower.lo);
    let hi = Interval::point(lambda_lower.hi);
    let top = (Interval::ONE / lo.sqrt_nonneg())?;
    let bottom = (Interval::ONE / hi.sqrt_nonneg())?;
    Interval::new(bottom.lo, top.hi)
}
