use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[inline]
fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

/// Closed interval `[lo, hi]` of reals.
///
/// Every operation rounds the computed endpoints one ulp outward, which
/// contains the exact result because round-to-nearest is off by at most half
/// an ulp.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain("interval with lo > hi or NaN endpoint"));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses a decimal constant whose nearest double is `x`.
    pub fn enclose(x: f64) -> Self {
        Interval { lo: down(x), hi: up(x) }
    }

    /// `[x − r, x + r]`, rounded outward.
    pub fn ball(x: f64, r: f64) -> Self {
        let r = r.abs();
        Interval { lo: down(x - r), hi: up(x + r) }
    }

    pub const ZERO: Interval = Interval::point(0.0);
    pub const ONE: Interval = Interval::point(1.0);

    pub fn pi() -> Self {
        Interval { lo: core::f64::consts::PI, hi: up(core::f64::consts::PI) }
    }

    pub fn mid(self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn rad(self) -> f64 {
        up(0.5 * (self.hi - self.lo))
    }

    /// Largest absolute value.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn abs(self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval { lo: down(a.lo * a.lo).max(0.0), hi: up(a.hi * a.hi) }
    }

    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Domain("sqrt of an interval reaching below zero"));
        }
        Ok(Interval { lo: down(libm::sqrt(self.lo)).max(0.0), hi: up(libm::sqrt(self.hi)) })
    }

    /// Square root of a quantity known to be non-negative; rounding below
    /// zero is clamped away.
    pub fn sqrt_nonneg(self) -> Interval {
        let c = self.nonneg();
        Interval { lo: down(libm::sqrt(c.lo)).max(0.0), hi: up(libm::sqrt(c.hi)) }
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE / self
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Clamps the lower end at zero; valid when the enclosed quantity is
    /// known to be non-negative.
    pub fn nonneg(self) -> Interval {
        Interval { lo: self.lo.max(0.0), hi: self.hi.max(0.0) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }
}

impl AddAssign for Interval {
    fn add_assign(&mut self, o: Interval) {
        *self = *self + o;
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo - o.hi), hi: up(self.hi - o.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in p {
            // 0·∞ only arises from an exact zero factor
            let v = if v.is_nan() { 0.0 } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Interval { lo: down(lo), hi: up(hi) }
    }
}

impl Div for Interval {
    type Output = Result<Interval>;
    fn div(self, o: Interval) -> Result<Interval> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Err(Error::Domain("division by an interval containing zero"));
        }
        let p = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in p {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(Interval { lo: down(lo), hi: up(hi) })
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            fn $f(self, o: f64) -> Interval { $tr::$f(self, Interval::point(o)) }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            fn $f(self, o: Interval) -> Interval { $tr::$f(Interval::point(self), o) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul);

/// Upper bound on `γ_n = n·u/(1 − n·u)`, `u = 2⁻⁵³`, the relative error
/// factor of an `n`-term floating-point sum of products.
pub fn gamma(n: usize) -> f64 {
    let nu = (n as f64 + 1.0) * (f64::EPSILON * 0.5);
    up(nu / (1.0 - nu) * 1.01)
}
