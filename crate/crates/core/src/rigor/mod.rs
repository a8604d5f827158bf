//! Outward-rounded interval arithmetic and rigorous sup-norm bounds.

mod interval;
pub mod supnorm;

pub use interval::{gamma, Interval};
pub use supnorm::{sup_operator_norm, NormTarget, SupNormBound, SupNormOptions};
