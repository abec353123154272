//! Scalar abstraction shared by the tree learner and the geometry helpers.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, NumAssignOps};

/// Field-like number the learner can run on: `f32`, `f64`, or an exact
/// rational. Only ring operations, division and ordering are needed.
pub trait Scalar: Copy + PartialOrd + Num + NumAssignOps + Debug + Display + Send + Sync + 'static {
    fn from_count(n: usize) -> Self;

    fn to_f64(self) -> f64;

    /// Improvements at or below this, relative to `scale`, are treated as
    /// zero. Floats absorb cancellation noise; exact types use zero.
    fn noise_floor(scale: Self) -> Self;
}

impl Scalar for f64 {
    fn from_count(n: usize) -> Self {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn noise_floor(scale: Self) -> Self {
        scale.abs() * 1e-12
    }
}

impl Scalar for f32 {
    fn from_count(n: usize) -> Self {
        n as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn noise_floor(scale: Self) -> Self {
        scale.abs() * 1e-6
    }
}

impl Scalar for Ratio<i128> {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(n as i128)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn noise_floor(_scale: Self) -> Self {
        Ratio::from_integer(0)
    }
}
