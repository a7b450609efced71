//! The interface shared by single power distributions and the composite
//! variable `gamma = q I - p0`: a cumulant generating function with its
//! derivatives, the open interval on which it exists, and the matching
//! characteristic function.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Open interval `(lower, upper)` of `t` on which the MGF is finite.
///
/// Either bound may be infinite. A valid strip always contains zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Strip<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> Strip<T> {
    pub fn new(lower: T, upper: T) -> Self {
        debug_assert!(lower < T::zero() && upper > T::zero());
        Self { lower, upper }
    }

    pub fn unbounded() -> Self {
        Self::new(T::neg_infinity(), T::infinity())
    }

    #[inline]
    pub fn contains(&self, t: T) -> bool {
        t > self.lower && t < self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::new(self.lower.max(other.lower), self.upper.min(other.upper))
    }

    pub(crate) fn check(&self, t: T) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::StripViolation {
                t: t.to_f64_lossy(),
                lower: self.lower.to_f64_lossy(),
                upper: self.upper.to_f64_lossy(),
            })
        }
    }
}

/// `(K(t), K'(t), K''(t))` evaluated together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgfEval<T> {
    pub t: T,
    pub k: T,
    pub k1: T,
    pub k2: T,
}

/// A random variable described by its cumulant generating function.
///
/// Every method taking `t` fails with [`Error::StripViolation`] when `t` is
/// not strictly inside [`CumulantModel::strip`].
pub trait CumulantModel<T: Scalar> {
    fn cgf(&self, t: T) -> Result<T>;
    fn cgf_d1(&self, t: T) -> Result<T>;
    fn cgf_d2(&self, t: T) -> Result<T>;
    fn cgf_d3(&self, t: T) -> Result<T>;
    fn strip(&self) -> Strip<T>;
    fn mean(&self) -> T;
    fn variance(&self) -> T;

    /// Principal-branch `log M(jt)`. Defined for every real `t`.
    fn log_characteristic_function(&self, t: T) -> Complex<T>;

    fn characteristic_function(&self, t: T) -> Complex<T> {
        self.log_characteristic_function(t).exp()
    }

    fn eval(&self, t: T) -> Result<CgfEval<T>> {
        Ok(CgfEval {
            t,
            k: self.cgf(t)?,
            k1: self.cgf_d1(t)?,
            k2: self.cgf_d2(t)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_is_open() {
        let s = Strip::new(-1.0, 2.0);
        assert!(s.contains(0.0));
        assert!(!s.contains(2.0));
        assert!(!s.contains(-1.0));
        assert!(matches!(s.check(2.5), Err(Error::StripViolation { .. })));
        assert!(Strip::<f64>::unbounded().contains(1e300));
        assert_eq!(s.intersect(&Strip::new(-0.5, 5.0)), Strip::new(-0.5, 2.0));
    }
}
