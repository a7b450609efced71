//! Standard normal density and tail functions on top of `erfc`.

use crate::scalar::Scalar;

#[inline]
pub fn pdf<T: Scalar>(x: T) -> T {
    (-T::lit(0.5) * x * x).exp() / (T::TAU()).sqrt()
}

/// `Phi(x)`.
#[inline]
pub fn cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

/// `1 - Phi(x)` without cancellation in the upper tail.
#[inline]
pub fn sf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}
