//! Floating-point abstraction shared by every numerical routine in the crate.
//!
//! All of the cumulant, saddle point and quadrature code is written against
//! [`Scalar`], which is implemented for `f32` and `f64`. Special functions and
//! random variate generation are delegated to `libm` and `rand_distr` through
//! the trait so that generic code never needs extra `where` clauses.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// Real scalar type: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Prepared gamma variate generator.
    type GammaSampler: Clone + Debug + Send + Sync;

    /// Converts an `f64` constant. Values outside the range of `Self` saturate
    /// to infinity, which only matters for `f32`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| {
            if v > 0.0 {
                Self::infinity()
            } else {
                Self::neg_infinity()
            }
        })
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Complementary error function.
    fn erfc(self) -> Self;

    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma sampler with the given shape and scale. Both must be positive and finite.
    fn gamma_sampler(shape: Self, scale: Self) -> Self::GammaSampler;

    fn sample_gamma<R: Rng + ?Sized>(sampler: &Self::GammaSampler, rng: &mut R) -> Self;
}

impl Scalar for f64 {
    type GammaSampler = Gamma<f64>;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn gamma_sampler(shape: Self, scale: Self) -> Self::GammaSampler {
        Gamma::new(shape, scale).expect("gamma parameters validated by the caller")
    }

    #[inline]
    fn sample_gamma<R: Rng + ?Sized>(sampler: &Self::GammaSampler, rng: &mut R) -> Self {
        sampler.sample(rng)
    }
}

impl Scalar for f32 {
    type GammaSampler = Gamma<f32>;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn gamma_sampler(shape: Self, scale: Self) -> Self::GammaSampler {
        Gamma::new(shape, scale).expect("gamma parameters validated by the caller")
    }

    #[inline]
    fn sample_gamma<R: Rng + ?Sized>(sampler: &Self::GammaSampler, rng: &mut R) -> Self {
        sampler.sample(rng)
    }
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Sums an iterator with compensated accumulation.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}
