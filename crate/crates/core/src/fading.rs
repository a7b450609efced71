//! Signal-power distributions of the supported fading families.
//!
//! Each family is described through its moment generating function. All
//! powers are linear (mW); conversion from dBm happens at the configuration
//! boundary. The three physical families reduce to Rayleigh fading (an
//! exponential power distribution) at `m = 1`, `r = 0` and `b = 0`.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CumulantModel, Strip};
use crate::scalar::Scalar;

/// Largest accepted Hoyt asymmetry `|b|`; values in `(HOYT_B_MAX, 1)` are clamped.
pub const HOYT_B_MAX: f64 = 1.0 - 1e-9;

fn check_power<T: Scalar>(family: &'static str, mean_power: T) -> Result<()> {
    if mean_power > T::zero() && mean_power.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            family,
            parameter: "mean_power",
            value: mean_power.to_f64_lossy(),
            reason: "mean power must be positive and finite".into(),
        })
    }
}

/// Nakagami-m fading: the power is Gamma distributed with shape `m` and
/// rate `m / mean_power`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NakagamiM<T> {
    m: T,
    mean_power: T,
}

impl<T: Scalar> NakagamiM<T> {
    pub fn new(m: T, mean_power: T) -> Result<Self> {
        if !(m >= T::lit(0.5) && m.is_finite()) {
            return Err(Error::InvalidParameter {
                family: "nakagami_m",
                parameter: "m",
                value: m.to_f64_lossy(),
                reason: "fading parameter m must lie in [0.5, inf)".into(),
            });
        }
        check_power("nakagami_m", mean_power)?;
        Ok(Self { m, mean_power })
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn mean_power(&self) -> T {
        self.mean_power
    }

    /// Gamma rate `m / mean_power`.
    pub fn rate(&self) -> T {
        self.m / self.mean_power
    }
}

/// Rician fading with Rice factor `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rician<T> {
    r: T,
    mean_power: T,
}

impl<T: Scalar> Rician<T> {
    pub fn new(r: T, mean_power: T) -> Result<Self> {
        if !(r >= T::zero() && r.is_finite()) {
            return Err(Error::InvalidParameter {
                family: "rician",
                parameter: "r",
                value: r.to_f64_lossy(),
                reason: "Rice factor must be nonnegative and finite".into(),
            });
        }
        check_power("rician", mean_power)?;
        Ok(Self { r, mean_power })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn mean_power(&self) -> T {
        self.mean_power
    }

    // 1 + r - mean_power * t
    #[inline]
    fn denom(&self, t: T) -> T {
        T::one() + self.r - self.mean_power * t
    }
}

/// Nakagami-q (Hoyt) fading with asymmetry `b`: the power is the sum of two
/// squared zero-mean Gaussians with variances `mean_power (1 +- b) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hoyt<T> {
    b: T,
    mean_power: T,
}

impl<T: Scalar> Hoyt<T> {
    /// `|b|` must be below one; values within `1e-9` of one are clamped to
    /// [`HOYT_B_MAX`].
    pub fn new(b: T, mean_power: T) -> Result<Self> {
        if !(b.abs() < T::one()) {
            return Err(Error::InvalidParameter {
                family: "hoyt",
                parameter: "b",
                value: b.to_f64_lossy(),
                reason: "Hoyt parameter must satisfy |b| < 1".into(),
            });
        }
        check_power("hoyt", mean_power)?;
        let max = T::lit(HOYT_B_MAX);
        Ok(Self {
            b: b.max(-max).min(max),
            mean_power,
        })
    }

    /// Maps the Nakagami-q fading parameter to `b = (1 - q^2) / (1 + q^2)`.
    pub fn from_q(q: T, mean_power: T) -> Result<Self> {
        if !(q >= T::zero() && q.is_finite()) {
            return Err(Error::InvalidParameter {
                family: "hoyt",
                parameter: "q",
                value: q.to_f64_lossy(),
                reason: "Nakagami-q parameter must be nonnegative and finite".into(),
            });
        }
        let q2 = q * q;
        let b = ((T::one() - q2) / (T::one() + q2)).min(T::lit(HOYT_B_MAX));
        Self::new(b, mean_power)
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn mean_power(&self) -> T {
        self.mean_power
    }

    /// Twice the variances of the two Gaussian components.
    #[inline]
    fn scales(&self) -> [T; 2] {
        [
            self.mean_power * (T::one() - self.b),
            self.mean_power * (T::one() + self.b),
        ]
    }
}

/// Gaussian "power" used as a regression anchor: the Lugannani-Rice
/// approximation is exact for it. Not a physical fading model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTest<T> {
    mu: T,
    sigma2: T,
}

impl<T: Scalar> GaussianTest<T> {
    pub fn new(mu: T, sigma2: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                family: "gaussian_test",
                parameter: "mu",
                value: mu.to_f64_lossy(),
                reason: "mean must be finite".into(),
            });
        }
        if !(sigma2 > T::zero() && sigma2.is_finite()) {
            return Err(Error::InvalidParameter {
                family: "gaussian_test",
                parameter: "sigma2",
                value: sigma2.to_f64_lossy(),
                reason: "variance must be positive and finite".into(),
            });
        }
        Ok(Self { mu, sigma2 })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }
}

/// Power distribution of one link (desired signal or interferer).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PowerDistribution<T> {
    NakagamiM(NakagamiM<T>),
    Rician(Rician<T>),
    Hoyt(Hoyt<T>),
    GaussianTest(GaussianTest<T>),
}

impl<T: Scalar> PowerDistribution<T> {
    pub fn nakagami_m(m: T, mean_power: T) -> Result<Self> {
        NakagamiM::new(m, mean_power).map(Self::NakagamiM)
    }

    /// Nakagami-m with `m = 1`.
    pub fn rayleigh(mean_power: T) -> Result<Self> {
        Self::nakagami_m(T::one(), mean_power)
    }

    pub fn rician(r: T, mean_power: T) -> Result<Self> {
        Rician::new(r, mean_power).map(Self::Rician)
    }

    pub fn hoyt(b: T, mean_power: T) -> Result<Self> {
        Hoyt::new(b, mean_power).map(Self::Hoyt)
    }

    pub fn gaussian_test(mu: T, sigma2: T) -> Result<Self> {
        GaussianTest::new(mu, sigma2).map(Self::GaussianTest)
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::NakagamiM(_) => "nakagami_m",
            Self::Rician(_) => "rician",
            Self::Hoyt(_) => "hoyt",
            Self::GaussianTest(_) => "gaussian_test",
        }
    }

    /// Draws one power sample. Builds a fresh [`PowerSampler`]; prefer that
    /// type in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        PowerSampler::new(self).sample(rng)
    }
}

impl<T: Scalar> CumulantModel<T> for PowerDistribution<T> {
    fn cgf(&self, t: T) -> Result<T> {
        self.strip().check(t)?;
        let half = T::lit(0.5);
        Ok(match self {
            Self::NakagamiM(d) => -d.m * (-t / d.rate()).ln_1p(),
            Self::Rician(d) => {
                let c = T::one() + d.r;
                -(-d.mean_power * t / c).ln_1p() + d.r * d.mean_power * t / d.denom(t)
            }
            Self::Hoyt(d) => {
                let [a1, a2] = d.scales();
                -half * (-a1 * t).ln_1p() - half * (-a2 * t).ln_1p()
            }
            Self::GaussianTest(d) => d.mu * t + half * d.sigma2 * t * t,
        })
    }

    fn cgf_d1(&self, t: T) -> Result<T> {
        self.strip().check(t)?;
        let half = T::lit(0.5);
        Ok(match self {
            Self::NakagamiM(d) => d.m / (d.rate() - t),
            Self::Rician(d) => {
                let den = d.denom(t);
                let c = T::one() + d.r;
                d.mean_power / den + d.r * c * d.mean_power / (den * den)
            }
            Self::Hoyt(d) => d
                .scales()
                .iter()
                .fold(T::zero(), |acc, &a| acc + half * a / (T::one() - a * t)),
            Self::GaussianTest(d) => d.mu + d.sigma2 * t,
        })
    }

    fn cgf_d2(&self, t: T) -> Result<T> {
        self.strip().check(t)?;
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        Ok(match self {
            Self::NakagamiM(d) => {
                let s = d.rate() - t;
                d.m / (s * s)
            }
            Self::Rician(d) => {
                let den = d.denom(t);
                let c = T::one() + d.r;
                let p2 = d.mean_power * d.mean_power;
                p2 / (den * den) + two * d.r * c * p2 / (den * den * den)
            }
            Self::Hoyt(d) => d.scales().iter().fold(T::zero(), |acc, &a| {
                let s = T::one() - a * t;
                acc + half * a * a / (s * s)
            }),
            Self::GaussianTest(d) => d.sigma2,
        })
    }

    fn cgf_d3(&self, t: T) -> Result<T> {
        self.strip().check(t)?;
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        Ok(match self {
            Self::NakagamiM(d) => {
                let s = d.rate() - t;
                two * d.m / (s * s * s)
            }
            Self::Rician(d) => {
                let den = d.denom(t);
                let c = T::one() + d.r;
                let p3 = d.mean_power * d.mean_power * d.mean_power;
                let den3 = den * den * den;
                two * p3 / den3 + six * d.r * c * p3 / (den3 * den)
            }
            Self::Hoyt(d) => d.scales().iter().fold(T::zero(), |acc, &a| {
                let s = T::one() - a * t;
                acc + a * a * a / (s * s * s)
            }),
            Self::GaussianTest(_) => T::zero(),
        })
    }

    fn strip(&self) -> Strip<T> {
        let upper = match self {
            Self::NakagamiM(d) => d.rate(),
            Self::Rician(d) => (T::one() + d.r) / d.mean_power,
            Self::Hoyt(d) => T::one() / (d.mean_power * (T::one() + d.b.abs())),
            Self::GaussianTest(_) => return Strip::unbounded(),
        };
        Strip::new(T::neg_infinity(), upper)
    }

    fn mean(&self) -> T {
        match self {
            Self::NakagamiM(d) => d.mean_power,
            Self::Rician(d) => d.mean_power,
            Self::Hoyt(d) => d.mean_power,
            Self::GaussianTest(d) => d.mu,
        }
    }

    fn variance(&self) -> T {
        match self {
            Self::NakagamiM(d) => d.mean_power * d.mean_power / d.m,
            Self::Rician(d) => {
                let c = T::one() + d.r;
                d.mean_power * d.mean_power * (T::one() + T::lit(2.0) * d.r) / (c * c)
            }
            Self::Hoyt(d) => d.mean_power * d.mean_power * (T::one() + d.b * d.b),
            Self::GaussianTest(d) => d.sigma2,
        }
    }

    fn log_characteristic_function(&self, t: T) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let half = T::lit(0.5);
        match self {
            // Re(1 - jt/lambda) = 1 keeps the principal log continuous in t.
            Self::NakagamiM(d) => (one - Complex::new(T::zero(), t / d.rate())).ln() * (-d.m),
            Self::Rician(d) => {
                let c = T::one() + d.r;
                let den = Complex::new(c, -d.mean_power * t);
                Complex::new(c.ln(), T::zero()) - den.ln() + Complex::new(T::zero(), d.r * d.mean_power * t) / den
            }
            Self::Hoyt(d) => d.scales().iter().fold(Complex::new(T::zero(), T::zero()), |acc, &a| {
                acc - Complex::new(T::one(), -a * t).ln() * half
            }),
            Self::GaussianTest(d) => Complex::new(-half * d.sigma2 * t * t, d.mu * t),
        }
    }
}

/// Power sampler with precomputed constants.
///
/// Constructions: Nakagami-m draws Gamma(m, mean_power / m); Rician draws
/// `X^2 + Y^2` with `X ~ N(nu, s^2)`, `Y ~ N(0, s^2)`, `nu^2 = r P / (1 + r)`,
/// `s^2 = P / (2 (1 + r))`; Hoyt draws `X^2 + Y^2` with zero-mean components
/// of variance `P (1 +- b) / 2`.
#[derive(Clone, Debug)]
pub enum PowerSampler<T: Scalar> {
    Gamma(T::GammaSampler),
    Rician { nu: T, sigma: T },
    Hoyt { sigma_x: T, sigma_y: T },
    Gaussian { mu: T, sigma: T },
}

impl<T: Scalar> PowerSampler<T> {
    pub fn new(d: &PowerDistribution<T>) -> Self {
        let half = T::lit(0.5);
        match d {
            PowerDistribution::NakagamiM(n) => Self::Gamma(T::gamma_sampler(n.m, n.mean_power / n.m)),
            PowerDistribution::Rician(r) => {
                let c = T::one() + r.r;
                Self::Rician {
                    nu: (r.r * r.mean_power / c).sqrt(),
                    sigma: (half * r.mean_power / c).sqrt(),
                }
            }
            PowerDistribution::Hoyt(h) => {
                let [a1, a2] = h.scales();
                Self::Hoyt {
                    sigma_x: (half * a2).sqrt(),
                    sigma_y: (half * a1).sqrt(),
                }
            }
            PowerDistribution::GaussianTest(g) => Self::Gaussian {
                mu: g.mu,
                sigma: g.sigma2.sqrt(),
            },
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            Self::Gamma(g) => T::sample_gamma(g, rng),
            Self::Rician { nu, sigma } => {
                let x = *nu + *sigma * T::sample_standard_normal(rng);
                let y = *sigma * T::sample_standard_normal(rng);
                x * x + y * y
            }
            Self::Hoyt { sigma_x, sigma_y } => {
                let x = *sigma_x * T::sample_standard_normal(rng);
                let y = *sigma_y * T::sample_standard_normal(rng);
                x * x + y * y
            }
            Self::Gaussian { mu, sigma } => *mu + *sigma * T::sample_standard_normal(rng),
        }
    }
}
