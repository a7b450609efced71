//! CGF of `gamma = q I - p0`, with `I` the sum of independent interferer powers.
//!
//! Member CGFs are combined term by term with the chain-rule factors of the
//! arguments `q t` (interferers) and `-t` (desired signal):
//!
//! ```text
//! K(t)    = sum_k K_k(q t)        + K_0(-t)
//! K'(t)   = sum_k q   K_k'(q t)   - K_0'(-t)
//! K''(t)  = sum_k q^2 K_k''(q t)  + K_0''(-t)
//! K'''(t) = sum_k q^3 K_k'''(q t) - K_0'''(-t)
//! ```

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fading::PowerDistribution;
use crate::model::{CgfEval, CumulantModel, Strip};
use crate::scalar::{compensated_sum, CompensatedSum, Scalar};

/// A link with one desired signal, `L >= 1` independent interferers, an SIR
/// threshold `q` (linear) and an optional noise power (mW, zero for pure SIR).
#[derive(Clone, Debug, PartialEq)]
pub struct SirScenario<T> {
    pub desired: PowerDistribution<T>,
    pub interferers: Vec<PowerDistribution<T>>,
    pub threshold_q: T,
    pub noise_power: T,
}

impl<T: Scalar> SirScenario<T> {
    pub fn new(desired: PowerDistribution<T>, interferers: Vec<PowerDistribution<T>>, threshold_q: T) -> Result<Self> {
        Self::with_noise(desired, interferers, threshold_q, T::zero())
    }

    pub fn with_noise(
        desired: PowerDistribution<T>,
        interferers: Vec<PowerDistribution<T>>,
        threshold_q: T,
        noise_power: T,
    ) -> Result<Self> {
        let s = Self {
            desired,
            interferers,
            threshold_q,
            noise_power,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.interferers.is_empty() {
            return Err(Error::InvalidScenario("at least one interferer is required".into()));
        }
        if !(self.threshold_q > T::zero() && self.threshold_q.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "SIR threshold must be positive and finite, got {}",
                self.threshold_q
            )));
        }
        if !(self.noise_power >= T::zero() && self.noise_power.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "noise power must be nonnegative and finite, got {}",
                self.noise_power
            )));
        }
        Ok(())
    }

    /// Same links at a different threshold.
    pub fn at_threshold(&self, threshold_q: T) -> Result<Self> {
        Self::with_noise(self.desired, self.interferers.clone(), threshold_q, self.noise_power)
    }

    pub fn number_of_interferers(&self) -> usize {
        self.interferers.len()
    }
}

/// The cumulant model of `gamma = q I - p0` for one scenario.
///
/// Noise does not enter the CGF; SINR outage shifts the evaluation point
/// instead (`Pr(gamma > -q N0)`).
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeCgf<T> {
    desired: PowerDistribution<T>,
    interferers: Vec<PowerDistribution<T>>,
    q: T,
    strip: Strip<T>,
    mean: T,
    variance: T,
}

/// Builds the composite CGF of a scenario.
pub fn build_composite<T: Scalar>(s: &SirScenario<T>) -> Result<CompositeCgf<T>> {
    s.validate()?;
    let q = s.threshold_q;
    let upper = s
        .interferers
        .iter()
        .map(|d| d.strip().upper / q)
        .fold(T::infinity(), T::min);
    let lower = -s.desired.strip().upper;
    let mean = q * compensated_sum(s.interferers.iter().map(|d| d.mean())) - s.desired.mean();
    let variance = q * q * compensated_sum(s.interferers.iter().map(|d| d.variance())) + s.desired.variance();
    Ok(CompositeCgf {
        desired: s.desired,
        interferers: s.interferers.clone(),
        q,
        strip: Strip::new(lower, upper),
        mean,
        variance,
    })
}

impl<T: Scalar> CompositeCgf<T> {
    pub fn threshold_q(&self) -> T {
        self.q
    }

    pub fn desired(&self) -> &PowerDistribution<T> {
        &self.desired
    }

    pub fn interferers(&self) -> &[PowerDistribution<T>] {
        &self.interferers
    }

    /// `sum_k q^n f_k(q t) + (-1)^n f_0(-t)` for the n-th derivative `f`.
    fn combine(&self, t: T, order: i32, f: impl Fn(&PowerDistribution<T>, T) -> Result<T>) -> Result<T> {
        self.strip.check(t)?;
        let qt = self.q * t;
        let scale = self.q.powi(order);
        let mut acc = CompensatedSum::new();
        for d in &self.interferers {
            acc.add(scale * f(d, qt)?);
        }
        let own = f(&self.desired, -t)?;
        acc.add(if order % 2 == 0 { own } else { -own });
        Ok(acc.value())
    }
}

/// Third derivative of the composite CGF.
pub fn cgf_d3_composite<T: Scalar>(c: &CompositeCgf<T>, t: T) -> Result<T> {
    c.cgf_d3(t)
}

/// `M_gamma(j t)` of the composite variable.
pub fn characteristic_function_composite<T: Scalar>(c: &CompositeCgf<T>, t: T) -> Complex<T> {
    c.characteristic_function(t)
}

impl<T: Scalar> CumulantModel<T> for CompositeCgf<T> {
    fn cgf(&self, t: T) -> Result<T> {
        self.combine(t, 0, |d, s| d.cgf(s))
    }

    fn cgf_d1(&self, t: T) -> Result<T> {
        self.combine(t, 1, |d, s| d.cgf_d1(s))
    }

    fn cgf_d2(&self, t: T) -> Result<T> {
        self.combine(t, 2, |d, s| d.cgf_d2(s))
    }

    fn cgf_d3(&self, t: T) -> Result<T> {
        self.combine(t, 3, |d, s| d.cgf_d3(s))
    }

    fn strip(&self) -> Strip<T> {
        self.strip
    }

    fn mean(&self) -> T {
        self.mean
    }

    fn variance(&self) -> T {
        self.variance
    }

    fn log_characteristic_function(&self, t: T) -> Complex<T> {
        let qt = self.q * t;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for z in self
            .interferers
            .iter()
            .map(|d| d.log_characteristic_function(qt))
            .chain(std::iter::once(self.desired.log_characteristic_function(-t)))
        {
            re.add(z.re);
            im.add(z.im);
        }
        Complex::new(re.value(), im.value())
    }

    fn eval(&self, t: T) -> Result<CgfEval<T>> {
        self.strip.check(t)?;
        let qt = self.q * t;
        let (q1, q2) = (self.q, self.q * self.q);
        let (mut k, mut k1, mut k2) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
        for d in &self.interferers {
            k.add(d.cgf(qt)?);
            k1.add(q1 * d.cgf_d1(qt)?);
            k2.add(q2 * d.cgf_d2(qt)?);
        }
        k.add(self.desired.cgf(-t)?);
        k1.add(-self.desired.cgf_d1(-t)?);
        k2.add(self.desired.cgf_d2(-t)?);
        Ok(CgfEval {
            t,
            k: k.value(),
            k1: k1.value(),
            k2: k2.value(),
        })
    }
}
