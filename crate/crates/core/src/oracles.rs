//! Reference computations independent of the saddle point path: numerical
//! Gil-Pelaez inversion, Monte Carlo simulation and the exponential-signal
//! closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::composite::SirScenario;
use crate::error::{Error, Result};
use crate::fading::{PowerDistribution, PowerSampler};
use crate::model::CumulantModel;
use crate::quadrature::{try_integrate, wynn_epsilon, QuadratureConfig};
use crate::scalar::{CompensatedSum, Scalar};

/// Identifier of the Monte Carlo random stream layout. Batch `b` draws from
/// `ChaCha8Rng::seed_from_u64(seed)` with stream number `b`.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/stream=batch";

const BODY_PANELS: usize = 16;
const MAX_TAIL_INTERVALS: usize = 2000;
const WYNN_WINDOW: usize = 25;

/// Result of a Gil-Pelaez inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionResult<T> {
    pub probability: T,
    pub error_estimate: T,
    pub clamped: bool,
}

/// `Pr(X > x)` by numerical inversion of the characteristic function:
///
/// ```text
/// Q(x) = 1/2 + (1/pi) int_0^inf Im{M(jt) e^{-jtx}} / t dt
/// ```
///
/// The integral is mapped to `theta in (0, pi/2)` with `t = tan(theta)` and
/// integrated with adaptive Gauss-Legendre panels. For `x != 0` the
/// integrand keeps oscillating with frequency `|x|`; beyond a cut-off the
/// remaining tail is summed half-period by half-period and extrapolated with
/// the epsilon algorithm.
pub fn gil_pelaez_ccdf<T, M>(model: &M, x: T, cfg: &QuadratureConfig<T>) -> Result<InversionResult<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    cfg.validate()?;
    let mean = model.mean();
    let integrand_t = |t: T| -> T {
        if t == T::zero() {
            return mean - x;
        }
        let log_m = model.log_characteristic_function(t);
        let phase = log_m.im - t * x;
        log_m.re.exp() * phase.sin() / t
    };

    let cutoff = if x == T::zero() {
        None
    } else {
        let strip = model.strip();
        let mut feature = T::one() / model.variance().sqrt();
        for b in [strip.lower, strip.upper] {
            if b.is_finite() {
                feature = feature.max(b.abs());
            }
        }
        Some((T::lit(8.0) * T::PI() / x.abs()).max(T::lit(10.0) * feature))
    };

    let theta_end = cutoff.map_or(T::FRAC_PI_2(), |c| c.atan());
    let body = try_integrate(
        |theta: T| {
            let t = theta.tan();
            Ok(integrand_t(t) * (T::one() + t * t))
        },
        T::zero(),
        theta_end,
        BODY_PANELS,
        cfg,
    )?;

    let (mut integral, mut error) = (body.value, body.error_estimate);
    if let Some(start) = cutoff {
        let (tail, tail_error) = oscillatory_tail(model, &integrand_t, start, x, integral, cfg)?;
        integral = integral + tail;
        error = error + tail_error;
    }
    let raw = T::lit(0.5) + integral / T::PI();
    let probability = raw.max(T::zero()).min(T::one());
    Ok(InversionResult {
        probability,
        error_estimate: error / T::PI(),
        clamped: probability != raw,
    })
}

fn oscillatory_tail<T, M, F>(
    model: &M,
    integrand: &F,
    start: T,
    x: T,
    body: T,
    cfg: &QuadratureConfig<T>,
) -> Result<(T, T)>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
    F: Fn(T) -> T,
{
    let half_period = T::PI() / x.abs();
    let piece_cfg = QuadratureConfig { max_panels: 64, ..*cfg };
    let mut sums: Vec<T> = Vec::new();
    let mut running = CompensatedSum::new();
    let mut previous_estimate: Option<T> = None;
    let mut settled = 0;
    let mut lo = start;
    for _ in 0..MAX_TAIL_INTERVALS {
        let hi = lo + half_period;
        let piece = try_integrate(|t| Ok(integrand(t)), lo, hi, 1, &piece_cfg)?;
        running.add(piece.value);
        sums.push(running.value());
        lo = hi;

        // |integrand| <= |M(jt)| / t; the envelope is eventually decreasing,
        // so the alternating remainder is below one half-period's worth.
        let envelope = model.log_characteristic_function(lo).re.exp() / lo;
        let target = cfg.abs_tol.max(cfg.rel_tol * (body + running.value()).abs());
        if envelope * half_period < T::lit(0.01) * target {
            return Ok((running.value(), envelope * half_period));
        }
        if sums.len() >= 3 {
            let window = &sums[sums.len().saturating_sub(WYNN_WINDOW)..];
            let estimate = wynn_epsilon(window);
            if let Some(prev) = previous_estimate {
                let change = (estimate - prev).abs();
                if change <= target {
                    settled += 1;
                    if settled >= 2 {
                        return Ok((estimate, change));
                    }
                } else {
                    settled = 0;
                }
            }
            previous_estimate = Some(estimate);
        }
    }
    let estimate = previous_estimate.unwrap_or_else(|| running.value());
    Err(Error::QuadratureNotConverged {
        estimate: (T::lit(0.5) + (body + estimate) / T::PI()).to_f64_lossy(),
        error_estimate: f64::NAN,
        panels: MAX_TAIL_INTERVALS,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub samples: u64,
    pub seed: u64,
    /// Independent streams; the standard error is estimated from the spread
    /// of the per-batch estimates.
    pub batches: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0x5EED,
            batches: 100,
        }
    }
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.batches == 0 {
            return Err(Error::InvalidParameter {
                family: "monte_carlo",
                parameter: if self.samples == 0 { "samples" } else { "batches" },
                value: 0.0,
                reason: "must be at least one".into(),
            });
        }
        Ok(())
    }

    fn batch_sizes(&self) -> Vec<(u64, u64)> {
        let batches = self.batches.min(self.samples);
        let base = self.samples / batches;
        let extra = self.samples % batches;
        (0..batches).map(|b| (b, base + u64::from(b < extra))).collect()
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub samples: u64,
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Combines per-batch `(sum, count)` pairs into a mean and a batch-means
/// standard error.
fn merge_batches<T: Scalar>(batches: &[(T, u64)]) -> McEstimate<T> {
    let total: u64 = batches.iter().map(|b| b.1).sum();
    let mean = batches.iter().map(|b| b.0).collect::<CompensatedSum<T>>().value() / T::from_u64(total).unwrap();
    let k = batches.len();
    let std_error = if k < 2 {
        T::zero()
    } else {
        let ss = batches
            .iter()
            .map(|&(s, n)| {
                let d = s / T::from_u64(n).unwrap() - mean;
                d * d
            })
            .collect::<CompensatedSum<T>>()
            .value();
        let kf = T::from_usize(k).unwrap();
        (ss / (kf - T::one()) / kf).sqrt()
    };
    McEstimate {
        value: mean,
        std_error,
        samples: total,
    }
}

/// Draws `(q-free interference plus noise, desired power)` pairs for one batch.
fn draw_batch<T: Scalar>(
    desired: &PowerSampler<T>,
    interferers: &[PowerSampler<T>],
    noise: T,
    seed: u64,
    batch: u64,
    count: u64,
) -> Vec<(T, T)> {
    let mut rng = batch_rng(seed, batch);
    (0..count)
        .map(|_| {
            let mut acc = noise;
            for s in interferers {
                acc = acc + s.sample(&mut rng);
            }
            (acc, desired.sample(&mut rng))
        })
        .collect()
}

fn samplers<T: Scalar>(s: &SirScenario<T>) -> (PowerSampler<T>, Vec<PowerSampler<T>>) {
    (
        PowerSampler::new(&s.desired),
        s.interferers.iter().map(PowerSampler::new).collect(),
    )
}

/// Empirical outage `Pr(q (I + N0) > p0)` at the scenario's threshold.
pub fn monte_carlo_outage<T: Scalar>(s: &SirScenario<T>, mc: &MonteCarloConfig) -> Result<McEstimate<T>> {
    Ok(monte_carlo_outage_curve(s, &[s.threshold_q], mc)?.remove(0))
}

/// Empirical outage at several thresholds from one set of samples.
///
/// Batches run in parallel and are merged in batch order, so the result does
/// not depend on the number of worker threads.
pub fn monte_carlo_outage_curve<T: Scalar>(
    s: &SirScenario<T>,
    thresholds: &[T],
    mc: &MonteCarloConfig,
) -> Result<Vec<McEstimate<T>>> {
    s.validate()?;
    mc.validate()?;
    let (desired, interferers) = samplers(s);
    let per_batch: Vec<Vec<(T, u64)>> = mc
        .batch_sizes()
        .into_par_iter()
        .map(|(batch, count)| {
            let draws = draw_batch(&desired, &interferers, s.noise_power, mc.seed, batch, count);
            thresholds
                .iter()
                .map(|&q| {
                    let hits = draws.iter().filter(|&&(i, p0)| q * i > p0).count();
                    (T::from_usize(hits).unwrap(), count)
                })
                .collect()
        })
        .collect();
    Ok((0..thresholds.len())
        .map(|j| {
            let column: Vec<(T, u64)> = per_batch.iter().map(|b| b[j]).collect();
            merge_batches(&column)
        })
        .collect())
}

/// Monte Carlo ergodic capacity `E[log2(1 + p0 / (I + N0))]`.
pub fn monte_carlo_capacity<T: Scalar>(s: &SirScenario<T>, mc: &MonteCarloConfig) -> Result<McEstimate<T>> {
    s.validate()?;
    mc.validate()?;
    let (desired, interferers) = samplers(s);
    let per_batch: Vec<(T, u64)> = mc
        .batch_sizes()
        .into_par_iter()
        .map(|(batch, count)| {
            let draws = draw_batch(&desired, &interferers, s.noise_power, mc.seed, batch, count);
            let sum = draws
                .iter()
                .map(|&(i, p0)| (p0 / i).ln_1p() / T::LN_2())
                .collect::<CompensatedSum<T>>()
                .value();
            (sum, count)
        })
        .collect();
    Ok(merge_batches(&per_batch))
}

/// Exact outage for an exponential (Nakagami-m, `m = 1`) desired signal and
/// Nakagami-m interferers:
/// `1 - exp(-lambda0 q N0) prod_k (1 + q lambda0 / lambda_k)^{-m_k}`.
pub fn exponential_signal_closed_form<T: Scalar>(s: &SirScenario<T>) -> Result<T> {
    s.validate()?;
    let lambda0 = match s.desired {
        PowerDistribution::NakagamiM(d) if d.m() == T::one() => d.rate(),
        _ => {
            return Err(Error::UnsupportedScenario(
                "closed form needs a Nakagami-m desired signal with m = 1".into(),
            ))
        }
    };
    let q = s.threshold_q;
    let mut log_success = CompensatedSum::new();
    log_success.add(-lambda0 * q * s.noise_power);
    for d in &s.interferers {
        match d {
            PowerDistribution::NakagamiM(n) => log_success.add(-n.m() * (q * lambda0 / n.rate()).ln_1p()),
            other => {
                return Err(Error::UnsupportedScenario(format!(
                    "closed form needs Nakagami-m interferers, got {}",
                    other.family()
                )))
            }
        }
    }
    Ok(-log_success.value().exp_m1())
}
