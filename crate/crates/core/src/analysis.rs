//! Outage curves over SIR threshold grids, SINR outage and ergodic capacity.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::composite::{build_composite, SirScenario};
use crate::error::{Error, Result};
use crate::fading::PowerDistribution;
use crate::model::CumulantModel;
use crate::oracles::{
    exponential_signal_closed_form, gil_pelaez_ccdf, monte_carlo_capacity, monte_carlo_outage_curve, MonteCarloConfig,
};
use crate::quadrature::{try_integrate, QuadratureConfig};
use crate::saddlepoint::{ccdf, SolverConfig};
use crate::scalar::Scalar;
use crate::units::db_to_linear;

const MAX_GRID_POINTS: usize = 1_000_000;

/// Success probability below which the capacity integrand is truncated.
const CAPACITY_TRUNCATION: f64 = 1e-8;

/// Inclusive SIR threshold grid in dB.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdGrid<T> {
    pub start_db: T,
    pub stop_db: T,
    pub step_db: T,
}

impl<T: Scalar> ThresholdGrid<T> {
    pub fn new(start_db: T, stop_db: T, step_db: T) -> Result<Self> {
        let g = Self {
            start_db,
            stop_db,
            step_db,
        };
        g.points()?;
        Ok(g)
    }

    /// Grid values in dB, `start + i * step` up to `stop` (inclusive within
    /// a 1e-9 step slack).
    pub fn points(&self) -> Result<Vec<T>> {
        let invalid = |msg: &str| Error::InvalidScenario(format!("threshold grid: {msg}"));
        if !(self.start_db.is_finite() && self.stop_db.is_finite()) || self.start_db > self.stop_db {
            return Err(invalid("start_db must be finite and not above stop_db"));
        }
        if !(self.step_db > T::zero() && self.step_db.is_finite()) {
            return Err(invalid("step_db must be positive"));
        }
        let span = ((self.stop_db - self.start_db) / self.step_db + T::lit(1e-9))
            .floor()
            .to_f64_lossy();
        if span + 1.0 > MAX_GRID_POINTS as f64 {
            return Err(invalid("more than 10^6 grid points"));
        }
        Ok((0..=span as usize)
            .map(|i| self.start_db + self.step_db * T::from_usize(i).unwrap())
            .collect())
    }
}

/// Desired signal, interferers and noise of a link, without a threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioTemplate<T> {
    pub desired: PowerDistribution<T>,
    pub interferers: Vec<PowerDistribution<T>>,
    pub noise_power: T,
}

impl<T: Scalar> ScenarioTemplate<T> {
    pub fn new(desired: PowerDistribution<T>, interferers: Vec<PowerDistribution<T>>) -> Self {
        Self {
            desired,
            interferers,
            noise_power: T::zero(),
        }
    }

    pub fn with_noise(mut self, noise_power: T) -> Self {
        self.noise_power = noise_power;
        self
    }

    pub fn at_threshold(&self, threshold_q: T) -> Result<SirScenario<T>> {
        SirScenario::with_noise(self.desired, self.interferers.clone(), threshold_q, self.noise_power)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Spa,
    GilPelaez,
    MonteCarlo,
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 4] = [Self::Spa, Self::GilPelaez, Self::MonteCarlo, Self::ClosedForm];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Spa => "spa",
            Self::GilPelaez => "gil_pelaez",
            Self::MonteCarlo => "monte_carlo",
            Self::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected spa, gil_pelaez, monte_carlo or closed_form)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageResult<T> {
    pub q_db: T,
    pub q_linear: T,
    pub p_out: T,
    pub method: Method,
    pub t_hat: Option<T>,
    pub iterations: Option<usize>,
    pub near_mean: bool,
    pub clamped: bool,
    /// Quadrature error for Gil-Pelaez, standard error for Monte Carlo.
    pub error_estimate: Option<T>,
}

/// One grid point; failures stay in place so curves show gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub q_db: T,
    pub q_linear: T,
    pub outcome: Result<OutageResult<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig<T> {
    pub solver: SolverConfig<T>,
    pub quadrature: QuadratureConfig<T>,
    pub monte_carlo: MonteCarloConfig,
}

impl<T: Scalar> Default for AnalysisConfig<T> {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            quadrature: QuadratureConfig::default(),
            monte_carlo: MonteCarloConfig::default(),
        }
    }
}

/// Outage probability of one scenario by a deterministic method. SINR
/// outage is `Pr(gamma > -q N0)`.
pub fn outage_point<T: Scalar>(
    s: &SirScenario<T>,
    q_db: T,
    method: Method,
    cfg: &AnalysisConfig<T>,
) -> Result<OutageResult<T>> {
    let x = -s.threshold_q * s.noise_power;
    let base = OutageResult {
        q_db,
        q_linear: s.threshold_q,
        p_out: T::zero(),
        method,
        t_hat: None,
        iterations: None,
        near_mean: false,
        clamped: false,
        error_estimate: None,
    };
    match method {
        Method::Spa => {
            let c = build_composite(s)?;
            let est = ccdf(&c, x, &cfg.solver)?;
            Ok(OutageResult {
                p_out: est.probability,
                t_hat: Some(est.solution.t_hat),
                iterations: Some(est.solution.iterations),
                near_mean: est.solution.near_mean,
                clamped: est.clamped,
                ..base
            })
        }
        Method::GilPelaez => {
            let c = build_composite(s)?;
            let r = gil_pelaez_ccdf(&c, x, &cfg.quadrature)?;
            let sd = c.variance().sqrt();
            Ok(OutageResult {
                p_out: r.probability,
                near_mean: (c.mean() - x).abs() < T::lit(0.05) * sd,
                clamped: r.clamped,
                error_estimate: Some(r.error_estimate),
                ..base
            })
        }
        Method::ClosedForm => Ok(OutageResult {
            p_out: exponential_signal_closed_form(s)?,
            ..base
        }),
        Method::MonteCarlo => {
            let r = crate::oracles::monte_carlo_outage(s, &cfg.monte_carlo)?;
            Ok(OutageResult {
                p_out: r.value,
                error_estimate: Some(r.std_error),
                ..base
            })
        }
    }
}

/// Outage probability at every grid point. Points are evaluated in parallel
/// and returned in grid order. Monte Carlo reuses one sample set across the
/// whole grid.
pub fn outage_curve<T: Scalar>(
    template: &ScenarioTemplate<T>,
    grid: &ThresholdGrid<T>,
    method: Method,
    cfg: &AnalysisConfig<T>,
) -> Result<Vec<CurvePoint<T>>> {
    let q_dbs = grid.points()?;
    // validates the template once, independent of the grid
    template.at_threshold(T::one())?;
    if method == Method::MonteCarlo {
        let qs: Vec<T> = q_dbs.iter().map(|&d| db_to_linear(d)).collect();
        let estimates = monte_carlo_outage_curve(&template.at_threshold(T::one())?, &qs, &cfg.monte_carlo)?;
        return Ok(q_dbs
            .iter()
            .zip(qs)
            .zip(estimates)
            .map(|((&q_db, q_linear), e)| CurvePoint {
                q_db,
                q_linear,
                outcome: Ok(OutageResult {
                    q_db,
                    q_linear,
                    p_out: e.value,
                    method,
                    t_hat: None,
                    iterations: None,
                    near_mean: false,
                    clamped: false,
                    error_estimate: Some(e.std_error),
                }),
            })
            .collect());
    }
    Ok(q_dbs
        .par_iter()
        .map(|&q_db| {
            let q_linear = db_to_linear(q_db);
            let outcome = template
                .at_threshold(q_linear)
                .and_then(|s| outage_point(&s, q_db, method, cfg));
            CurvePoint {
                q_db,
                q_linear,
                outcome,
            }
        })
        .collect())
}

/// SINR outage `Pr(p0 / (I + N0) < q)` by saddle point approximation.
pub fn sinr_outage<T: Scalar>(s: &SirScenario<T>, cfg: &AnalysisConfig<T>) -> Result<OutageResult<T>> {
    let q_db = crate::units::linear_to_db(s.threshold_q);
    outage_point(s, q_db, Method::Spa, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityResult<T> {
    /// Bits/s/Hz.
    pub capacity_bits: T,
    pub method: Method,
    pub error_estimate: T,
}

/// Ergodic capacity `E[log2(1 + SINR)]`.
///
/// Deterministic methods integrate the success probability along the
/// capacity axis, `int_0^inf Pr(SINR > 2^c - 1) dc`, truncated once the
/// success probability falls below 1e-8. Monte Carlo averages
/// `log2(1 + SINR)` directly.
pub fn ergodic_capacity<T: Scalar>(
    template: &ScenarioTemplate<T>,
    method: Method,
    cfg: &AnalysisConfig<T>,
) -> Result<CapacityResult<T>> {
    if method == Method::MonteCarlo {
        let r = monte_carlo_capacity(&template.at_threshold(T::one())?, &cfg.monte_carlo)?;
        return Ok(CapacityResult {
            capacity_bits: r.value,
            method,
            error_estimate: r.std_error,
        });
    }
    let success = |c: T| -> Result<T> {
        let q = (c * T::LN_2()).exp_m1();
        if q <= T::zero() {
            return Ok(T::one());
        }
        let s = template.at_threshold(q)?;
        let r = outage_point(&s, crate::units::linear_to_db(q), method, cfg)?;
        Ok(T::one() - r.p_out)
    };
    let truncation = T::lit(CAPACITY_TRUNCATION);
    let mut c_max = T::lit(4.0);
    let mut tail = success(c_max)?;
    while tail > truncation {
        c_max = c_max * T::lit(2.0);
        if c_max > T::lit(4096.0) {
            return Err(Error::QuadratureNotConverged {
                estimate: f64::NAN,
                error_estimate: tail.to_f64_lossy(),
                panels: 0,
            });
        }
        tail = success(c_max)?;
    }
    let quad = QuadratureConfig {
        rel_tol: T::lit(1e-7).max(cfg.quadrature.rel_tol),
        abs_tol: T::lit(1e-9).max(cfg.quadrature.abs_tol),
        max_panels: 4096,
    };
    let r = try_integrate(success, T::zero(), c_max, 8, &quad)?;
    Ok(CapacityResult {
        capacity_bits: r.value.max(T::zero()),
        method,
        error_estimate: r.error_estimate + tail,
    })
}
