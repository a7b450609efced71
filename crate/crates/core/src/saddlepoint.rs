//! Saddle point solver and the Lugannani-Rice tail approximation.
//!
//! For a model with CGF `K`, the saddle point `t` solves `K'(t) = x`. The
//! upper tail is then approximated by
//!
//! ```text
//! Q(x) ~ 1 - Phi(w) + phi(w) (1/u - 1/w)
//! w = sign(t) sqrt(2 (x t - K(t))),   u = t sqrt(K''(t))
//! ```
//!
//! The formula is singular at `x = E[X]` (`t = w = 0`); there the value is
//! either interpolated from `E[X] +- delta sd` or replaced by the
//! skewness-corrected `1/2 - K'''(0) / (6 sqrt(2 pi) K''(0)^{3/2})`.

use crate::error::{Error, Result};
use crate::fading::NakagamiM;
use crate::model::CumulantModel;
use crate::normal;
use crate::quadrature::{try_integrate, QuadratureConfig};
use crate::scalar::Scalar;

/// How to evaluate the tail when `|w|` falls below the breakdown threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BreakdownStrategy {
    /// Linear interpolation between `E[X] - delta sd` and `E[X] + delta sd`.
    #[default]
    Interpolate,
    /// The skewness-corrected value at the mean.
    SkewnessCorrection,
}

impl BreakdownStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Interpolate => "interpolate",
            Self::SkewnessCorrection => "skewness_correction",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Stop when `|K'(t) - x| <= tol * max(1, |x|, sd)`.
    pub tol: T,
    pub max_iter: usize,
    pub near_mean_w_threshold: T,
    /// Interpolation half-width in units of the standard deviation.
    pub interpolation_delta: T,
    pub breakdown: BreakdownStrategy,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8).max(T::lit(100.0) * T::epsilon()),
            max_iter: 50,
            near_mean_w_threshold: T::lit(1e-4),
            interpolation_delta: T::lit(1e-3),
            breakdown: BreakdownStrategy::Interpolate,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |parameter: &'static str, value: T| Error::InvalidParameter {
            family: "solver",
            parameter,
            value: value.to_f64_lossy(),
            reason: "must be positive and finite".into(),
        };
        for (name, v) in [
            ("tol", self.tol),
            ("near_mean_w_threshold", self.near_mean_w_threshold),
            ("interpolation_delta", self.interpolation_delta),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(bad(name, v));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                family: "solver",
                parameter: "max_iter",
                value: 0.0,
                reason: "at least one iteration is required".into(),
            });
        }
        Ok(())
    }
}

/// Saddle point together with the Lugannani-Rice intermediates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleSolution<T> {
    pub t_hat: T,
    pub w: T,
    pub u: T,
    /// `w - u`, computed without cancellation near the mean.
    pub w_minus_u: T,
    /// `K(t_hat)`.
    pub k: T,
    /// `K''(t_hat)`.
    pub k2: T,
    pub iterations: usize,
    pub converged: bool,
    /// `|w|` is below the breakdown threshold.
    pub near_mean: bool,
}

/// Solves `K'(t) = x` by Newton's method started at zero.
///
/// A Newton step that would leave the current bracket is replaced by the
/// midpoint between the iterate and the violated bound. Brackets start at the
/// strip edges pulled in by `1e-12` of the strip width and tighten with the
/// sign of `K'(t) - x`, which is monotone because `K` is convex.
pub fn solve_saddle<T, M>(model: &M, x: T, cfg: &SolverConfig<T>) -> Result<SaddleSolution<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    solve_saddle_observed(model, x, cfg, |_| {})
}

/// [`solve_saddle`] reporting every iterate (including the start) to `observe`.
pub fn solve_saddle_observed<T, M>(
    model: &M,
    x: T,
    cfg: &SolverConfig<T>,
    mut observe: impl FnMut(T),
) -> Result<SaddleSolution<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    cfg.validate()?;
    if !x.is_finite() {
        return Err(Error::NoSaddleInStrip { x: x.to_f64_lossy() });
    }
    let strip = model.strip();
    let guard = T::lit(1e-12);
    let width = strip.width();
    let margin = |bound: T| {
        if width.is_finite() {
            guard * width
        } else if bound.is_finite() {
            guard * bound.abs()
        } else {
            T::zero()
        }
    };
    let lo_edge = strip.lower + margin(strip.lower);
    let hi_edge = strip.upper - margin(strip.upper);
    let (lo_margin, hi_margin) = (margin(strip.lower), margin(strip.upper));

    let scale = T::one().max(x.abs()).max(model.variance().sqrt());
    let target = cfg.tol * scale;
    let two = T::lit(2.0);

    let (mut lo, mut hi) = (lo_edge, hi_edge);
    let mut t = T::zero();
    let mut e = model.eval(t)?;
    observe(t);
    let mut iterations = 0;
    loop {
        let g = e.k1 - x;
        if !g.is_finite() || !(e.k2 > T::zero()) {
            return Err(Error::DivergedSolver {
                iterations,
                residual: g.to_f64_lossy(),
            });
        }
        if g > T::zero() {
            hi = t;
        } else if g < T::zero() {
            lo = t;
        }
        if g.abs() <= target {
            // One more Newton step: quadratic convergence makes t accurate to
            // rounding rather than to tol / K''.
            let polished = t - g / e.k2;
            if g != T::zero() && polished > lo && polished < hi && polished != t {
                t = polished;
                e = model.eval(t)?;
                observe(t);
            }
            break;
        }
        if iterations >= cfg.max_iter {
            return Err(Error::DivergedSolver {
                iterations,
                residual: g.to_f64_lossy(),
            });
        }
        let newton = t - g / e.k2;
        let next = if newton > lo && newton < hi {
            newton
        } else if newton >= hi {
            (t + hi) / two
        } else {
            (t + lo) / two
        };
        let pinned_high = g < T::zero() && hi == hi_edge && hi_edge - next <= two * hi_margin;
        let pinned_low = g > T::zero() && lo == lo_edge && next - lo_edge <= two * lo_margin;
        if pinned_high || pinned_low {
            return Err(Error::NoSaddleInStrip { x: x.to_f64_lossy() });
        }
        if next == t {
            // bracket has collapsed to adjacent floats
            break;
        }
        t = next;
        iterations += 1;
        e = model.eval(t)?;
        observe(t);
    }

    let excess = tilted_excess(model, x, t, e.k, e.k1);
    let magnitude = (two * excess.value.max(T::zero())).sqrt();
    let w = if t < T::zero() { -magnitude } else { magnitude };
    let u = t * e.k2.sqrt();
    let w_minus_u = match excess.curvature_gap {
        Some(gap) if w + u != T::zero() => two * gap / (w + u),
        _ => w - u,
    };
    Ok(SaddleSolution {
        t_hat: t,
        w,
        u,
        w_minus_u,
        k: e.k,
        k2: e.k2,
        iterations,
        converged: true,
        near_mean: t == T::zero() || w.abs() < cfg.near_mean_w_threshold,
    })
}

struct TiltedExcess<T> {
    /// `x t - K(t)`.
    value: T,
    /// `int_0^t s (K''(s) - K''(t)) ds`, which is `(w^2 - u^2) / 2` less the
    /// Newton residual term. Only set when `value` was rebuilt.
    curvature_gap: Option<T>,
}

/// `x t - K(t)` at a near-root `t`.
///
/// Close to the mean both terms nearly cancel, so the difference is rebuilt
/// from `t (x - K'(t)) + int_0^t s K''(s) ds`, whose integrand has one sign.
fn tilted_excess<T, M>(model: &M, x: T, t: T, k: T, k1: T) -> TiltedExcess<T>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    let direct = TiltedExcess {
        value: x * t - k,
        curvature_gap: None,
    };
    if t == T::zero() || direct.value.abs() > T::lit(0.01) * ((x * t).abs() + k.abs()) {
        return direct;
    }
    let cfg = QuadratureConfig {
        rel_tol: T::lit(64.0) * T::epsilon(),
        abs_tol: T::min_positive_value(),
        max_panels: 64,
    };
    let Ok(k2_t) = model.cgf_d2(t) else {
        return direct;
    };
    let area = try_integrate(|s| Ok(s * model.cgf_d2(s)?), T::zero(), t, 1, &cfg);
    let gap = try_integrate(|s| Ok(s * (model.cgf_d2(s)? - k2_t)), T::zero(), t, 1, &cfg);
    match (area, gap) {
        (Ok(area), Ok(gap)) => TiltedExcess {
            value: t * (x - k1) + area.value,
            curvature_gap: Some(gap.value),
        },
        _ => direct,
    }
}

/// A probability together with whether it had to be clamped into `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Clamped<T> {
    pub value: T,
    pub clamped: bool,
}

impl<T: Scalar> Clamped<T> {
    pub fn from_raw(raw: T) -> Self {
        let value = raw.max(T::zero()).min(T::one());
        Self {
            value,
            clamped: value != raw,
        }
    }
}

/// Three-term Lugannani-Rice upper tail at `x` from a converged solution.
pub fn lugannani_rice<T, M>(_model: &M, _x: T, sol: &SaddleSolution<T>) -> Result<Clamped<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    if sol.near_mean || !sol.converged {
        return Err(Error::BreakdownBranchRequired);
    }
    let (w, u) = (sol.w, sol.u);
    let raw = normal::sf(w) + normal::pdf(w) * (sol.w_minus_u / (u * w));
    Ok(Clamped::from_raw(raw))
}

/// Skewness-corrected upper tail at the mean.
pub fn ccdf_at_mean<T, M>(model: &M) -> Result<Clamped<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    let k2 = model.cgf_d2(T::zero())?;
    let k3 = model.cgf_d3(T::zero())?;
    let raw = T::lit(0.5) - k3 / (T::lit(6.0) * T::TAU().sqrt() * k2.powf(T::lit(1.5)));
    Ok(Clamped::from_raw(raw))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailBranch {
    LugannaniRice,
    Interpolated,
    SkewnessCorrected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcdfEstimate<T> {
    pub probability: T,
    pub clamped: bool,
    pub branch: TailBranch,
    /// Saddle point at the requested `x`.
    pub solution: SaddleSolution<T>,
}

/// Saddle point approximation of `Pr(X > x)`, routing around the breakdown
/// point according to `cfg.breakdown`.
pub fn ccdf<T, M>(model: &M, x: T, cfg: &SolverConfig<T>) -> Result<CcdfEstimate<T>>
where
    T: Scalar,
    M: CumulantModel<T> + ?Sized,
{
    let solution = solve_saddle(model, x, cfg)?;
    if !solution.near_mean {
        let q = lugannani_rice(model, x, &solution)?;
        return Ok(CcdfEstimate {
            probability: q.value,
            clamped: q.clamped,
            branch: TailBranch::LugannaniRice,
            solution,
        });
    }
    match cfg.breakdown {
        BreakdownStrategy::SkewnessCorrection => {
            let q = ccdf_at_mean(model)?;
            Ok(CcdfEstimate {
                probability: q.value,
                clamped: q.clamped,
                branch: TailBranch::SkewnessCorrected,
                solution,
            })
        }
        BreakdownStrategy::Interpolate => {
            let half_width = cfg.interpolation_delta * model.variance().sqrt();
            let mean = model.mean();
            let (x_lo, x_hi) = (mean - half_width, mean + half_width);
            let q_lo = lugannani_rice(model, x_lo, &solve_saddle(model, x_lo, cfg)?)?;
            let q_hi = lugannani_rice(model, x_hi, &solve_saddle(model, x_hi, cfg)?)?;
            let raw = q_lo.value + (q_hi.value - q_lo.value) * (x - x_lo) / (x_hi - x_lo);
            let q = Clamped::from_raw(raw);
            Ok(CcdfEstimate {
                probability: q.value,
                clamped: q.clamped || q_lo.clamped || q_hi.clamped,
                branch: TailBranch::Interpolated,
                solution: SaddleSolution {
                    near_mean: true,
                    ..solution
                },
            })
        }
    }
}

/// Explicit saddle point of `q I - p0 = 0` for a Nakagami-m desired signal
/// and `count` identical Nakagami-m interferers:
/// `(m0 lambda / q - m L lambda0) / (m L + m0)`.
pub fn nakagami_identical_saddle_point<T: Scalar>(
    desired: &NakagamiM<T>,
    interferer: &NakagamiM<T>,
    count: usize,
    q: T,
) -> T {
    let ml = interferer.m() * T::from_usize(count).expect("interferer count fits the scalar type");
    (desired.m() * interferer.rate() / q - ml * desired.rate()) / (ml + desired.m())
}
