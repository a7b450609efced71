//! Globally adaptive Gauss-Legendre quadrature on finite intervals, plus a
//! Wynn epsilon extrapolator for alternating tail sums.
//!
//! Each panel is integrated with a 15-point rule on the whole panel and on
//! both halves; the difference is the panel's error estimate. The panel with
//! the largest estimate is bisected until the total estimate meets the
//! tolerance or the panel budget is exhausted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

const RULE_POINTS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Scalar> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-9).max(T::lit(64.0) * T::epsilon()),
            abs_tol: T::lit(1e-12).max(T::lit(64.0) * T::epsilon()),
            max_panels: 1 << 15,
        }
    }
}

impl<T: Scalar> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (parameter, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    family: "quadrature",
                    parameter,
                    value: v.to_f64_lossy(),
                    reason: "tolerance must be positive and finite".into(),
                });
            }
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidParameter {
                family: "quadrature",
                parameter: "max_panels",
                value: 0.0,
                reason: "at least one panel is required".into(),
            });
        }
        Ok(())
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error_estimate: T,
    pub panels: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed once in `f64`.
fn rule() -> &'static ([f64; RULE_POINTS], [f64; RULE_POINTS]) {
    static RULE: OnceLock<([f64; RULE_POINTS], [f64; RULE_POINTS])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = RULE_POINTS;
        let mut nodes = [0.0; RULE_POINTS];
        let mut weights = [0.0; RULE_POINTS];
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn apply_rule<T: Scalar, F>(f: &mut F, a: T, b: T) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let (nodes, weights) = rule();
    let half = T::lit(0.5) * (b - a);
    let mid = T::lit(0.5) * (a + b);
    let mut acc = CompensatedSum::new();
    for (&x, &wt) in nodes.iter().zip(weights.iter()) {
        acc.add(T::lit(wt) * f(mid + half * T::lit(x))?);
    }
    Ok(acc.value() * half)
}

#[derive(Clone, Copy, Debug)]
struct Panel<T> {
    a: T,
    b: T,
    left: T,
    right: T,
    error: T,
}

impl<T: Scalar> Panel<T> {
    fn build<F: FnMut(T) -> Result<T>>(f: &mut F, a: T, b: T, whole: T) -> Result<Self> {
        let m = T::lit(0.5) * (a + b);
        let left = apply_rule(f, a, m)?;
        let right = apply_rule(f, m, b)?;
        Ok(Self {
            a,
            b,
            left,
            right,
            error: (whole - left - right).abs(),
        })
    }

    fn value(&self) -> T {
        self.left + self.right
    }

    fn splittable(&self) -> bool {
        let m = T::lit(0.5) * (self.a + self.b);
        let quarter = T::lit(0.5) * (self.a + m);
        m > self.a && m < self.b && quarter > self.a && quarter < m
    }
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Panel<T> {}

impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Scalar, F>(mut f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Integral<T>>
where
    F: FnMut(T) -> T,
{
    try_integrate(|x| Ok(f(x)), a, b, 1, cfg)
}

/// Integrates a fallible `f` over `[a, b]` starting from `initial_panels`
/// equal panels. Errors from `f` abort the integration.
pub fn try_integrate<T: Scalar, F>(
    mut f: F,
    a: T,
    b: T,
    initial_panels: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<Integral<T>>
where
    F: FnMut(T) -> Result<T>,
{
    cfg.validate()?;
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error_estimate: T::zero(),
            panels: 0,
        });
    }
    let initial = initial_panels.clamp(1, cfg.max_panels);
    let step = (b - a) / T::from_usize(initial).expect("panel count fits the scalar type");
    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let mut frozen: Vec<Panel<T>> = Vec::new();
    for i in 0..initial {
        let lo = a + step * T::from_usize(i).unwrap();
        let hi = if i + 1 == initial {
            b
        } else {
            a + step * T::from_usize(i + 1).unwrap()
        };
        let whole = apply_rule(&mut f, lo, hi)?;
        heap.push(Panel::build(&mut f, lo, hi, whole)?);
    }

    let totals = |heap: &BinaryHeap<Panel<T>>, frozen: &[Panel<T>]| {
        let mut v = CompensatedSum::new();
        let mut e = CompensatedSum::new();
        for p in heap.iter().chain(frozen.iter()) {
            v.add(p.value());
            e.add(p.error);
        }
        (v.value(), e.value())
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    loop {
        if error <= cfg.target(value) {
            // the running sums drift; confirm with an exact recount
            let (v, e) = totals(&heap, &frozen);
            value = v;
            error = e;
            if error <= cfg.target(value) {
                break;
            }
        }
        let panels = heap.len() + frozen.len();
        let Some(worst) = heap.pop() else {
            return Err(not_converged(value, error, panels));
        };
        if panels >= cfg.max_panels {
            heap.push(worst);
            let (v, e) = totals(&heap, &frozen);
            if e <= cfg.target(v) {
                value = v;
                error = e;
                break;
            }
            return Err(not_converged(v, e, panels));
        }
        if !worst.splittable() {
            frozen.push(worst);
            continue;
        }
        let m = T::lit(0.5) * (worst.a + worst.b);
        let left = Panel::build(&mut f, worst.a, m, worst.left)?;
        let right = Panel::build(&mut f, m, worst.b, worst.right)?;
        value = value - worst.value() + left.value() + right.value();
        error = error - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
    }
    Ok(Integral {
        value,
        error_estimate: error,
        panels: heap.len() + frozen.len(),
    })
}

fn not_converged<T: Scalar>(value: T, error: T, panels: usize) -> Error {
    Error::QuadratureNotConverged {
        estimate: value.to_f64_lossy(),
        error_estimate: error.to_f64_lossy(),
        panels,
    }
}

/// Wynn epsilon extrapolation of the limit of a sequence of partial sums.
///
/// Returns the estimate from the highest even column reachable with the
/// given terms.
pub fn wynn_epsilon<T: Scalar>(partial_sums: &[T]) -> T {
    let n = partial_sums.len();
    match n {
        0 => return T::zero(),
        1 | 2 => return partial_sums[n - 1],
        _ => {}
    }
    let mut previous = vec![T::zero(); n + 1];
    let mut current = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    for column in 1..n {
        let mut next = Vec::with_capacity(current.len() - 1);
        for i in 0..current.len() - 1 {
            let diff = current[i + 1] - current[i];
            if diff == T::zero() || !diff.is_finite() {
                return best;
            }
            next.push(previous[i + 1] + diff.recip());
        }
        if column % 2 == 0 {
            match next.last() {
                Some(&v) if v.is_finite() => best = v,
                _ => return best,
            }
        }
        previous = current;
        current = next;
        if current.len() < 2 {
            break;
        }
    }
    best
}
