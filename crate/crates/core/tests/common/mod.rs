#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spa_outage::{dbm_to_mw, CumulantModel, PowerDistribution, ScenarioTemplate};

pub type Dist = PowerDistribution<f64>;

pub fn nak(m: f64, p: f64) -> Dist {
    PowerDistribution::nakagami_m(m, p).unwrap()
}

pub fn rice(r: f64, p: f64) -> Dist {
    PowerDistribution::rician(r, p).unwrap()
}

pub fn hoyt(b: f64, p: f64) -> Dist {
    PowerDistribution::hoyt(b, p).unwrap()
}

pub fn gauss(mu: f64, s2: f64) -> Dist {
    PowerDistribution::gaussian_test(mu, s2).unwrap()
}

/// 5 dBm desired, 0 dBm interferers.
pub fn p0() -> f64 {
    dbm_to_mw(5.0)
}

pub fn fig1(m0: f64) -> ScenarioTemplate<f64> {
    ScenarioTemplate::new(nak(m0, p0()), vec![nak(0.5, 1.0); 5])
}

pub const FIG1_M0: [f64; 6] = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75];

pub fn fig2(r0: f64) -> ScenarioTemplate<f64> {
    ScenarioTemplate::new(rice(r0, p0()), vec![rice(0.5, 1.0); 5])
}

pub const FIG2_R0: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];

/// Interferer asymmetry 0.9 stands in for the out-of-domain b = 1.
pub fn fig3(b0: f64) -> ScenarioTemplate<f64> {
    ScenarioTemplate::new(hoyt(b0, p0()), vec![hoyt(0.9, 1.0); 5])
}

pub const FIG3_B0: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

pub fn fig4(m0: f64) -> ScenarioTemplate<f64> {
    ScenarioTemplate::new(
        nak(m0, p0()),
        [3.7, 3.5, 4.1, 1.7, 2.1].iter().map(|&m| nak(m, 1.0)).collect(),
    )
}

pub const FIG4_M0: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// Central difference with a step scaled to the distance from the strip edges.
pub fn central_difference(f: impl Fn(f64) -> f64, t: f64, scale: f64) -> f64 {
    let h = 1e-4 * scale;
    // fourth-order stencil
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// Length scale for finite differences at `t`: a fraction of the distance to
/// the nearest finite strip edge.
pub fn fd_scale<M: CumulantModel<f64>>(m: &M, t: f64) -> f64 {
    let s = m.strip();
    let mut d = f64::INFINITY;
    if s.upper.is_finite() {
        d = d.min(s.upper - t);
    }
    if s.lower.is_finite() {
        d = d.min(t - s.lower);
    }
    if d.is_finite() {
        d
    } else {
        1.0
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Root of the increasing function `g` on `(lo, hi)` by plain bisection.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Empirical characteristic function `mean(exp(j t x_i))`.
pub fn empirical_cf(samples: &[f64], t: f64) -> Complex<f64> {
    let n = samples.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for &x in samples {
        let (s, c) = (t * x).sin_cos();
        re += c;
        im += s;
    }
    Complex::new(re / n, im / n)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random distribution of any physical family with a power in [-5, 5] dBm.
pub fn random_family(rng: &mut ChaCha8Rng) -> Dist {
    let p = dbm_to_mw(uniform(rng, -5.0, 5.0));
    match rng.random_range(0..3) {
        0 => nak(uniform(rng, 0.5, 5.0), p),
        1 => rice(uniform(rng, 0.0, 6.0), p),
        _ => hoyt(uniform(rng, -0.95, 0.95), p),
    }
}
