mod common;

use common::*;
use num_complex::Complex;
use spa_outage::{
    build_composite, cgf_d3_composite, characteristic_function_composite, CumulantModel, Error, SirScenario,
};

fn scenario(desired: Dist, interferers: Vec<Dist>, q: f64) -> SirScenario<f64> {
    SirScenario::new(desired, interferers, q).unwrap()
}

#[test]
fn rejects_invalid_scenarios() {
    assert!(matches!(
        SirScenario::new(nak(1.0, 1.0), vec![], 1.0),
        Err(Error::InvalidScenario(_))
    ));
    assert!(SirScenario::new(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 0.0).is_err());
    assert!(SirScenario::new(nak(1.0, 1.0), vec![nak(1.0, 1.0)], -1.0).is_err());
    assert!(SirScenario::with_noise(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 1.0, -1.0).is_err());
}

#[test]
fn strip_examples() {
    let c = build_composite(&scenario(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 1.0)).unwrap();
    assert_eq!((c.strip().lower, c.strip().upper), (-1.0, 1.0));

    let c = build_composite(&scenario(nak(1.0, p0()), vec![nak(1.0, 1.0); 5], 1.0)).unwrap();
    assert!((c.strip().lower + 1.0 / p0()).abs() < 1e-15);
    assert!((c.strip().lower + 0.31623).abs() < 1e-5);
    assert_eq!(c.strip().upper, 1.0);
}

#[test]
fn mixed_family_strip_upper_is_the_tightest_pole() {
    let q = 2.0;
    let ints = vec![nak(2.0, 1.0), rice(1.0, 0.5), hoyt(0.5, 1.5)];
    let want = ints.iter().map(|d| d.strip().upper / q).fold(f64::INFINITY, f64::min);
    let c = build_composite(&scenario(nak(1.0, 1.0), ints.clone(), q)).unwrap();
    assert_eq!(c.strip().upper, want);

    // Empirical MGF probe: E[e^{t gamma}] settles below the edge and keeps
    // growing beyond it (heavy right tail of e^{t gamma}).
    let s = scenario(nak(1.0, 1.0), ints, q);
    let sampler_mc = |t: f64, n: usize, seed: u64| {
        let samplers: Vec<_> = s.interferers.iter().map(spa_outage::PowerSampler::new).collect();
        let d0 = spa_outage::PowerSampler::new(&s.desired);
        let mut r = rng(seed);
        let mut acc = 0.0;
        for _ in 0..n {
            let i: f64 = samplers.iter().map(|x| x.sample(&mut r)).sum();
            acc += (t * (q * i - d0.sample(&mut r))).exp();
        }
        acc / n as f64
    };
    let inside = 0.5 * want;
    let m_small = sampler_mc(inside, 200_000, 1);
    let m_large = sampler_mc(inside, 2_000_000, 2);
    let exact = c_mgf(&c, inside);
    assert!(
        rel_err(m_small, exact) < 0.05 && rel_err(m_large, exact) < 0.02,
        "{m_small} {m_large} {exact}"
    );
    let outside = 1.5 * want;
    let a = sampler_mc(outside, 200_000, 3);
    let b = sampler_mc(outside, 2_000_000, 4);
    assert!(b > 3.0 * exact && a.max(b) > 10.0 * c_mgf(&c, inside), "{a} {b}");

    fn c_mgf(c: &spa_outage::CompositeCgf<f64>, t: f64) -> f64 {
        c.cgf(t).unwrap().exp()
    }
}

#[test]
fn eval_examples() {
    let c = build_composite(&scenario(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 1.0)).unwrap();
    let e = c.eval(0.5).unwrap();
    let want = -(0.5f64).ln() - (1.5f64).ln();
    assert!((e.k - want).abs() < 1e-15);
    assert!((e.k - 0.28768207245178085).abs() < 1e-15);

    let ints = vec![rice(0.5, 1.0), nak(2.0, 0.5), hoyt(-0.3, 2.0)];
    let q = 1.7;
    let d0 = hoyt(0.2, 3.0);
    let c = build_composite(&scenario(d0, ints.clone(), q)).unwrap();
    let e = c.eval(0.0).unwrap();
    let mean = q * ints.iter().map(|d| d.mean()).sum::<f64>() - d0.mean();
    let var = q * q * ints.iter().map(|d| d.variance()).sum::<f64>() + d0.variance();
    assert_eq!(e.k, 0.0);
    assert!((e.k1 - mean).abs() < 1e-14);
    assert!(rel_err(e.k2, var) < 1e-14);
    assert!((c.mean() - mean).abs() < 1e-14 && rel_err(c.variance(), var) < 1e-14);
}

#[test]
fn fig4_eval_matches_term_by_term_and_finite_differences() {
    let s = fig4(2.0).at_threshold(1.0).unwrap();
    let c = build_composite(&s).unwrap();
    let t = 0.1;
    let e = c.eval(t).unwrap();
    // independent recomputation straight from the Gamma CGF
    let gamma_k = |m: f64, p: f64, t: f64| -m * (1.0 - t * m.recip() * p).ln();
    let want: f64 = [3.7, 3.5, 4.1, 1.7, 2.1]
        .iter()
        .map(|&m| gamma_k(m, 1.0, t))
        .sum::<f64>()
        + gamma_k(2.0, p0(), -t);
    assert!(rel_err(e.k, want) < 1e-13, "{} vs {want}", e.k);
    let h = fd_scale(&c, t);
    let fd1 = central_difference(|s| c.cgf(s).unwrap(), t, h);
    let fd2 = central_difference(|s| c.cgf_d1(s).unwrap(), t, h);
    assert!(rel_err(fd1, e.k1) < 1e-8, "{fd1} vs {}", e.k1);
    assert!(rel_err(fd2, e.k2) < 1e-8, "{fd2} vs {}", e.k2);
}

#[test]
fn third_derivative_examples() {
    let c = build_composite(&scenario(gauss(1.0, 2.0), vec![gauss(0.5, 1.0), gauss(-1.0, 3.0)], 2.0)).unwrap();
    assert_eq!(cgf_d3_composite(&c, 0.3).unwrap(), 0.0);

    let c = build_composite(&scenario(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 1.0)).unwrap();
    assert_eq!(cgf_d3_composite(&c, 0.0).unwrap(), 0.0);

    for m0 in FIG1_M0 {
        let c = build_composite(&fig1(m0).at_threshold(1.0).unwrap()).unwrap();
        let fd = central_difference(|s| c.eval(s).unwrap().k2, 0.0, fd_scale(&c, 0.0));
        let k3 = cgf_d3_composite(&c, 0.0).unwrap();
        assert!(rel_err(k3, fd) < 1e-5, "m0={m0}: {k3} vs {fd}");
    }
}

#[test]
fn characteristic_function_examples() {
    let c = build_composite(&scenario(nak(1.0, 1.0), vec![nak(1.0, 1.0)], 1.0)).unwrap();
    assert_eq!(characteristic_function_composite(&c, 0.0), Complex::new(1.0, 0.0));
    let z = characteristic_function_composite(&c, 1.0);
    assert!((z - Complex::new(0.5, 0.0)).norm() < 1e-15, "{z}");
}

#[test]
fn fig2_characteristic_function_matches_empirical() {
    let s = fig2(2.0).at_threshold(1.0).unwrap();
    let c = build_composite(&s).unwrap();
    let t = 3.0;
    let z = characteristic_function_composite(&c, t);
    assert!(z.norm() <= 1.0);
    assert!((characteristic_function_composite(&c, -t) - z.conj()).norm() < 1e-15);
    let ints: Vec<_> = s.interferers.iter().map(spa_outage::PowerSampler::new).collect();
    let d0 = spa_outage::PowerSampler::new(&s.desired);
    let mut r = rng(9);
    let gammas: Vec<f64> = (0..10_000_000)
        .map(|_| ints.iter().map(|x| x.sample(&mut r)).sum::<f64>() - d0.sample(&mut r))
        .collect();
    let emp = empirical_cf(&gammas, t);
    assert!((z - emp).norm() < 1e-3, "{z} vs {emp}");
}

#[test]
fn finite_difference_consistency_on_random_scenarios() {
    let mut r = rng(77);
    for _ in 0..20 {
        let l = r.random_range(1..=6);
        let ints: Vec<Dist> = (0..l).map(|_| random_family(&mut r)).collect();
        let q = spa_outage::db_to_linear(uniform(&mut r, -10.0, 20.0));
        let c = build_composite(&scenario(random_family(&mut r), ints, q)).unwrap();
        let st = c.strip();
        for _ in 0..100 {
            let t = st.lower + (st.upper - st.lower) * uniform(&mut r, 0.02, 0.98);
            let e = c.eval(t).unwrap();
            let h = fd_scale(&c, t);
            let fd1 = central_difference(|s| c.cgf(s).unwrap(), t, h);
            let fd2 = central_difference(|s| c.cgf_d1(s).unwrap(), t, h);
            assert!(
                rel_err(fd1, e.k1) < 1e-6 || (fd1 - e.k1).abs() < 1e-9 * e.k2.sqrt(),
                "{fd1} vs {}",
                e.k1
            );
            assert!(rel_err(fd2, e.k2) < 1e-6, "{fd2} vs {}", e.k2);
            assert!(e.k2 > 0.0);
        }
    }
}

use rand::Rng;

#[test]
fn mean_and_variance_match_monte_carlo() {
    let s = scenario(
        rice(1.0, p0()),
        vec![nak(0.8, 1.0), hoyt(0.5, 0.5), rice(3.0, 2.0)],
        0.7,
    );
    let c = build_composite(&s).unwrap();
    let ints: Vec<_> = s.interferers.iter().map(spa_outage::PowerSampler::new).collect();
    let d0 = spa_outage::PowerSampler::new(&s.desired);
    let mut r = rng(5);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n)
        .map(|_| s.threshold_q * ints.iter().map(|x| x.sample(&mut r)).sum::<f64>() - d0.sample(&mut r))
        .collect();
    let (m, v) = mean_var(&xs);
    let se_mean = (c.variance() / n as f64).sqrt();
    assert!((m - c.mean()).abs() < 4.0 * se_mean, "{m} vs {}", c.mean());
    // standard error of the sample variance from the fourth moment
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
    let se_var = ((m4 - v * v) / n as f64).sqrt();
    assert!((v - c.variance()).abs() < 4.0 * se_var, "{v} vs {}", c.variance());
}

#[test]
fn strip_edges() {
    let c = build_composite(&fig2(1.0).at_threshold(2.0).unwrap()).unwrap();
    let st = c.strip();
    let w = st.width();
    assert!(c.eval(st.upper - 1e-9 * w).is_ok());
    assert!(c.eval(st.lower + 1e-9 * w).is_ok());
    assert!(matches!(c.eval(st.upper + 1e-12), Err(Error::StripViolation { .. })));
    assert!(matches!(c.eval(st.lower - 1e-12), Err(Error::StripViolation { .. })));
}

#[test]
fn interferer_order_only_changes_rounding() {
    let ints = vec![nak(3.7, 1.0), rice(2.0, 0.3), hoyt(0.4, 2.0), nak(0.6, 5.0)];
    let mut rev = ints.clone();
    rev.reverse();
    let a = build_composite(&scenario(nak(2.0, p0()), ints.clone(), 1.3)).unwrap();
    let b = build_composite(&scenario(nak(2.0, p0()), rev, 1.3)).unwrap();
    let again = build_composite(&scenario(nak(2.0, p0()), ints, 1.3)).unwrap();
    let st = a.strip();
    for f in [0.05, 0.3, 0.5, 0.9] {
        let t = st.lower + f * st.width();
        let (ea, eb) = (a.eval(t).unwrap(), b.eval(t).unwrap());
        assert!(rel_err(ea.k1, eb.k1) < 1e-15 || (ea.k1 - eb.k1).abs() < 1e-15);
        assert!(rel_err(ea.k2, eb.k2) < 1e-15);
        assert_eq!(ea, again.eval(t).unwrap());
    }
}
