//! The `outage`, `capacity` and `compare` commands.

use std::collections::BTreeMap;
use std::io::Write;

use spa_outage::{
    build_composite, db_to_linear, ergodic_capacity, exponential_signal_closed_form, outage_curve, outage_point,
    AnalysisConfig, CapacityResult, CumulantModel, Error as CoreError, Method, OutageResult, ScenarioTemplate,
    RNG_ALGORITHM,
};

use crate::config::{CompareBounds, Prepared, Scenario};
use crate::output::{self, CapacityRow, DeviationRow, OutageRow};
use crate::{CliError, Exit};

/// Escalation steps after the first attempt fails to converge.
const RETRIES: u32 = 2;

fn retryable(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::DivergedSolver { .. } | CoreError::QuadratureNotConverged { .. }
    )
}

/// Raises iteration and panel budgets by 4^level.
fn escalate(cfg: &AnalysisConfig<f64>, level: u32) -> AnalysisConfig<f64> {
    let factor = 4usize.pow(level);
    let mut c = *cfg;
    c.solver.max_iter = c.solver.max_iter.saturating_mul(factor);
    c.quadrature.max_panels = c.quadrature.max_panels.saturating_mul(factor);
    c
}

fn check_methods(p: &Prepared) -> Result<(), CliError> {
    if !p.methods.contains(&Method::ClosedForm) {
        return Ok(());
    }
    for s in &p.scenarios {
        let probe = s
            .template
            .at_threshold(1.0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        if let Err(CoreError::UnsupportedScenario(why)) = exponential_signal_closed_form(&probe) {
            return Err(CliError::Config(format!(
                "methods: closed_form does not apply to scenario '{}' ({why})",
                s.label
            )));
        }
    }
    Ok(())
}

/// `(q_db, q_linear, result)` at one grid point.
type GridOutcome = (f64, f64, Result<OutageResult<f64>, CoreError>);

/// One method's curve for one scenario, retried point by point.
fn curve_with_retries(s: &Scenario, p: &Prepared, method: Method) -> Result<Vec<GridOutcome>, CliError> {
    let grid = p
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Config("grid: required for this command".into()))?;
    let curve = outage_curve(&s.template, grid, method, &p.analysis).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(curve
        .into_iter()
        .map(|pt| {
            let mut outcome = pt.outcome;
            let mut level = 1;
            while level <= RETRIES && matches!(&outcome, Err(e) if retryable(e)) {
                let cfg = escalate(&p.analysis, level);
                outcome = s
                    .template
                    .at_threshold(pt.q_linear)
                    .and_then(|sc| outage_point(&sc, pt.q_db, method, &cfg));
                level += 1;
            }
            (pt.q_db, pt.q_linear, outcome)
        })
        .collect())
}

type Curves = Vec<(Method, Vec<GridOutcome>)>;

fn all_curves(s: &Scenario, p: &Prepared) -> Result<Curves, CliError> {
    p.methods
        .iter()
        .map(|&m| Ok((m, curve_with_retries(s, p, m)?)))
        .collect()
}

fn report_failures(label: &str, curves: &Curves, log: &mut dyn Write) -> usize {
    let mut failures = 0;
    for (m, pts) in curves {
        for (q_db, _, r) in pts {
            if let Err(e) = r {
                failures += 1;
                let _ = writeln!(log, "error: {label}: {m} at q_db = {q_db}: {e}");
            }
        }
    }
    failures
}

/// Writes the outage CSV and a cross-method summary.
pub fn outage(p: &Prepared, csv_out: &mut dyn Write, log: &mut dyn Write) -> Result<Exit, CliError> {
    check_methods(p)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut summary = Vec::new();
    for s in &p.scenarios {
        let curves = all_curves(s, p)?;
        failures += report_failures(&s.label, &curves, log);
        for (m, pts) in &curves {
            for (q_db, q_linear, r) in pts {
                rows.push(OutageRow::new(&s.label, *q_db, *q_linear, *m, r.as_ref().ok()));
            }
        }
        for (a, b, max, at) in pairwise_max(&curves) {
            summary.push(format!("{}: max |{a} - {b}| = {max:.4e} at q_db = {at}", s.label));
        }
    }
    output::write_outage(csv_out, &rows)?;
    write_summary(log, p, &summary)?;
    Ok(if failures > 0 { Exit::Numerical } else { Exit::Ok })
}

fn pairwise_max(curves: &Curves) -> Vec<(Method, Method, f64, f64)> {
    let mut out = Vec::new();
    for (i, (ma, a)) in curves.iter().enumerate() {
        for (mb, b) in &curves[i + 1..] {
            let mut worst: Option<(f64, f64)> = None;
            for ((q_db, _, ra), (_, _, rb)) in a.iter().zip(b) {
                if let (Ok(x), Ok(y)) = (ra, rb) {
                    let d = (x.p_out - y.p_out).abs();
                    if worst.is_none_or(|(w, _)| d > w) {
                        worst = Some((d, *q_db));
                    }
                }
            }
            if let Some((d, at)) = worst {
                out.push((*ma, *mb, d, at));
            }
        }
    }
    out
}

fn write_summary(log: &mut dyn Write, p: &Prepared, lines: &[String]) -> Result<(), CliError> {
    if p.methods.contains(&Method::MonteCarlo) {
        let mc = &p.analysis.monte_carlo;
        writeln!(
            log,
            "monte carlo: rng {RNG_ALGORITHM}, seed {}, {} samples in {} batches",
            mc.seed, mc.samples, mc.batches
        )?;
    }
    for l in lines {
        writeln!(log, "{l}")?;
    }
    Ok(())
}

/// Capacity for every scenario and method, one row each.
pub fn capacity(p: &Prepared, csv_out: &mut dyn Write, log: &mut dyn Write) -> Result<Exit, CliError> {
    check_methods(p)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut summary = Vec::new();
    for s in &p.scenarios {
        let mut done: Vec<CapacityResult<f64>> = Vec::new();
        for &m in &p.methods {
            let mut r = ergodic_capacity(&s.template, m, &p.analysis);
            let mut level = 1;
            while level <= RETRIES && matches!(&r, Err(e) if retryable(e)) {
                r = ergodic_capacity(&s.template, m, &escalate(&p.analysis, level));
                level += 1;
            }
            match r {
                Ok(c) => {
                    rows.push(CapacityRow::new(&s.label, m, Some(&c)));
                    done.push(c);
                }
                Err(e) => {
                    failures += 1;
                    writeln!(log, "error: {}: {m}: {e}", s.label)?;
                    rows.push(CapacityRow::new(&s.label, m, None));
                }
            }
        }
        for (i, a) in done.iter().enumerate() {
            for b in &done[i + 1..] {
                summary.push(format!(
                    "{}: |{} - {}| = {:.4e} bits/s/Hz",
                    s.label,
                    a.method,
                    b.method,
                    (a.capacity_bits - b.capacity_bits).abs()
                ));
            }
        }
    }
    output::write_capacity(csv_out, &rows)?;
    write_summary(log, p, &summary)?;
    Ok(if failures > 0 { Exit::Numerical } else { Exit::Ok })
}

/// Whether `x = -q N0` lies within 0.05 standard deviations of `E[gamma]`.
pub fn in_breakdown_neighbourhood(template: &ScenarioTemplate<f64>, q_db: f64) -> bool {
    let Ok(s) = template.at_threshold(db_to_linear(q_db)) else {
        return false;
    };
    let Ok(c) = build_composite(&s) else {
        return false;
    };
    let x = -s.threshold_q * s.noise_power;
    (c.mean() - x).abs() < 0.05 * c.variance().sqrt()
}

/// Allowed deviation between two results at one point.
pub fn pair_bound(
    bounds: &CompareBounds,
    a: &OutageResult<f64>,
    b: &OutageResult<f64>,
    near_mean: bool,
    mc_samples: u64,
) -> f64 {
    let (mc, other) = match (a.method, b.method) {
        (Method::MonteCarlo, _) => (Some(a), b),
        (_, Method::MonteCarlo) => (Some(b), a),
        _ => (None, a),
    };
    match mc {
        None if near_mean => bounds.breakdown,
        None => bounds.deterministic,
        Some(mc) => {
            // batch spread, floored by the binomial error of the reference
            let binomial = (other.p_out * (1.0 - other.p_out) / mc_samples as f64).sqrt();
            let se = mc.error_estimate.unwrap_or(0.0).max(binomial);
            let extra = if other.method == Method::Spa {
                bounds.spa_monte_carlo
            } else {
                0.0
            };
            bounds.monte_carlo_sigmas * se + extra
        }
    }
}

/// Per-point deviation table plus max/mean summaries; exit 3 when any
/// deviation exceeds its bound.
pub fn compare(p: &Prepared, csv_out: &mut dyn Write, log: &mut dyn Write) -> Result<Exit, CliError> {
    if p.methods.len() < 2 {
        return Err(CliError::Config("methods: compare needs at least two methods".into()));
    }
    check_methods(p)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    // (scenario, a, b) -> (max, sum, count, exceeded)
    type PairStats = (f64, f64, usize, usize);
    let mut stats: BTreeMap<(usize, Method, Method), PairStats> = BTreeMap::new();
    for (si, s) in p.scenarios.iter().enumerate() {
        let curves = all_curves(s, p)?;
        failures += report_failures(&s.label, &curves, log);
        for (i, (ma, a)) in curves.iter().enumerate() {
            for (mb, b) in &curves[i + 1..] {
                for ((q_db, _, ra), (_, _, rb)) in a.iter().zip(b) {
                    let (Ok(x), Ok(y)) = (ra, rb) else { continue };
                    let near = in_breakdown_neighbourhood(&s.template, *q_db);
                    let bound = pair_bound(&p.compare, x, y, near, p.analysis.monte_carlo.samples);
                    let d = (x.p_out - y.p_out).abs();
                    let within = d <= bound;
                    let e = stats.entry((si, *ma, *mb)).or_insert((0.0, 0.0, 0, 0));
                    e.0 = e.0.max(d);
                    e.1 += d;
                    e.2 += 1;
                    e.3 += usize::from(!within);
                    rows.push(DeviationRow {
                        scenario: s.label.clone(),
                        q_db: *q_db,
                        method_a: *ma,
                        method_b: *mb,
                        p_a: x.p_out,
                        p_b: y.p_out,
                        abs_diff: d,
                        bound,
                        near_mean: near,
                        within,
                    });
                }
            }
        }
    }
    output::write_deviations(csv_out, &rows)?;
    let mut exceeded = 0;
    let mut lines = Vec::new();
    for ((si, a, b), (max, sum, count, bad)) in &stats {
        exceeded += bad;
        lines.push(format!(
            "{}: {a} vs {b}: max {max:.4e}, mean {:.4e}, {bad} of {count} points beyond bound",
            p.scenarios[*si].label,
            sum / *count as f64
        ));
    }
    write_summary(log, p, &lines)?;
    writeln!(
        log,
        "{}",
        if exceeded == 0 {
            "all deviations within bounds"
        } else {
            "deviation bounds exceeded"
        }
    )?;
    Ok(if failures > 0 {
        Exit::Numerical
    } else if exceeded > 0 {
        Exit::BoundExceeded
    } else {
        Exit::Ok
    })
}
