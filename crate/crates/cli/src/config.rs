//! JSON run configuration and its translation into library types.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spa_outage::{
    dbm_to_mw, AnalysisConfig, BreakdownStrategy, Error as CoreError, Method, MonteCarloConfig, PowerDistribution,
    QuadratureConfig, ScenarioTemplate, SolverConfig, ThresholdGrid,
};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub monte_carlo: MonteCarloSection,
    #[serde(default)]
    pub compare: CompareBounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub label: String,
    pub desired: FadingConfig,
    pub interferers: Vec<FadingConfig>,
    /// Absent means pure SIR.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_dbm: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    NakagamiM,
    Rayleigh,
    Rician,
    Hoyt,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub power_dbm: f64,
    /// Number of identical copies; interferers only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Spa,
    GilPelaez,
    MonteCarlo,
    ClosedForm,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Spa => Method::Spa,
            MethodName::GilPelaez => Method::GilPelaez,
            MethodName::MonteCarlo => Method::MonteCarlo,
            MethodName::ClosedForm => Method::ClosedForm,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownName {
    #[default]
    Interpolate,
    SkewnessCorrection,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_mean_w_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation_delta: Option<f64>,
    #[serde(default)]
    pub breakdown: BreakdownName,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_panels: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batches: Option<u64>,
}

/// Agreement bounds for `compare`.
///
/// Two deterministic methods must agree within `deterministic`, or within
/// `breakdown` when `|E[gamma] - x| < 0.05 sd`. Monte Carlo must agree
/// within `monte_carlo_sigmas` standard errors, plus `spa_monte_carlo` when
/// the other method is the saddle point approximation.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CompareBounds {
    pub deterministic: f64,
    pub breakdown: f64,
    pub monte_carlo_sigmas: f64,
    pub spa_monte_carlo: f64,
}

impl Default for CompareBounds {
    fn default() -> Self {
        Self {
            deterministic: 1e-2,
            breakdown: 5e-2,
            monte_carlo_sigmas: 4.0,
            spa_monte_carlo: 1e-2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
}

/// A validated scenario ready for the library.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub template: ScenarioTemplate<f64>,
}

/// Everything a command needs, in library types.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenarios: Vec<Scenario>,
    pub grid: Option<ThresholdGrid<f64>>,
    pub methods: Vec<Method>,
    pub analysis: AnalysisConfig<f64>,
    pub compare: CompareBounds,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Config(inner.to_string())
            } else {
                CliError::Config(format!("{path}: {inner}"))
            }
        })
    }

    /// Checks every field and converts to library types.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        if self.scenarios.is_empty() {
            return Err(field("scenarios", "at least one scenario is required"));
        }
        let scenarios = self
            .scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| s.to_scenario(&format!("scenarios[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if self.methods.is_empty() {
            return Err(field("methods", "at least one method is required"));
        }
        let mut methods: Vec<Method> = Vec::new();
        for m in &self.methods {
            let m = Method::from(*m);
            if methods.contains(&m) {
                return Err(field("methods", &format!("{m} is listed twice")));
            }
            methods.push(m);
        }
        let grid = self
            .grid
            .map(|g| ThresholdGrid::new(g.start_db, g.stop_db, g.step_db).map_err(|e| field("grid", &core_reason(&e))))
            .transpose()?;
        let analysis = AnalysisConfig {
            solver: self.solver.to_config()?,
            quadrature: self.quadrature.to_config()?,
            monte_carlo: self.monte_carlo.to_config()?,
        };
        for (name, v) in [
            ("deterministic", self.compare.deterministic),
            ("breakdown", self.compare.breakdown),
            ("monte_carlo_sigmas", self.compare.monte_carlo_sigmas),
            ("spa_monte_carlo", self.compare.spa_monte_carlo),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(field(&format!("compare.{name}"), "must be a nonnegative number"));
            }
        }
        Ok(Prepared {
            scenarios,
            grid,
            methods,
            analysis,
            compare: self.compare,
            output: self.output.clone(),
        })
    }
}

fn field(path: &str, msg: &str) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn core_reason(e: &CoreError) -> String {
    match e {
        CoreError::InvalidParameter { reason, value, .. } => format!("{reason} (got {value})"),
        CoreError::InvalidScenario(msg) => msg.clone(),
        other => other.to_string(),
    }
}

impl ScenarioConfig {
    fn to_scenario(&self, path: &str) -> Result<Scenario, CliError> {
        if self.label.trim().is_empty() {
            return Err(field(&format!("{path}.label"), "must not be empty"));
        }
        if self.desired.count.is_some() {
            return Err(field(&format!("{path}.desired.count"), "only interferers take a count"));
        }
        let desired = self.desired.to_distribution(&format!("{path}.desired"))?;
        if self.interferers.is_empty() {
            return Err(field(
                &format!("{path}.interferers"),
                "at least one interferer is required",
            ));
        }
        let mut interferers = Vec::new();
        for (k, f) in self.interferers.iter().enumerate() {
            let p = format!("{path}.interferers[{k}]");
            let d = f.to_distribution(&p)?;
            let count = f.count.unwrap_or(1);
            if count == 0 {
                return Err(field(&format!("{p}.count"), "must be at least 1"));
            }
            interferers.extend(std::iter::repeat_n(d, count));
        }
        let mut template = ScenarioTemplate::new(desired, interferers);
        if let Some(n) = self.noise_dbm {
            if !n.is_finite() {
                return Err(field(&format!("{path}.noise_dbm"), "must be finite"));
            }
            template = template.with_noise(dbm_to_mw(n));
        }
        Ok(Scenario {
            label: self.label.clone(),
            template,
        })
    }
}

impl FadingConfig {
    fn to_distribution(&self, path: &str) -> Result<PowerDistribution<f64>, CliError> {
        if !self.power_dbm.is_finite() {
            return Err(field(&format!("{path}.power_dbm"), "must be finite"));
        }
        let p = dbm_to_mw(self.power_dbm);
        let (needed, name): (&[&str], &str) = match self.family {
            Family::NakagamiM => (&["m"], "nakagami_m"),
            Family::Rayleigh => (&[], "rayleigh"),
            Family::Rician => (&["r"], "rician"),
            Family::Hoyt => (&["b"], "hoyt"),
        };
        for (key, value) in [("m", self.m), ("r", self.r), ("b", self.b)] {
            match (needed.contains(&key), value) {
                (true, None) => return Err(field(&format!("{path}.{key}"), &format!("required for family {name}"))),
                (false, Some(_)) => {
                    return Err(field(
                        &format!("{path}.{key}"),
                        &format!("not a parameter of family {name}"),
                    ))
                }
                _ => {}
            }
        }
        let built = match self.family {
            Family::NakagamiM => PowerDistribution::nakagami_m(self.m.unwrap(), p),
            Family::Rayleigh => PowerDistribution::rayleigh(p),
            Family::Rician => PowerDistribution::rician(self.r.unwrap(), p),
            Family::Hoyt => PowerDistribution::hoyt(self.b.unwrap(), p),
        };
        built.map_err(|e| match e {
            CoreError::InvalidParameter {
                parameter: "b", value, ..
            } => field(
                &format!("{path}.b"),
                &format!(
                    "Hoyt (Nakagami-q) needs -1 < b < 1, got {value}; sweeps such as b = 1, 2, 5, 10 lie outside \
                     the distribution's domain, use values like 0, 0.3, 0.6, 0.9 instead"
                ),
            ),
            CoreError::InvalidParameter { parameter, .. } => {
                let key = match parameter {
                    "mean_power" => "power_dbm",
                    other => other,
                };
                field(&format!("{path}.{key}"), &core_reason(&e))
            }
            other => field(path, &core_reason(&other)),
        })
    }
}

fn positive(path: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(field(path, &format!("must be positive and finite, got {x}"))),
    }
}

fn at_least_one<N: Copy + Into<u64>>(path: &str, v: Option<N>, default: N) -> Result<N, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x.into() >= 1 => Ok(x),
        Some(_) => Err(field(path, "must be at least 1")),
    }
}

impl SolverSection {
    fn to_config(self) -> Result<SolverConfig<f64>, CliError> {
        let d = SolverConfig::<f64>::default();
        Ok(SolverConfig {
            tol: positive("solver.tol", self.tol, d.tol)?,
            max_iter: at_least_one("solver.max_iter", self.max_iter.map(|v| v as u64), d.max_iter as u64)? as usize,
            near_mean_w_threshold: positive(
                "solver.near_mean_w_threshold",
                self.near_mean_w_threshold,
                d.near_mean_w_threshold,
            )?,
            interpolation_delta: positive(
                "solver.interpolation_delta",
                self.interpolation_delta,
                d.interpolation_delta,
            )?,
            breakdown: match self.breakdown {
                BreakdownName::Interpolate => BreakdownStrategy::Interpolate,
                BreakdownName::SkewnessCorrection => BreakdownStrategy::SkewnessCorrection,
            },
        })
    }
}

impl QuadratureSection {
    fn to_config(self) -> Result<QuadratureConfig<f64>, CliError> {
        let d = QuadratureConfig::<f64>::default();
        Ok(QuadratureConfig {
            rel_tol: positive("quadrature.rel_tol", self.rel_tol, d.rel_tol)?,
            abs_tol: positive("quadrature.abs_tol", self.abs_tol, d.abs_tol)?,
            max_panels: at_least_one(
                "quadrature.max_panels",
                self.max_panels.map(|v| v as u64),
                d.max_panels as u64,
            )? as usize,
        })
    }
}

impl MonteCarloSection {
    fn to_config(self) -> Result<MonteCarloConfig, CliError> {
        let d = MonteCarloConfig::default();
        Ok(MonteCarloConfig {
            samples: at_least_one("monte_carlo.samples", self.samples, d.samples)?,
            seed: self.seed.unwrap_or(d.seed),
            batches: at_least_one("monte_carlo.batches", self.batches, d.batches)?,
        })
    }
}
