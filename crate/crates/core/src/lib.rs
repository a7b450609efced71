//! Outage probability of a wireless link with independent interferers,
//! computed by saddle point approximation of the CGF of `gamma = q I - p0`
//! and checked against Gil-Pelaez inversion, Monte Carlo simulation and an
//! exponential-signal closed form.
//!
//! All numerics are generic over [`Scalar`] (`f32`, `f64`); the `*64`
//! aliases below fix the usual double-precision instantiation.

pub mod analysis;
pub mod composite;
pub mod error;
pub mod fading;
pub mod model;
pub mod normal;
pub mod oracles;
pub mod quadrature;
pub mod saddlepoint;
pub mod scalar;
pub mod units;

pub use analysis::{
    ergodic_capacity, outage_curve, outage_point, sinr_outage, AnalysisConfig, CapacityResult, CurvePoint, Method,
    OutageResult, ScenarioTemplate, ThresholdGrid,
};
pub use composite::{build_composite, cgf_d3_composite, characteristic_function_composite, CompositeCgf, SirScenario};
pub use error::{Error, Result};
pub use fading::{GaussianTest, Hoyt, NakagamiM, PowerDistribution, PowerSampler, Rician};
pub use model::{CgfEval, CumulantModel, Strip};
pub use oracles::{
    exponential_signal_closed_form, gil_pelaez_ccdf, monte_carlo_capacity, monte_carlo_outage,
    monte_carlo_outage_curve, InversionResult, McEstimate, MonteCarloConfig, RNG_ALGORITHM,
};
pub use quadrature::{Integral, QuadratureConfig};
pub use saddlepoint::{
    ccdf, ccdf_at_mean, lugannani_rice, solve_saddle, BreakdownStrategy, CcdfEstimate, SaddleSolution, SolverConfig,
    TailBranch,
};
pub use scalar::Scalar;
pub use units::{db_to_linear, dbm_to_mw, linear_to_db};

pub type PowerDistribution64 = PowerDistribution<f64>;
pub type PowerDistribution32 = PowerDistribution<f32>;
pub type SirScenario64 = SirScenario<f64>;
pub type SirScenario32 = SirScenario<f32>;
pub type CompositeCgf64 = CompositeCgf<f64>;
pub type CompositeCgf32 = CompositeCgf<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type ScenarioTemplate64 = ScenarioTemplate<f64>;
pub type AnalysisConfig64 = AnalysisConfig<f64>;
pub type OutageResult64 = OutageResult<f64>;
