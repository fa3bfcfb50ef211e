//! Stochastic-geometry model of sub-UAV to central-UAV links.

mod analytic;
mod domain;
mod montecarlo;
mod nearest;
mod ppp;
mod sinr;

use thiserror::Error;

use crate::quad::QuadratureError;

pub use analytic::{
    coverage_power_derivative, coverage_probability_analytic, interference_laplace,
    interference_volume, AnalyticConfig,
};
pub use domain::{distance, A2aScenario, AirspaceVolume, Density, Point, SamplingDomain};
pub use montecarlo::{
    averaged_sinr_sweep, coverage_probability_mc, simulate, tagged_distances, Association,
    CountLaw, CoverageMethod, CoverageResult, McConfig, SinrSample,
};
pub use nearest::{
    distance_for_mass, ks_statistic, nearest_distance_cdf, nearest_distance_pdf,
    nearest_distance_quantile,
};
pub use ppp::{
    poisson_count, sample_fixed, sample_ppp, uniform_point, unit_vector, PppRealization,
};
pub use sinr::{sinr, sinr_with_gains, PowerFading};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum A2aError {
    #[error("realization contains no sub-UAV")]
    EmptyRealization,
    #[error("sub-UAV {index} coincides with the central UAV")]
    DegenerateDistance { index: usize },
    #[error("analytic coverage needs Rayleigh fading (shape 1), got shape {shape}")]
    UnsupportedFading { shape: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid {what}: {value}")]
    Invalid { what: &'static str, value: f64 },
}
