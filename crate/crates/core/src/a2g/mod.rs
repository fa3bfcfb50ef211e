//! Curved-earth multi-ray air-to-ground channel.

mod fading;
mod field;
mod geometry;
mod reflection;

use thiserror::Error;

pub use fading::{Fading, RicianEnvelope};
pub use field::{
    path_loss, received_field, A2gLink, A2gLinkBudget, A2gOutcome, FadingEval, LinkOptions,
    RayContribution,
};
pub use geometry::{
    chord, solve_specular_geometry, specular_split, surface_elevation, A2gEndpoints, CemrGeometry,
    EarthModel, GrazingModel, SpecularSplit,
};
pub use reflection::{
    divergence, divergence_factor, reflection_coefficient, GroundElectrical, ReflectionFormula,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("ground arc must be positive (omega1 undefined), got {arc_m} m")]
    ZeroArc { arc_m: f64 },
    #[error("arccos argument {value} of omega3 outside [-1, 1]")]
    ArccosDomain { value: f64 },
    #[error("specular point beyond the radio horizon (grazing angle {psi} rad)")]
    BeyondHorizon { psi: f64 },
    #[error("invalid {what}: {value}")]
    InvalidInput { what: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("grazing angle {psi} rad outside (0, pi/2]")]
    GrazingAngle { psi: f64 },
    #[error("invalid {what}: {value}")]
    Invalid { what: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum A2gError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
