//! Ground reflection coefficient and spherical divergence.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::geometry::{CemrGeometry, EarthModel};
use super::DomainError;
use crate::units::VACUUM_PERMITTIVITY;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroundElectrical {
    pub rel_permittivity: f64,
    /// S/m.
    pub conductivity: f64,
}

impl Default for GroundElectrical {
    fn default() -> Self {
        GroundElectrical {
            rel_permittivity: 15.0,
            conductivity: 5e3,
        }
    }
}

impl GroundElectrical {
    pub fn new(rel_permittivity: f64, conductivity: f64) -> Result<Self, DomainError> {
        if !(rel_permittivity >= 1.0) {
            return Err(DomainError::Invalid {
                what: "relative permittivity",
                value: rel_permittivity,
            });
        }
        if !(conductivity >= 0.0) {
            return Err(DomainError::Invalid {
                what: "conductivity",
                value: conductivity,
            });
        }
        Ok(GroundElectrical {
            rel_permittivity,
            conductivity,
        })
    }

    /// `b = σ / (2π f ε₀)`.
    pub fn loss_term(&self, frequency_hz: f64) -> f64 {
        self.conductivity / (2.0 * PI * frequency_hz * VACUUM_PERMITTIVITY)
    }

    /// Complex relative permittivity `ε_r − j b`.
    pub fn complex_permittivity(&self, frequency_hz: f64) -> Complex64 {
        Complex64::new(self.rel_permittivity, -self.loss_term(frequency_hz))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectionFormula {
    /// Vertical-polarization form with `cos²ψ` under the radical.
    #[default]
    Standard,
    /// `cos ψ` under the radical, as printed in the source model.
    PaperLiteral,
}

pub fn reflection_coefficient(
    psi: f64,
    ground: &GroundElectrical,
    frequency_hz: f64,
    formula: ReflectionFormula,
) -> Result<Complex64, DomainError> {
    if !(psi > 0.0 && psi <= FRAC_PI_2) {
        return Err(DomainError::GrazingAngle { psi });
    }
    let eps = ground.complex_permittivity(frequency_hz);
    let under = match formula {
        ReflectionFormula::Standard => eps - psi.cos().powi(2),
        ReflectionFormula::PaperLiteral => eps - psi.cos(),
    };
    let root = under.sqrt();
    let lead = eps * psi.sin();
    Ok((lead - root) / (lead + root))
}

/// `D = [1 + 2 r₁ r₂ / (a (r₁ + r₂) sin ψ)]^(−1/2)`.
pub fn divergence(r1: f64, r2: f64, radius: f64, psi: f64) -> Result<f64, DomainError> {
    if !(psi > 0.0 && psi <= FRAC_PI_2) {
        return Err(DomainError::GrazingAngle { psi });
    }
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(DomainError::Invalid {
            what: "reflection leg length",
            value: r1.min(r2),
        });
    }
    let sin = psi.sin();
    Ok((1.0 + 2.0 * r1 * r2 / (radius * (r1 + r2) * sin)).powf(-0.5))
}

pub fn divergence_factor(geom: &CemrGeometry, earth: &EarthModel) -> Result<f64, DomainError> {
    divergence(
        geom.reflect_r1,
        geom.reflect_r2,
        earth.effective_radius(),
        geom.grazing_angle_psi,
    )
}
