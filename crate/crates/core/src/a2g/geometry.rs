//! Specular-reflection geometry over a spherical earth.
//!
//! The UAV sits at A, height `H'` above the tangent plane at the reflection
//! point C₁; the ground station at B, height `H_G'`. The great-circle arc
//! between their sub-points is split at C₁ into `s₁` (UAV side) and `s₂`
//! (ground-station side) by the closed-form root of the specular cubic.

use std::f64::consts::PI;

use super::GeometryError;
use crate::units::{self, EARTH_RADIUS_M};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub radius_m: f64,
    /// Multiplies `radius_m` before any geometry; 4/3 models standard refraction.
    pub effective_radius_factor: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel {
            radius_m: EARTH_RADIUS_M,
            effective_radius_factor: 1.0,
        }
    }
}

impl EarthModel {
    pub fn new(radius_m: f64, effective_radius_factor: f64) -> Result<Self, GeometryError> {
        positive("earth radius", radius_m)?;
        positive("effective radius factor", effective_radius_factor)?;
        Ok(EarthModel {
            radius_m,
            effective_radius_factor,
        })
    }

    pub fn with_factor(effective_radius_factor: f64) -> Result<Self, GeometryError> {
        Self::new(EARTH_RADIUS_M, effective_radius_factor)
    }

    pub fn effective_radius(&self) -> f64 {
        self.radius_m * self.effective_radius_factor
    }
}

/// UAV and ground-station ends of an air-to-ground link. Heights are taken
/// equal to their distances from the tangent plane at the reflection point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2gEndpoints {
    pub uav_height_m: f64,
    pub gs_height_m: f64,
    pub ground_arc_m: f64,
    pub frequency_hz: f64,
}

impl A2gEndpoints {
    pub fn new(
        uav_height_m: f64,
        gs_height_m: f64,
        ground_arc_m: f64,
        frequency_hz: f64,
    ) -> Result<Self, GeometryError> {
        if !(gs_height_m >= 0.0) {
            return Err(GeometryError::InvalidInput {
                what: "ground station height",
                value: gs_height_m,
            });
        }
        if !(uav_height_m > gs_height_m) {
            return Err(GeometryError::InvalidInput {
                what: "UAV height (must exceed ground station height)",
                value: uav_height_m,
            });
        }
        if !(ground_arc_m >= 0.0) {
            return Err(GeometryError::InvalidInput {
                what: "ground arc",
                value: ground_arc_m,
            });
        }
        positive("frequency", frequency_hz)?;
        Ok(A2gEndpoints {
            uav_height_m,
            gs_height_m,
            ground_arc_m,
            frequency_hz,
        })
    }

    pub fn wavelength_m(&self) -> f64 {
        units::wavelength(self.frequency_hz)
    }
}

/// How the grazing angle and reflected path excess are obtained once the
/// reflection point is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrazingModel {
    /// `ψ = (H'+H_G')[1 − ω₁(1+ω₂²)]/s` and `Δs = 2s₁s₂ψ²/s`. Accurate for
    /// shallow links only; steep links give ψ beyond π/2.
    #[default]
    SmallAngle,
    /// Chord geometry: ψ from the local elevation of both legs at C₁ and
    /// `Δs = r₁ + r₂ − R₁`. Valid at any elevation.
    Exact,
}

/// The ω intermediates and the resulting arc split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecularSplit {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub arc_s1: f64,
    pub arc_s2: f64,
}

/// Splits arc `s` at the specular point for antenna heights `h_a` (the `s₁`
/// side) and `h_b`. No ordering between the heights is assumed.
pub fn specular_split(
    s: f64,
    h_a: f64,
    h_b: f64,
    radius: f64,
) -> Result<SpecularSplit, GeometryError> {
    if !(s > 0.0) {
        return Err(GeometryError::ZeroArc { arc_m: s });
    }
    if !(h_a + h_b > 0.0) || h_a < 0.0 || h_b < 0.0 {
        return Err(GeometryError::InvalidInput {
            what: "antenna heights",
            value: h_a + h_b,
        });
    }
    let omega1 = s * s / (4.0 * radius * (h_a + h_b));
    let omega2 = (h_a - h_b) / (h_a + h_b);
    let arg = 1.5 * omega2 * (3.0 * omega1 / (omega1 + 1.0).powi(3)).sqrt();
    if !(-1.0..=1.0).contains(&arg) {
        return Err(GeometryError::ArccosDomain { value: arg });
    }
    // cos(π/3 + arccos(x)/3) == sin(arcsin(x)/3); the latter keeps full
    // precision when ω₁ → 0.
    let omega3 = 2.0 * ((omega1 + 1.0) / (3.0 * omega1)).sqrt() * (arg.asin() / 3.0).sin();
    let arc_s1 = s * (1.0 + omega3) / 2.0;
    Ok(SpecularSplit {
        omega1,
        omega2,
        omega3,
        arc_s1,
        arc_s2: s - arc_s1,
    })
}

/// Straight-line distance between points at heights `h1`, `h2` above a sphere
/// of radius `a`, separated by central angle `phi`.
pub fn chord(h1: f64, h2: f64, a: f64, phi: f64) -> f64 {
    let half = (0.5 * phi).sin();
    ((h1 - h2).powi(2) + 4.0 * (a + h1) * (a + h2) * half * half).sqrt()
}

/// Elevation of the ray from a surface point to a point at height `h` and
/// central angle `phi`, measured from the local tangent plane.
pub fn surface_elevation(h: f64, a: f64, phi: f64) -> f64 {
    let half = (0.5 * phi).sin();
    let radial = h * phi.cos() - 2.0 * a * half * half;
    (radial / chord(h, 0.0, a, phi)).clamp(-1.0, 1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CemrGeometry {
    pub arc_s1: f64,
    pub arc_s2: f64,
    pub angle_phi: f64,
    pub angle_phi1: f64,
    pub angle_phi2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub grazing_angle_psi: f64,
    pub los_distance_r1: f64,
    /// UAV to reflection point.
    pub reflect_r1: f64,
    /// Reflection point to ground station.
    pub reflect_r2: f64,
    pub path_delta_s: f64,
    pub phase_delta_phi: f64,
    /// Effective earth radius the geometry was solved on.
    pub radius_m: f64,
}

pub fn solve_specular_geometry(
    endpoints: &A2gEndpoints,
    earth: &EarthModel,
    model: GrazingModel,
) -> Result<CemrGeometry, GeometryError> {
    let a = earth.effective_radius();
    let h = endpoints.uav_height_m;
    let hg = endpoints.gs_height_m;
    let s = endpoints.ground_arc_m;
    let split = specular_split(s, h, hg, a)?;

    let angle_phi = s / a;
    let angle_phi1 = split.arc_s1 / a;
    let angle_phi2 = split.arc_s2 / a;
    let los = chord(h, hg, a, angle_phi);
    let r1 = chord(h, 0.0, a, angle_phi1);
    let r2 = chord(hg, 0.0, a, angle_phi2);

    let (psi, delta_s) = match model {
        GrazingModel::SmallAngle => {
            let psi = (h + hg) * (1.0 - split.omega1 * (1.0 + split.omega2 * split.omega2)) / s;
            (psi, 2.0 * split.arc_s1 * split.arc_s2 * psi * psi / s)
        }
        GrazingModel::Exact => {
            let psi_a = surface_elevation(h, a, angle_phi1);
            let psi_b = surface_elevation(hg, a, angle_phi2);
            (0.5 * (psi_a + psi_b), (r1 + r2 - los).max(0.0))
        }
    };
    if !(psi > 0.0) {
        return Err(GeometryError::BeyondHorizon { psi });
    }

    Ok(CemrGeometry {
        arc_s1: split.arc_s1,
        arc_s2: split.arc_s2,
        angle_phi,
        angle_phi1,
        angle_phi2,
        omega1: split.omega1,
        omega2: split.omega2,
        omega3: split.omega3,
        grazing_angle_psi: psi,
        los_distance_r1: los,
        reflect_r1: r1,
        reflect_r2: r2,
        path_delta_s: delta_s,
        phase_delta_phi: 2.0 * PI * delta_s / endpoints.wavelength_m(),
        radius_m: a,
    })
}

fn positive(what: &'static str, value: f64) -> Result<(), GeometryError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidInput { what, value })
    }
}
