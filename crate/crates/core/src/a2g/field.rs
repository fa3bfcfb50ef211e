//! Phase-coherent field sum at the ground station and the resulting path loss.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fading::Fading;
use super::geometry::{
    chord, solve_specular_geometry, surface_elevation, A2gEndpoints, CemrGeometry, EarthModel,
    GrazingModel,
};
use super::reflection::{divergence, reflection_coefficient, GroundElectrical, ReflectionFormula};
use super::{A2gError, DomainError, GeometryError};

/// One ground-reflected ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayContribution {
    /// Surface reflection coefficient Γ⊥ at the ray's grazing angle.
    pub surface: Complex64,
    pub divergence: f64,
    /// Phase lag of the reflected path relative to line of sight, rad.
    pub phase_delta: f64,
}

impl RayContribution {
    /// `Γ_t = D Γ⊥`.
    pub fn gamma(&self) -> Complex64 {
        self.surface * self.divergence
    }
}

/// `E_G = E_LoS [1 + Σ |Γ_t| e^{−j(Δφ_t − φ_t)}]`.
pub fn received_field(los: Complex64, rays: &[RayContribution]) -> Complex64 {
    let sum: Complex64 = rays
        .iter()
        .map(|r| {
            let g = r.gamma();
            Complex64::from_polar(g.norm(), -(r.phase_delta - g.arg()))
        })
        .sum();
    los * (Complex64::new(1.0, 0.0) + sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2gLinkBudget {
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Beamwidth ϱ; the ray count is ⌊π/(2ϱ)⌋.
    pub beamwidth_rad: f64,
}

impl A2gLinkBudget {
    /// Splits a total gain evenly (in dB) between transmitter and receiver.
    pub fn with_total_gain(tx_power_w: f64, total_gain: f64) -> Self {
        let each = total_gain.sqrt();
        A2gLinkBudget {
            tx_power_w,
            tx_gain: each,
            rx_gain: total_gain / each,
            beamwidth_rad: FRAC_PI_2,
        }
    }

    pub fn total_gain(&self) -> f64 {
        self.tx_gain * self.rx_gain
    }

    pub fn ray_count(&self) -> usize {
        (PI / (2.0 * self.beamwidth_rad)).floor() as usize
    }

    fn validate(&self) -> Result<(), DomainError> {
        for (what, v) in [
            ("transmit power", self.tx_power_w),
            ("transmit gain", self.tx_gain),
            ("receive gain", self.rx_gain),
            ("beamwidth", self.beamwidth_rad),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DomainError::Invalid { what, value: v });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkOptions {
    pub grazing: GrazingModel,
    pub formula: ReflectionFormula,
    /// With reflections off the link reduces to free space.
    pub reflections: bool,
}

impl LinkOptions {
    pub fn free_space() -> Self {
        LinkOptions {
            reflections: false,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2gLink {
    pub endpoints: A2gEndpoints,
    pub earth: EarthModel,
    pub ground: GroundElectrical,
    pub budget: A2gLinkBudget,
    pub options: LinkOptions,
}

/// Completed link evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct A2gOutcome {
    pub geometry: CemrGeometry,
    pub rays: Vec<RayContribution>,
    pub field: Complex64,
    pub rx_power_w: f64,
    pub path_loss_db: f64,
}

impl A2gLink {
    /// Deterministic (fading-free) evaluation.
    pub fn evaluate(&self) -> Result<A2gOutcome, A2gError> {
        self.budget.validate()?;
        let geometry = solve_specular_geometry(&self.endpoints, &self.earth, self.options.grazing)?;
        let rays = if self.options.reflections {
            self.rays(&geometry)?
        } else {
            Vec::new()
        };
        let los = Complex64::new((self.budget.tx_power_w * self.budget.tx_gain).sqrt(), 0.0);
        let field = received_field(los, &rays);
        let lambda = self.endpoints.wavelength_m();
        let rx_power_w = field.norm_sqr() * self.budget.rx_gain * lambda * lambda
            / (4.0 * PI * geometry.los_distance_r1).powi(2);
        Ok(A2gOutcome {
            geometry,
            rays,
            field,
            rx_power_w,
            path_loss_db: -10.0 * (rx_power_w / self.budget.tx_power_w).log10(),
        })
    }

    /// Reflected rays. The last ray is the specular one from `geometry`;
    /// with T > 1 rays the t-th reflection point sits at arc `s₁·t/T` from
    /// the UAV and its legs come from chord geometry.
    fn rays(&self, geometry: &CemrGeometry) -> Result<Vec<RayContribution>, A2gError> {
        let count = self.budget.ray_count();
        let freq = self.endpoints.frequency_hz;
        let lambda = self.endpoints.wavelength_m();
        let a = geometry.radius_m;
        let mut rays = Vec::with_capacity(count);
        for t in 1..=count {
            let (psi, r1, r2, delta_s) = if t == count {
                (
                    geometry.grazing_angle_psi,
                    geometry.reflect_r1,
                    geometry.reflect_r2,
                    geometry.path_delta_s,
                )
            } else {
                let arc = geometry.arc_s1 * t as f64 / count as f64;
                let phi_a = arc / a;
                let phi_b = geometry.angle_phi - phi_a;
                let r1 = chord(self.endpoints.uav_height_m, 0.0, a, phi_a);
                let r2 = chord(self.endpoints.gs_height_m, 0.0, a, phi_b);
                let psi = surface_elevation(self.endpoints.gs_height_m, a, phi_b);
                if !(psi > 0.0) {
                    return Err(GeometryError::BeyondHorizon { psi }.into());
                }
                (psi, r1, r2, (r1 + r2 - geometry.los_distance_r1).max(0.0))
            };
            let surface = reflection_coefficient(psi, &self.ground, freq, self.options.formula)?;
            rays.push(RayContribution {
                surface,
                divergence: divergence(r1, r2, a, psi)?,
                phase_delta: 2.0 * PI * delta_s / lambda,
            });
        }
        Ok(rays)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FadingEval {
    /// One envelope draw scales `E_G`.
    #[default]
    SingleDraw,
    /// Path loss averaged (in dB) over this many draws.
    Expectation { draws: usize },
}

/// Path loss with optional envelope fading. `rng` is only drawn from when
/// fading is enabled.
pub fn path_loss<R: Rng + ?Sized>(
    link: &A2gLink,
    fading: Fading,
    eval: FadingEval,
    rng: &mut R,
) -> Result<A2gOutcome, A2gError> {
    let mut outcome = link.evaluate()?;
    let Some(envelope) = fading.envelope()? else {
        return Ok(outcome);
    };
    match eval {
        FadingEval::SingleDraw => {
            let r = envelope.sample(rng);
            outcome.field *= r;
            outcome.rx_power_w *= r * r;
            outcome.path_loss_db -= 20.0 * r.log10();
        }
        FadingEval::Expectation { draws } => {
            if draws == 0 {
                return Err(DomainError::Invalid {
                    what: "fading draw count",
                    value: 0.0,
                }
                .into());
            }
            let mean_log = (0..draws)
                .map(|_| envelope.sample(rng).log10())
                .sum::<f64>()
                / draws as f64;
            outcome.path_loss_db -= 20.0 * mean_log;
            outcome.rx_power_w = link.budget.tx_power_w * 10f64.powf(-outcome.path_loss_db / 10.0);
        }
    }
    Ok(outcome)
}
