//! Coverage probability by quadrature of the PPP Laplace functional.

use serde::{Deserialize, Serialize};

use super::domain::{A2aScenario, AirspaceVolume, Point};
use super::montecarlo::{CoverageMethod, CoverageResult};
use super::nearest::{distance_for_mass, nearest_distance_pdf};
use super::A2aError;
use crate::quad::{integrate_box, try_integrate, QuadConfig, QuadratureError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticConfig {
    /// Relative tolerance of each axis of the volume integral.
    pub axis_rel_tol: f64,
    /// Relative tolerance of the outer distance integral.
    pub outer_rel_tol: f64,
    /// Evaluation budget per one-dimensional integral.
    pub max_evals: usize,
    /// Outer integral stops where the nearest-neighbour CDF is `1 − e^{−tail_mass}`.
    pub tail_mass: f64,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        AnalyticConfig {
            axis_rel_tol: 1e-5,
            outer_rel_tol: 1e-4,
            max_evals: 200_000,
            tail_mass: 50.0,
        }
    }
}

impl AnalyticConfig {
    fn axis(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.axis_rel_tol,
            max_evals: self.max_evals,
            ..Default::default()
        }
    }

    fn outer(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.outer_rel_tol,
            max_evals: self.max_evals,
            ..Default::default()
        }
    }
}

/// Distances from `c` to both faces along one axis, merged when equal.
fn folds(lo: f64, c: f64, hi: f64) -> Vec<(f64, f64)> {
    let (a, b) = (c - lo, hi - c);
    if a == b {
        vec![(a, 2.0)]
    } else {
        [(a, 1.0), (b, 1.0)]
            .into_iter()
            .filter(|(e, _)| *e > 0.0)
            .collect()
    }
}

/// `Θ = ∫_V c / (c + r^δ) dV`, `r` measured from `central`. The box is cut
/// at `central` so the peak of the integrand sits on sub-box corners.
pub fn interference_volume(
    c: f64,
    delta: f64,
    vol: &AirspaceVolume,
    central: &Point,
    cfg: &AnalyticConfig,
) -> Result<f64, QuadratureError> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = (vol.lower(), vol.upper());
    let fx = folds(lo[0], central[0], hi[0]);
    let fy = folds(lo[1], central[1], hi[1]);
    let fz = folds(lo[2], central[2], hi[2]);
    let axis = cfg.axis();
    let half = 0.5 * delta;
    let mut total = 0.0;
    for &(ex, mx) in &fx {
        for &(ey, my) in &fy {
            for &(ez, mz) in &fz {
                let q = if delta == 2.0 {
                    integrate_box(
                        |x, y, z| c / (c + x * x + y * y + z * z),
                        (0.0, ex),
                        (0.0, ey),
                        (0.0, ez),
                        &axis,
                    )?
                } else {
                    integrate_box(
                        |x, y, z| c / (c + (x * x + y * y + z * z).powf(half)),
                        (0.0, ex),
                        (0.0, ey),
                        (0.0, ez),
                        &axis,
                    )?
                };
                total += mx * my * mz * q.value;
            }
        }
    }
    Ok(total)
}

/// `exp(−λ Θ)` with `c = Λ G_a`: the Laplace transform of the box
/// interference at `Λ`, for Rayleigh fading.
pub fn interference_laplace(
    lambda_arg: f64,
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &AnalyticConfig,
) -> Result<f64, A2aError> {
    if !(lambda_arg >= 0.0) {
        return Err(A2aError::Invalid {
            what: "Laplace argument",
            value: lambda_arg,
        });
    }
    let intensity = scen.density.intensity(vol.volume());
    let theta = interference_volume(
        lambda_arg * scen.channel_gain,
        scen.pathloss_exp,
        vol,
        &vol.center(),
        cfg,
    )?;
    Ok((-intensity * theta).exp())
}

fn require_rayleigh(scen: &A2aScenario) -> Result<(), A2aError> {
    scen.validate()?;
    if scen.fading_shape != 1.0 {
        return Err(A2aError::UnsupportedFading {
            shape: scen.fading_shape,
        });
    }
    Ok(())
}

/// Integrates `w(d) f(d) L(d) e^{−a(d)/P}` over the serving distance, where
/// `f` is the nearest-neighbour density, `L` the interference Laplace factor
/// and `a = θ d^δ N / G_a`.
fn distance_integral<W>(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &AnalyticConfig,
    weight: W,
) -> Result<(f64, usize), A2aError>
where
    W: Fn(f64) -> f64,
{
    require_rayleigh(scen)?;
    let intensity = scen.density.intensity(vol.volume());
    let central = vol.center();
    let upper = distance_for_mass(cfg.tail_mass, intensity);
    let noise = scen.noise_w();
    let delta = scen.pathloss_exp;
    let q = try_integrate(
        |d| {
            if d == 0.0 {
                return Ok(0.0);
            }
            let c = scen.threshold * d.powf(delta);
            let a = c * noise / scen.channel_gain;
            let noise_term = (-a / scen.tx_power_w).exp();
            let pdf = nearest_distance_pdf(d, intensity).unwrap_or(0.0);
            if noise_term * pdf == 0.0 {
                return Ok(0.0);
            }
            let theta = interference_volume(c, delta, vol, &central, cfg)?;
            Ok(pdf * noise_term * (-intensity * theta).exp() * weight(a))
        },
        0.0,
        upper,
        &cfg.outer(),
    )?;
    Ok((q.value, q.evaluations))
}

/// Coverage probability of the tagged sub-UAV under Rayleigh fading.
pub fn coverage_probability_analytic(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &AnalyticConfig,
) -> Result<CoverageResult, A2aError> {
    let (p, evaluations) = distance_integral(scen, vol, cfg, |_| 1.0)?;
    Ok(CoverageResult {
        p_cov: p.clamp(0.0, 1.0),
        method: CoverageMethod::Analytic { evaluations },
        std_error: 0.0,
    })
}

/// `∂p_cov/∂P_s`, per watt. Only the noise term depends on the power.
pub fn coverage_power_derivative(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &AnalyticConfig,
) -> Result<f64, A2aError> {
    let p = scen.tx_power_w;
    let (v, _) = distance_integral(scen, vol, cfg, |a| a / (p * p))?;
    Ok(v)
}
