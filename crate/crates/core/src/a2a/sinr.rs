//! SINR at the central UAV.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use super::domain::A2aScenario;
use super::ppp::PppRealization;
use super::A2aError;

/// Unit-mean Gamma power fading `ρ ~ Γ(ι, 1/ι)`.
#[derive(Debug, Clone, Copy)]
pub enum PowerFading {
    /// `ρ = 1` on every link.
    None,
    Rayleigh,
    Nakagami(Gamma<f64>),
}

impl PowerFading {
    pub fn new(shape: f64) -> Result<Self, A2aError> {
        if !(shape >= 1.0 && shape.is_finite()) {
            return Err(A2aError::Invalid {
                what: "fading shape",
                value: shape,
            });
        }
        if shape == 1.0 {
            return Ok(PowerFading::Rayleigh);
        }
        let g = Gamma::new(shape, 1.0 / shape).map_err(|_| A2aError::Invalid {
            what: "fading shape",
            value: shape,
        })?;
        Ok(PowerFading::Nakagami(g))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PowerFading::None => 1.0,
            PowerFading::Rayleigh => Exp1.sample(rng),
            PowerFading::Nakagami(g) => g.sample(rng),
        }
    }
}

/// SINR with explicit per-link fading gains, `gains[i]` belonging to
/// `distances[i]`. The tagged link is the signal, every other link interferes.
pub fn sinr_with_gains(
    distances: &[f64],
    tagged: usize,
    gains: &[f64],
    scen: &A2aScenario,
) -> Result<f64, A2aError> {
    if distances.is_empty() {
        return Err(A2aError::EmptyRealization);
    }
    let rx = |i: usize| -> Result<f64, A2aError> {
        let d = distances[i];
        if !(d > 0.0) {
            return Err(A2aError::DegenerateDistance { index: i });
        }
        Ok(scen.tx_power_w * scen.channel_gain * gains[i] * d.powf(-scen.pathloss_exp))
    };
    let signal = rx(tagged)?;
    let mut interference = 0.0;
    for i in (0..distances.len()).filter(|&i| i != tagged) {
        interference += rx(i)?;
    }
    Ok(signal / (scen.noise_w() + interference))
}

/// SINR of the tagged sub-UAV with fresh fading on every link.
pub fn sinr<R: Rng + ?Sized>(
    realization: &PppRealization,
    scen: &A2aScenario,
    fading: &PowerFading,
    rng: &mut R,
) -> Result<f64, A2aError> {
    let gains: Vec<f64> = (0..realization.distances.len())
        .map(|_| fading.sample(rng))
        .collect();
    sinr_with_gains(
        &realization.distances,
        realization.tagged_index,
        &gains,
        scen,
    )
}
