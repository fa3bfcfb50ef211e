//! Unit-mean Rician envelope for the air-to-ground field.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::DomainError;
use crate::units::db_to_linear;

/// Envelope fading applied to `|E_G|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fading {
    #[default]
    Off,
    /// Rician with linear K-factor; `k_factor = 0` is Rayleigh.
    Rician { k_factor: f64 },
}

impl Fading {
    pub fn rician_db(k_db: f64) -> Self {
        Fading::Rician {
            k_factor: db_to_linear(k_db),
        }
    }

    pub fn rayleigh() -> Self {
        Fading::Rician { k_factor: 0.0 }
    }

    pub fn envelope(&self) -> Result<Option<RicianEnvelope>, DomainError> {
        match *self {
            Fading::Off => Ok(None),
            Fading::Rician { k_factor } => RicianEnvelope::new(k_factor).map(Some),
        }
    }
}

/// Rician envelope `|ν + σ(X + jY)|` rescaled to unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianEnvelope {
    k_factor: f64,
    los: f64,
    sigma: f64,
    inv_mean: f64,
}

impl RicianEnvelope {
    pub fn new(k_factor: f64) -> Result<Self, DomainError> {
        if !(k_factor >= 0.0 && k_factor.is_finite()) {
            return Err(DomainError::Invalid {
                what: "Rician K-factor",
                value: k_factor,
            });
        }
        // Unit mean power first: ν² + 2σ² = 1.
        let los = (k_factor / (k_factor + 1.0)).sqrt();
        let sigma = (0.5 / (k_factor + 1.0)).sqrt();
        let mean = rician_mean(los, sigma);
        Ok(RicianEnvelope {
            k_factor,
            los,
            sigma,
            inv_mean: 1.0 / mean,
        })
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        (self.los + self.sigma * x).hypot(self.sigma * y) * self.inv_mean
    }
}

impl Distribution<f64> for RicianEnvelope {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        RicianEnvelope::sample(self, rng)
    }
}

/// `E[r] = σ √(π/2) L_{1/2}(−ν²/2σ²)`, written with exponentially scaled
/// Bessel functions so large K does not overflow.
fn rician_mean(los: f64, sigma: f64) -> f64 {
    let k = los * los / (2.0 * sigma * sigma);
    let half = 0.5 * k;
    sigma * (PI / 2.0).sqrt() * ((1.0 + k) * bessel_i0e(half) + k * bessel_i1e(half))
}

// Polynomial fits for I0 and I1 (Abramowitz & Stegun 9.8.1-9.8.4),
// relative error below 2e-7.

fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 3.75 {
        let t = (x / 3.75).powi(2);
        let i0 = 1.0
            + t * (3.515_622_9
                + t * (3.089_942_4
                    + t * (1.206_749_2 + t * (0.265_973_2 + t * (0.036_076_8 + t * 0.004_581_3)))));
        i0 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let p = 0.398_942_28
            + t * (0.013_285_92
                + t * (0.002_253_19
                    + t * (-0.001_575_65
                        + t * (0.009_162_81
                            + t * (-0.020_577_06
                                + t * (0.026_355_37 + t * (-0.016_476_33 + t * 0.003_923_77)))))));
        p / ax.sqrt()
    }
}

fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 3.75 {
        let t = (x / 3.75).powi(2);
        let i1 = ax
            * (0.5
                + t * (0.878_905_94
                    + t * (0.514_988_69
                        + t * (0.150_849_34
                            + t * (0.026_587_33 + t * (0.003_015_32 + t * 0.000_324_11))))));
        i1 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let p = 0.398_942_28
            + t * (-0.039_880_24
                + t * (-0.003_620_18
                    + t * (0.001_638_01
                        + t * (-0.010_315_55
                            + t * (0.022_829_67
                                + t * (-0.028_953_12 + t * (0.017_876_54 - t * 0.004_200_59)))))));
        p / ax.sqrt()
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn bessel_reference_values() {
        // I0(1), I1(1), I0(5), I1(5), I0(10).
        assert!((bessel_i0e(1.0) * 1f64.exp() - 1.266_065_877_752).abs() < 1e-6);
        assert!((bessel_i1e(1.0) * 1f64.exp() - 0.565_159_103_992).abs() < 1e-6);
        assert!((bessel_i0e(5.0) * 5f64.exp() - 27.239_871_823_6).abs() / 27.24 < 1e-6);
        assert!((bessel_i1e(5.0) * 5f64.exp() - 24.335_642_142_4).abs() / 24.34 < 1e-6);
        assert!((bessel_i0e(10.0) * 10f64.exp() - 2_815.716_628).abs() / 2_815.7 < 1e-6);
        assert_eq!(bessel_i0e(0.0), 1.0);
    }

    #[test]
    fn rayleigh_mean_closed_form() {
        // σ√(π/2) with σ² = 1/2.
        let m = rician_mean(0.0, 0.5f64.sqrt());
        assert!((m - (PI / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn envelopes_are_unit_mean() {
        for k in [0.0, 1.0, 10.0, 100.0, 1e4] {
            let env = RicianEnvelope::new(k).unwrap();
            let mut r = rng::stream(11, k as u64);
            let n = 1_000_000;
            let mean = (0..n).map(|_| env.sample(&mut r)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.01, "K={k}: {mean}");
            assert!((mean - 1.0).abs() < 0.002, "K={k}: {mean}");
        }
    }

    #[test]
    fn invalid_k_factor() {
        assert!(RicianEnvelope::new(-1.0).is_err());
        assert!(Fading::Rician { k_factor: f64::NAN }.envelope().is_err());
        assert!(Fading::Off.envelope().unwrap().is_none());
        assert!((Fading::rician_db(10.0) == Fading::Rician { k_factor: 10.0 }));
    }
}
