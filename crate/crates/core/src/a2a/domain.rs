//! Airspace volumes, sampling domains and scenario parameters.

use serde::{Deserialize, Serialize};

use super::A2aError;
use crate::units::{db_to_linear, dbm_to_watts};

pub type Point = [f64; 3];

pub fn distance(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Box `[−Lx, Lx] × [−Ly, Ly] × [0, Lz]` shifted by `center_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirspaceVolume {
    pub half_extent_x: f64,
    pub half_extent_y: f64,
    pub extent_z: f64,
    pub center_offset: Point,
}

impl AirspaceVolume {
    pub fn new(
        half_extent_x: f64,
        half_extent_y: f64,
        extent_z: f64,
        center_offset: Point,
    ) -> Result<Self, A2aError> {
        for (what, v) in [
            ("half extent x", half_extent_x),
            ("half extent y", half_extent_y),
            ("extent z", extent_z),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(A2aError::Invalid { what, value: v });
            }
        }
        Ok(AirspaceVolume {
            half_extent_x,
            half_extent_y,
            extent_z,
            center_offset,
        })
    }

    /// Layer of height `layer_height` whose floor sits at altitude `base`.
    pub fn layer(half_extent: f64, layer_height: f64, base: f64) -> Result<Self, A2aError> {
        Self::new(half_extent, half_extent, layer_height, [0.0, 0.0, base])
    }

    /// Low layer `[0, ΔH]`.
    pub fn low_layer(half_extent: f64, layer_height: f64) -> Result<Self, A2aError> {
        Self::layer(half_extent, layer_height, 0.0)
    }

    /// High layer `[ΔH + H₀, 2ΔH + H₀]`, above the isolation band.
    pub fn high_layer(
        half_extent: f64,
        layer_height: f64,
        isolation: f64,
    ) -> Result<Self, A2aError> {
        Self::layer(half_extent, layer_height, layer_height + isolation)
    }

    pub fn volume(&self) -> f64 {
        4.0 * self.half_extent_x * self.half_extent_y * self.extent_z
    }

    pub fn lower(&self) -> Point {
        let o = self.center_offset;
        [o[0] - self.half_extent_x, o[1] - self.half_extent_y, o[2]]
    }

    pub fn upper(&self) -> Point {
        let o = self.center_offset;
        [
            o[0] + self.half_extent_x,
            o[1] + self.half_extent_y,
            o[2] + self.extent_z,
        ]
    }

    pub fn center(&self) -> Point {
        let o = self.center_offset;
        [o[0], o[1], o[2] + 0.5 * self.extent_z]
    }

    pub fn contains(&self, p: &Point) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        (0..3).all(|i| p[i] >= lo[i] && p[i] <= hi[i])
    }
}

impl Default for AirspaceVolume {
    /// Low layer, 5 km × 5 km footprint, ΔH = 4.5 km.
    fn default() -> Self {
        AirspaceVolume {
            half_extent_x: 2_500.0,
            half_extent_y: 2_500.0,
            extent_z: 4_500.0,
            center_offset: [0.0; 3],
        }
    }
}

/// Region the sub-UAVs are scattered in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingDomain {
    Box(AirspaceVolume),
    Ball { center: Point, radius: f64 },
}

impl SamplingDomain {
    pub fn volume(&self) -> f64 {
        match *self {
            SamplingDomain::Box(v) => v.volume(),
            SamplingDomain::Ball { radius, .. } => {
                4.0 / 3.0 * std::f64::consts::PI * radius.powi(3)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", content = "value", rename_all = "kebab-case")]
pub enum Density {
    /// Expected number of sub-UAVs in the airspace.
    ExpectedCount(f64),
    /// Sub-UAVs per m³.
    Intensity(f64),
}

impl Density {
    pub fn intensity(&self, volume_m3: f64) -> f64 {
        match *self {
            Density::ExpectedCount(n) => n / volume_m3,
            Density::Intensity(l) => l,
        }
    }

    pub fn expected_count(&self, volume_m3: f64) -> f64 {
        match *self {
            Density::ExpectedCount(n) => n,
            Density::Intensity(l) => l * volume_m3,
        }
    }
}

/// Parameters of one A2A airspace. The central UAV is at the volume centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2aScenario {
    pub density: Density,
    pub tx_power_w: f64,
    /// Linear channel gain `G_a`.
    pub channel_gain: f64,
    pub pathloss_exp: f64,
    /// W/Hz.
    pub noise_density: f64,
    pub bandwidth_hz: f64,
    /// Linear SINR threshold.
    pub threshold: f64,
    /// Gamma shape ι of the power fading; 1 is Rayleigh.
    pub fading_shape: f64,
}

impl Default for A2aScenario {
    fn default() -> Self {
        A2aScenario {
            density: Density::ExpectedCount(20.0),
            tx_power_w: 8.0,
            channel_gain: db_to_linear(23.0),
            pathloss_exp: 2.0,
            noise_density: dbm_to_watts(-174.0),
            bandwidth_hz: 1e6,
            threshold: db_to_linear(7.0),
            fading_shape: 1.0,
        }
    }
}

impl A2aScenario {
    /// Noise power `N = n₀ B`.
    pub fn noise_w(&self) -> f64 {
        self.noise_density * self.bandwidth_hz
    }

    pub fn validate(&self) -> Result<(), A2aError> {
        let density = match self.density {
            Density::ExpectedCount(v) | Density::Intensity(v) => v,
        };
        let checks = [
            ("density", density, density > 0.0),
            ("transmit power", self.tx_power_w, self.tx_power_w > 0.0),
            ("channel gain", self.channel_gain, self.channel_gain > 0.0),
            (
                "path-loss exponent",
                self.pathloss_exp,
                self.pathloss_exp > 0.0,
            ),
            (
                "noise density",
                self.noise_density,
                self.noise_density >= 0.0,
            ),
            ("bandwidth", self.bandwidth_hz, self.bandwidth_hz > 0.0),
            ("threshold", self.threshold, self.threshold >= 0.0),
            ("fading shape", self.fading_shape, self.fading_shape >= 1.0),
        ];
        for (what, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(A2aError::Invalid { what, value });
            }
        }
        Ok(())
    }
}
