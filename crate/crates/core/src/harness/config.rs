//! Experiment configuration. Values are in the units of the parameter
//! table (dBi, dBm/Hz, W, dB) and converted once when building models.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::a2a::{A2aScenario, AirspaceVolume, Association, Density};
use crate::a2g::{Fading, GrazingModel, ReflectionFormula};
use crate::mec::{DistanceUnits, FilterConfig, FilterMode};
use crate::units::{db_to_linear, dbm_to_watts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    A2gSweep,
    A2aSinr,
    A2aCoverage,
    Filter,
    Selftest,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::A2gSweep => "a2g-sweep",
            ExperimentKind::A2aSinr => "a2a-sinr",
            ExperimentKind::A2aCoverage => "a2a-coverage",
            ExperimentKind::Filter => "filter",
            ExperimentKind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    #[default]
    Low,
    High,
}

/// `off`, `rayleigh` or `rice:<K in dB>`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FadingSpec {
    #[default]
    Off,
    Rayleigh,
    Rice {
        k_db: f64,
    },
}

impl FadingSpec {
    pub fn fading(&self) -> Fading {
        match *self {
            FadingSpec::Off => Fading::Off,
            FadingSpec::Rayleigh => Fading::rayleigh(),
            FadingSpec::Rice { k_db } => Fading::rician_db(k_db),
        }
    }
}

impl FromStr for FadingSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(FadingSpec::Off),
            "rayleigh" => Ok(FadingSpec::Rayleigh),
            "rice" => Ok(FadingSpec::Rice { k_db: 10.0 }),
            _ => {
                let k = s.strip_prefix("rice:").ok_or_else(|| {
                    format!("unknown fading `{s}` (expected off, rayleigh or rice:K)")
                })?;
                let k_db: f64 = k
                    .parse()
                    .map_err(|_| format!("bad Rician K-factor `{k}`"))?;
                if !k_db.is_finite() {
                    return Err(format!("bad Rician K-factor `{k}`"));
                }
                Ok(FadingSpec::Rice { k_db })
            }
        }
    }
}

impl TryFrom<String> for FadingSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for FadingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingSpec::Off => write!(f, "off"),
            FadingSpec::Rayleigh => write!(f, "rayleigh"),
            FadingSpec::Rice { k_db } => write!(f, "rice:{k_db}"),
        }
    }
}

impl From<FadingSpec> for String {
    fn from(f: FadingSpec) -> String {
        f.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct A2gParams {
    pub layer: Layer,
    pub freq_5g_hz: f64,
    pub freq_adsb_hz: f64,
    /// P_cl.
    pub tx_power_low_w: f64,
    /// P_ch.
    pub tx_power_high_w: f64,
    pub total_gain_dbi: f64,
    pub gs_height_m: f64,
    pub ground_arc_m: f64,
    pub rel_permittivity: f64,
    pub conductivity_s_m: f64,
    pub earth_radius_m: f64,
    pub effective_radius_factor: f64,
    pub beamwidth_rad: f64,
    pub grazing: GrazingModel,
    pub formula: ReflectionFormula,
    pub fading: FadingSpec,
    pub fading_draws: usize,
    /// Height sweep; when unset the full layer range is used.
    pub height_min_m: Option<f64>,
    pub height_max_m: Option<f64>,
    pub points: usize,
}

impl Default for A2gParams {
    fn default() -> Self {
        A2gParams {
            layer: Layer::Low,
            freq_5g_hz: 3.5e9,
            freq_adsb_hz: 1.09e9,
            tx_power_low_w: 20.0,
            tx_power_high_w: 20.0,
            total_gain_dbi: 20.0,
            gs_height_m: 50.0,
            ground_arc_m: 200.0,
            rel_permittivity: 15.0,
            conductivity_s_m: 5e3,
            earth_radius_m: crate::units::EARTH_RADIUS_M,
            effective_radius_factor: 1.0,
            beamwidth_rad: FRAC_PI_2,
            grazing: GrazingModel::Exact,
            formula: ReflectionFormula::Standard,
            fading: FadingSpec::Off,
            fading_draws: 1_000,
            height_min_m: None,
            height_max_m: None,
            points: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct A2aParams {
    pub layer: Layer,
    pub tx_power_w: f64,
    pub channel_gain_dbi: f64,
    pub pathloss_exp: f64,
    pub noise_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub threshold_db: f64,
    /// Expected sub-UAVs per airspace, or per m³ with `density_per_m3`.
    pub density: f64,
    pub density_per_m3: bool,
    pub fading_shape: f64,
    pub half_extent_m: f64,
    /// ΔH.
    pub layer_height_m: f64,
    /// H₀.
    pub isolation_m: f64,
    pub association: Association,
    pub densities: Vec<f64>,
    pub thresholds_db: Vec<f64>,
    pub power_min_w: f64,
    pub power_max_w: f64,
    pub power_points: usize,
}

impl Default for A2aParams {
    fn default() -> Self {
        A2aParams {
            layer: Layer::Low,
            tx_power_w: 8.0,
            channel_gain_dbi: 23.0,
            pathloss_exp: 2.0,
            noise_dbm_hz: -174.0,
            bandwidth_hz: 1e6,
            threshold_db: 7.0,
            density: 20.0,
            density_per_m3: false,
            fading_shape: 1.0,
            half_extent_m: 2_500.0,
            layer_height_m: 4_500.0,
            isolation_m: 1_000.0,
            association: Association::Nearest,
            densities: vec![1.0, 10.0, 20.0, 30.0, 40.0, 60.0],
            thresholds_db: vec![7.0, 10.0, 14.0],
            power_min_w: 1.0,
            power_max_w: 20.0,
            power_points: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Trajectory {
    #[default]
    Hover,
    Line,
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterParams {
    pub window: usize,
    pub order_p: f64,
    pub mode: FilterMode,
    pub units: DistanceUnits,
    pub max_supplements: usize,
    pub trajectory: Trajectory,
    pub packets: usize,
    /// Trajectory CSV to filter instead of a bundled one.
    pub input: Option<String>,
}

impl Default for FilterParams {
    fn default() -> Self {
        let f = FilterConfig::default();
        FilterParams {
            window: f.window,
            order_p: f.order_p,
            mode: f.mode,
            units: f.units,
            max_supplements: f.max_supplements,
            trajectory: Trajectory::Hover,
            packets: 400,
            input: None,
        }
    }
}

impl FilterParams {
    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            window: self.window,
            order_p: self.order_p,
            mode: self.mode,
            units: self.units,
            max_supplements: self.max_supplements,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub trials: usize,
    /// Skips the parameter-table range checks.
    pub allow_out_of_range: bool,
    pub a2g: A2gParams,
    pub a2a: A2aParams,
    pub filter: FilterParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::A2gSweep,
            seed: 1,
            trials: 100_000,
            allow_out_of_range: false,
            a2g: A2gParams::default(),
            a2a: A2aParams::default(),
            filter: FilterParams::default(),
        }
    }
}

fn within(what: &str, v: f64, lo: f64, hi: f64) -> Result<(), HarnessError> {
    let tol = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    if v >= lo - tol && v <= hi + tol {
        Ok(())
    } else if lo == hi {
        Err(HarnessError::Config(format!(
            "{what} = {v} differs from the table value {lo} (set allow_out_of_range to override)"
        )))
    } else {
        Err(HarnessError::Config(format!(
            "{what} = {v} outside the table range [{lo}, {hi}] (set allow_out_of_range to override)"
        )))
    }
}

fn positive(what: &str, v: f64) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!(
            "{what} must be positive, got {v}"
        )))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Heights swept by `a2g-sweep`: `[1 km, 5.5 km − H₀/2]` for the low
    /// layer, `[ΔH + H₀, 2ΔH + H₀]` for the high one unless overridden.
    pub fn height_range(&self) -> (f64, f64) {
        let (dh, h0) = (self.a2a.layer_height_m, self.a2a.isolation_m);
        let (lo, hi) = match self.a2g.layer {
            Layer::Low => (1_000.0, dh + h0 - h0 / 2.0),
            Layer::High => (dh + h0, 2.0 * dh + h0),
        };
        (
            self.a2g.height_min_m.unwrap_or(lo),
            self.a2g.height_max_m.unwrap_or(hi),
        )
    }

    /// Rejects nonsensical values always and values outside the parameter
    /// table unless `allow_out_of_range` is set.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let g = &self.a2g;
        let a = &self.a2a;
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        for (what, v) in [
            ("a2g.freq_5g_hz", g.freq_5g_hz),
            ("a2g.freq_adsb_hz", g.freq_adsb_hz),
            ("a2g.tx_power_low_w", g.tx_power_low_w),
            ("a2g.tx_power_high_w", g.tx_power_high_w),
            ("a2g.ground_arc_m", g.ground_arc_m),
            ("a2g.earth_radius_m", g.earth_radius_m),
            ("a2g.effective_radius_factor", g.effective_radius_factor),
            ("a2g.beamwidth_rad", g.beamwidth_rad),
            ("a2a.tx_power_w", a.tx_power_w),
            ("a2a.pathloss_exp", a.pathloss_exp),
            ("a2a.bandwidth_hz", a.bandwidth_hz),
            ("a2a.density", a.density),
            ("a2a.half_extent_m", a.half_extent_m),
            ("a2a.layer_height_m", a.layer_height_m),
            ("a2a.power_min_w", a.power_min_w),
            ("a2a.power_max_w", a.power_max_w),
        ] {
            positive(what, v)?;
        }
        if !(g.gs_height_m >= 0.0) {
            return Err(HarnessError::Config(format!(
                "a2g.gs_height_m must be non-negative, got {}",
                g.gs_height_m
            )));
        }
        if !(a.isolation_m >= 0.0) {
            return Err(HarnessError::Config(format!(
                "a2a.isolation_m must be non-negative, got {}",
                a.isolation_m
            )));
        }
        if g.points < 2 {
            return Err(HarnessError::Config("a2g.points must be at least 2".into()));
        }
        if a.power_points < 2 {
            return Err(HarnessError::Config(
                "a2a.power_points must be at least 2".into(),
            ));
        }
        if g.fading != FadingSpec::Off && g.fading_draws == 0 {
            return Err(HarnessError::Config(
                "a2g.fading_draws must be at least 1".into(),
            ));
        }
        let (h_lo, h_hi) = self.height_range();
        if !(h_lo > g.gs_height_m && h_hi >= h_lo) {
            return Err(HarnessError::Config(format!(
                "height sweep [{h_lo}, {h_hi}] must lie above the ground station height {}",
                g.gs_height_m
            )));
        }
        if a.power_max_w < a.power_min_w {
            return Err(HarnessError::Config(
                "a2a.power_max_w below a2a.power_min_w".into(),
            ));
        }
        if a.densities.is_empty() || a.thresholds_db.is_empty() {
            return Err(HarnessError::Config(
                "a2a.densities and a2a.thresholds_db must be non-empty".into(),
            ));
        }
        self.filter_config_checked()?;
        self.scenario()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.allow_out_of_range {
            return Ok(());
        }
        within("a2g.freq_5g_hz", g.freq_5g_hz, 3.5e9, 3.5e9)?;
        within("a2g.freq_adsb_hz", g.freq_adsb_hz, 1.09e9, 1.09e9)?;
        within("a2g.tx_power_low_w", g.tx_power_low_w, 20.0, 20.0)?;
        within("a2g.tx_power_high_w", g.tx_power_high_w, 20.0, 20.0)?;
        within("a2g.total_gain_dbi", g.total_gain_dbi, 20.0, 20.0)?;
        within("a2g.gs_height_m", g.gs_height_m, 50.0, 50.0)?;
        within("a2g.rel_permittivity", g.rel_permittivity, 15.0, 15.0)?;
        within("a2g.conductivity_s_m", g.conductivity_s_m, 5e3, 5e3)?;
        let (dh, h0) = (a.layer_height_m, a.isolation_m);
        let (lo, hi) = match g.layer {
            Layer::Low => (1_000.0, dh + h0 / 2.0),
            Layer::High => (dh + h0, 2.0 * dh + h0),
        };
        within("a2g sweep start height", h_lo, lo, hi)?;
        within("a2g sweep end height", h_hi, lo, hi)?;
        within("a2a.tx_power_w", a.tx_power_w, 1.0, 20.0)?;
        within("a2a.power_min_w", a.power_min_w, 1.0, 20.0)?;
        within("a2a.power_max_w", a.power_max_w, 1.0, 20.0)?;
        within("a2a.channel_gain_dbi", a.channel_gain_dbi, 23.0, 23.0)?;
        within("a2a.pathloss_exp", a.pathloss_exp, 2.0, 4.9)?;
        within("a2a.noise_dbm_hz", a.noise_dbm_hz, -174.0, -174.0)?;
        if a.bandwidth_hz != 1e6 && a.bandwidth_hz != 1e8 {
            return Err(HarnessError::Config(format!(
                "a2a.bandwidth_hz = {} is neither table bandwidth (1 MHz or 100 MHz)",
                a.bandwidth_hz
            )));
        }
        within("a2a.threshold_db", a.threshold_db, 7.0, 14.0)?;
        for t in &a.thresholds_db {
            within("a2a.thresholds_db entry", *t, 7.0, 14.0)?;
        }
        if !a.density_per_m3 {
            within("a2a.density", a.density, 1.0, 60.0)?;
            for d in &a.densities {
                within("a2a.densities entry", *d, 1.0, 60.0)?;
            }
        }
        within("a2a.layer_height_m", a.layer_height_m, 4_500.0, 4_500.0)?;
        within("a2a.isolation_m", a.isolation_m, 1_000.0, 1_000.0)?;
        Ok(())
    }

    fn filter_config_checked(&self) -> Result<FilterConfig, HarnessError> {
        let f = self.filter.filter_config();
        f.validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.filter.packets < 2 {
            return Err(HarnessError::Config(
                "filter.packets must be at least 2".into(),
            ));
        }
        Ok(f)
    }

    pub fn density(&self, value: f64) -> Density {
        if self.a2a.density_per_m3 {
            Density::Intensity(value)
        } else {
            Density::ExpectedCount(value)
        }
    }

    /// A2A scenario at the configured operating point.
    pub fn scenario(&self) -> A2aScenario {
        let a = &self.a2a;
        A2aScenario {
            density: self.density(a.density),
            tx_power_w: a.tx_power_w,
            channel_gain: db_to_linear(a.channel_gain_dbi),
            pathloss_exp: a.pathloss_exp,
            noise_density: dbm_to_watts(a.noise_dbm_hz),
            bandwidth_hz: a.bandwidth_hz,
            threshold: db_to_linear(a.threshold_db),
            fading_shape: a.fading_shape,
        }
    }

    /// The airspace of the configured layer.
    pub fn volume(&self) -> Result<AirspaceVolume, HarnessError> {
        let a = &self.a2a;
        match a.layer {
            Layer::Low => AirspaceVolume::low_layer(a.half_extent_m, a.layer_height_m),
            Layer::High => {
                AirspaceVolume::high_layer(a.half_extent_m, a.layer_height_m, a.isolation_m)
            }
        }
        .map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_table() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        c.validate().unwrap();
        assert_eq!(c.height_range(), (1_000.0, 5_000.0));
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default();
        c.a2g.fading = FadingSpec::Rice { k_db: 6.5 };
        c.a2g.height_max_m = Some(4_000.0);
        c.a2a.association = Association::Mixed;
        c.filter.mode = FilterMode::Corrected;
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn range_guard() {
        let c = ExperimentConfig::from_toml("[a2a]\ntx_power_w = 25.0\n").unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("a2a.tx_power_w"), "{err}");
        let ok =
            ExperimentConfig::from_toml("allow_out_of_range = true\n[a2a]\ntx_power_w = 25.0\n")
                .unwrap();
        ok.validate().unwrap();
        let bad =
            ExperimentConfig::from_toml("allow_out_of_range = true\n[a2a]\ntx_power_w = -1.0\n")
                .unwrap();
        assert!(bad.validate().is_err());
        let theta = ExperimentConfig::from_toml("[a2a]\nthresholds_db = [7.0, 15.0]\n").unwrap();
        assert!(theta.validate().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[a2g]\nfrequency = 1\n").is_err());
    }

    #[test]
    fn fading_spec_parsing() {
        assert_eq!("off".parse::<FadingSpec>().unwrap(), FadingSpec::Off);
        assert_eq!(
            "rayleigh".parse::<FadingSpec>().unwrap(),
            FadingSpec::Rayleigh
        );
        assert_eq!(
            "rice:3".parse::<FadingSpec>().unwrap(),
            FadingSpec::Rice { k_db: 3.0 }
        );
        assert!("rice:x".parse::<FadingSpec>().is_err());
        assert!("nakagami".parse::<FadingSpec>().is_err());
        assert_eq!(FadingSpec::Rice { k_db: 10.0 }.to_string(), "rice:10");
    }

    #[test]
    fn high_layer_heights() {
        let mut c = ExperimentConfig::default();
        c.a2g.layer = Layer::High;
        assert_eq!(c.height_range(), (5_500.0, 10_000.0));
        c.validate().unwrap();
        let v = {
            c.a2a.layer = Layer::High;
            c.volume().unwrap()
        };
        assert_eq!(v.lower()[2], 5_500.0);
    }
}
