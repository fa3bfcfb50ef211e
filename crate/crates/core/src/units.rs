//! Physical constants and decibel conversions.
//!
//! Configuration values arrive in dB, dBi and dBm/Hz; everything past the
//! config boundary is linear SI.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Mean earth radius, m.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm (or dBm/Hz) to W (or W/Hz).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Friis free-space loss between isotropic antennas, dB.
pub fn free_space_loss_db(distance_m: f64, wavelength_m: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m / wavelength_m).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for db in [-174.0, -3.0, 0.0, 7.0, 23.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_noise_floor() {
        // -174 dBm/Hz over 1 MHz is -114 dBm.
        let n = dbm_to_watts(-174.0) * 1e6;
        assert!((linear_to_db(n) + 144.0).abs() < 1e-9);
    }

    #[test]
    fn table_wavelengths() {
        assert!((wavelength(3.5e9) - 0.0857).abs() < 1e-4);
        assert!((wavelength(1.09e9) - 0.2750).abs() < 1e-4);
    }
}
