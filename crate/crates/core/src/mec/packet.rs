//! Position reports and their distances.

use serde::{Deserialize, Serialize};

use super::MecError;
use crate::units::EARTH_RADIUS_M;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketFlag {
    /// Received over the air.
    #[default]
    Recv,
    /// Synthesised to fill a gap.
    Supp,
}

/// One (lon, lat, alt) report.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionPacket {
    pub source_id: String,
    pub seq: u64,
    pub time_s: Option<f64>,
    pub lon_deg: f64,
    pub lat_deg: f64,
    pub alt_m: f64,
    pub flag: PacketFlag,
}

impl PositionPacket {
    pub fn new(
        source_id: impl Into<String>,
        seq: u64,
        time_s: Option<f64>,
        lon_deg: f64,
        lat_deg: f64,
        alt_m: f64,
    ) -> Self {
        PositionPacket {
            source_id: source_id.into(),
            seq,
            time_s,
            lon_deg,
            lat_deg,
            alt_m,
            flag: PacketFlag::Recv,
        }
    }

    pub fn validate(&self) -> Result<(), MecError> {
        if self.seq == 0 {
            return Err(MecError::InvalidPacket {
                what: "sequence number",
                value: 0.0,
            });
        }
        let checks = [
            (
                "longitude",
                self.lon_deg,
                (-180.0..=180.0).contains(&self.lon_deg),
            ),
            (
                "latitude",
                self.lat_deg,
                (-90.0..=90.0).contains(&self.lat_deg),
            ),
            ("altitude", self.alt_m, self.alt_m.is_finite()),
            (
                "time",
                self.time_s.unwrap_or(0.0),
                self.time_s.is_none_or(f64::is_finite),
            ),
        ];
        for (what, value, ok) in checks {
            if !ok {
                return Err(MecError::InvalidPacket { what, value });
            }
        }
        Ok(())
    }

    pub fn raw(&self) -> [f64; 3] {
        [self.lon_deg, self.lat_deg, self.alt_m]
    }

    pub fn is_supplement(&self) -> bool {
        self.flag == PacketFlag::Supp
    }
}

/// `(Σ |Δᵢ|^p)^{1/p}`.
pub fn minkowski(a: &[f64; 3], b: &[f64; 3], p: f64) -> Result<f64, MecError> {
    if !(p >= 1.0) {
        return Err(MecError::MinkowskiOrder { p });
    }
    let d = [
        (a[0] - b[0]).abs(),
        (a[1] - b[1]).abs(),
        (a[2] - b[2]).abs(),
    ];
    if p == 1.0 {
        return Ok(d[0] + d[1] + d[2]);
    }
    if p == 2.0 {
        return Ok((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt());
    }
    if p.is_infinite() {
        return Ok(d[0].max(d[1]).max(d[2]));
    }
    Ok((d[0].powf(p) + d[1].powf(p) + d[2].powf(p)).powf(1.0 / p))
}

/// Minkowski distance over the raw (lon°, lat°, alt m) fields.
pub fn minkowski_distance(a: &PositionPacket, b: &PositionPacket, p: f64) -> Result<f64, MecError> {
    minkowski(&a.raw(), &b.raw(), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceUnits {
    /// Lon/lat projected to metres about the stream's first packet.
    #[default]
    LocalMetres,
    /// Degrees and metres mixed as reported.
    Raw,
}

/// Equirectangular projection about a reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    lon0: f64,
    lat0: f64,
    cos_lat0: f64,
}

impl LocalFrame {
    pub fn new(lon0_deg: f64, lat0_deg: f64) -> Self {
        LocalFrame {
            lon0: lon0_deg,
            lat0: lat0_deg,
            cos_lat0: lat0_deg.to_radians().cos(),
        }
    }

    /// East, north, up in metres.
    pub fn to_local(&self, lon_deg: f64, lat_deg: f64, alt_m: f64) -> [f64; 3] {
        [
            EARTH_RADIUS_M * (lon_deg - self.lon0).to_radians() * self.cos_lat0,
            EARTH_RADIUS_M * (lat_deg - self.lat0).to_radians(),
            alt_m,
        ]
    }

    pub fn to_geodetic(&self, east: f64, north: f64, up: f64) -> [f64; 3] {
        [
            self.lon0 + (east / (EARTH_RADIUS_M * self.cos_lat0)).to_degrees(),
            self.lat0 + (north / EARTH_RADIUS_M).to_degrees(),
            up,
        ]
    }
}

/// Coordinates a packet is distanced in.
pub fn coordinates(p: &PositionPacket, units: DistanceUnits, frame: &LocalFrame) -> [f64; 3] {
    match units {
        DistanceUnits::Raw => p.raw(),
        DistanceUnits::LocalMetres => frame.to_local(p.lon_deg, p.lat_deg, p.alt_m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pkt(lon: f64, lat: f64, alt: f64) -> PositionPacket {
        PositionPacket::new("u1", 1, None, lon, lat, alt)
    }

    #[test]
    fn minkowski_basics() {
        let a = pkt(0.0, 0.0, 0.0);
        assert_eq!(minkowski_distance(&a, &a, 2.0).unwrap(), 0.0);
        let b = pkt(3.0, 4.0, 0.0);
        assert_eq!(minkowski_distance(&a, &b, 2.0).unwrap(), 5.0);
        assert_eq!(minkowski_distance(&a, &b, 1.0).unwrap(), 7.0);
        assert!((minkowski_distance(&a, &b, 3.0).unwrap() - 91f64.cbrt()).abs() < 1e-12);
        assert_eq!(minkowski_distance(&a, &b, f64::INFINITY).unwrap(), 4.0);
        assert_eq!(
            minkowski_distance(&a, &b, 0.5),
            Err(MecError::MinkowskiOrder { p: 0.5 })
        );
    }

    #[test]
    fn local_frame_round_trip() {
        let f = LocalFrame::new(116.3, 39.9);
        let local = f.to_local(116.31, 39.905, 120.0);
        let back = f.to_geodetic(local[0], local[1], local[2]);
        assert!((back[0] - 116.31).abs() < 1e-12);
        assert!((back[1] - 39.905).abs() < 1e-12);
        // 0.005° of latitude is about 556 m.
        assert!((local[1] - 555.97).abs() < 0.1, "{}", local[1]);
    }

    #[test]
    fn packet_validation() {
        assert!(pkt(181.0, 0.0, 0.0).validate().is_err());
        assert!(pkt(0.0, -91.0, 0.0).validate().is_err());
        assert!(PositionPacket::new("u", 0, None, 0.0, 0.0, 0.0)
            .validate()
            .is_err());
        assert!(pkt(10.0, 10.0, 100.0).validate().is_ok());
    }
}
