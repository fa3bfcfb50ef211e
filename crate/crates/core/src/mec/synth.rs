//! Bundled synthetic trajectories.

use super::packet::{LocalFrame, PositionPacket};

pub const ORIGIN_LON: f64 = 116.35;
pub const ORIGIN_LAT: f64 = 39.98;
pub const ORIGIN_ALT: f64 = 1_200.0;

fn packets(source: &str, local: impl IntoIterator<Item = (u64, [f64; 3])>) -> Vec<PositionPacket> {
    let frame = LocalFrame::new(ORIGIN_LON, ORIGIN_LAT);
    local
        .into_iter()
        .map(|(seq, [e, n, u])| {
            let [lon, lat, alt] = frame.to_geodetic(e, n, ORIGIN_ALT + u);
            PositionPacket::new(source, seq, Some(seq as f64 - 1.0), lon, lat, alt)
        })
        .collect()
}

/// Uniform-speed eastbound line, `step_m` per packet, one packet a second.
pub fn straight_line(n: usize, step_m: f64) -> Vec<PositionPacket> {
    packets(
        "line",
        (0..n).map(|k| (k as u64 + 1, [step_m * k as f64, 0.0, 0.0])),
    )
}

/// Straight line with packets `first_deleted .. first_deleted + deleted`
/// (zero-based) missing.
pub fn gap_trajectory(
    n: usize,
    step_m: f64,
    first_deleted: usize,
    deleted: usize,
) -> Vec<PositionPacket> {
    let mut p = straight_line(n, step_m);
    p.drain(first_deleted..first_deleted + deleted);
    for q in &mut p {
        q.source_id = "gap".into();
    }
    p
}

/// Transit at 10 m per packet that settles into a hover: after the first 11
/// packets the UAV spirals in towards a fixed point, the offset shrinking by
/// a factor 0.98 each packet. Successive steps stay below the transit step.
pub fn hover_settle(n: usize) -> Vec<PositionPacket> {
    const TRANSIT: usize = 11;
    const STEP: f64 = 10.0;
    const RADIUS: f64 = 4.0;
    const DECAY: f64 = 0.98;
    const TURN: f64 = 0.9;
    let centre = STEP * (TRANSIT - 1) as f64 + RADIUS;
    packets(
        "hover",
        (0..n).map(|k| {
            let pos = if k < TRANSIT {
                [STEP * k as f64, 0.0, 0.0]
            } else {
                let j = (k - TRANSIT + 1) as f64;
                let r = RADIUS * DECAY.powf(j);
                let a = TURN * j;
                [centre - r * a.cos(), r * a.sin(), 0.3 * r * (0.5 * a).cos()]
            };
            (k as u64 + 1, pos)
        }),
    )
}
