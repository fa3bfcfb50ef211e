//! On-board packet abandonment and supplement at the central UAV.

mod filter;
mod io;
mod packet;
mod stream;
pub mod synth;

use thiserror::Error;

pub use filter::{
    interpolate, supplement_count, Action, Branch, FilterConfig, FilterMode, FilterState, Verdict,
    Window,
};
pub use io::{read_packets, write_input, write_packets};
pub use packet::{
    coordinates, minkowski, minkowski_distance, DistanceUnits, LocalFrame, PacketFlag,
    PositionPacket,
};
pub use stream::{run_stream, FilterReport, FilterSummary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MecError {
    #[error("Minkowski order must be at least 1, got {p}")]
    MinkowskiOrder { p: f64 },
    #[error("sequence number {got} does not follow {previous}")]
    Sequence { previous: u64, got: u64 },
    #[error("invalid packet {what}: {value}")]
    InvalidPacket { what: &'static str, value: f64 },
    #[error("invalid filter {what}: {value}")]
    InvalidConfig { what: &'static str, value: f64 },
    #[error("packet {index}: {source}")]
    AtPacket { index: usize, source: Box<MecError> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}
