//! Trajectory CSV reading and writing.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::packet::{PacketFlag, PositionPacket};
use super::MecError;

#[derive(Debug, Deserialize)]
struct InRecord {
    source_id: String,
    seq: u64,
    time_s: Option<f64>,
    lon_deg: f64,
    lat_deg: f64,
    alt_m: f64,
}

#[derive(Debug, Serialize)]
struct OutRecord<'a> {
    source_id: &'a str,
    seq: u64,
    time_s: Option<f64>,
    lon_deg: f64,
    lat_deg: f64,
    alt_m: f64,
    flag: PacketFlag,
}

/// Reads `source_id,seq,time_s,lon_deg,lat_deg,alt_m` rows; a header line is
/// required and `time_s` may be empty.
pub fn read_packets<R: Read>(reader: R) -> Result<Vec<PositionPacket>, MecError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<InRecord>().enumerate() {
        // Line numbers count the header.
        let line = i + 2;
        let r = rec.map_err(|e| MecError::Parse {
            line,
            message: e.to_string(),
        })?;
        let p = PositionPacket::new(r.source_id, r.seq, r.time_s, r.lon_deg, r.lat_deg, r.alt_m);
        p.validate().map_err(|e| MecError::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}

/// Writes packets with a trailing `flag` column, LF line endings.
pub fn write_packets<W: Write>(writer: W, packets: &[PositionPacket]) -> Result<(), MecError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for p in packets {
        w.serialize(OutRecord {
            source_id: &p.source_id,
            seq: p.seq,
            time_s: p.time_s,
            lon_deg: p.lon_deg,
            lat_deg: p.lat_deg,
            alt_m: p.alt_m,
            flag: p.flag,
        })
        .map_err(|e| MecError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| MecError::Io(e.to_string()))?;
    Ok(())
}

/// Input-format CSV (no flag column), as the bundled trajectories ship.
pub fn write_input<W: Write>(writer: W, packets: &[PositionPacket]) -> Result<(), MecError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(["source_id", "seq", "time_s", "lon_deg", "lat_deg", "alt_m"])
        .map_err(|e| MecError::Io(e.to_string()))?;
    for p in packets {
        w.write_record([
            p.source_id.clone(),
            p.seq.to_string(),
            p.time_s.map(|t| t.to_string()).unwrap_or_default(),
            p.lon_deg.to_string(),
            p.lat_deg.to_string(),
            p.alt_m.to_string(),
        ])
        .map_err(|e| MecError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| MecError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "source_id,seq,time_s,lon_deg,lat_deg,alt_m\n\
                          u7,1,0.5,116.30,39.90,120.0\n\
                          u7,2,,116.31,39.91,121.5\n";

    #[test]
    fn reads_rows_and_optional_time() {
        let p = read_packets(SAMPLE.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].time_s, Some(0.5));
        assert_eq!(p[1].time_s, None);
        assert_eq!(p[1].alt_m, 121.5);
    }

    #[test]
    fn round_trip_adds_flag_column() {
        let mut p = read_packets(SAMPLE.as_bytes()).unwrap();
        p[1].flag = PacketFlag::Supp;
        let mut buf = Vec::new();
        write_packets(&mut buf, &p).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "source_id,seq,time_s,lon_deg,lat_deg,alt_m,flag\n\
             u7,1,0.5,116.3,39.9,120.0,recv\n\
             u7,2,,116.31,39.91,121.5,supp\n"
        );
        let mut input = Vec::new();
        write_input(&mut input, &p).unwrap();
        let back = read_packets(input.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].lon_deg, p[0].lon_deg);
    }

    #[test]
    fn bad_rows_report_line() {
        let bad = "source_id,seq,time_s,lon_deg,lat_deg,alt_m\nu,1,0,10,10,1\nu,2,0,200,10,1\n";
        let err = read_packets(bad.as_bytes()).unwrap_err();
        assert!(matches!(err, MecError::Parse { line: 3, .. }), "{err:?}");
        let garbled = "source_id,seq,time_s,lon_deg,lat_deg,alt_m\nu,x,0,10,10,1\n";
        assert!(matches!(
            read_packets(garbled.as_bytes()),
            Err(MecError::Parse { line: 2, .. })
        ));
    }
}
