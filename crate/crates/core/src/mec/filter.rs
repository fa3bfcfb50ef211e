//! Windowed packet abandonment and supplement.

use serde::{Deserialize, Serialize};

use super::packet::{
    coordinates, minkowski, DistanceUnits, LocalFrame, PacketFlag, PositionPacket,
};
use super::MecError;

/// Relative slack on the window comparisons, so equal distances that differ
/// by rounding do not fire either branch.
const REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Abandon evicts the window maximum, a gap evicts the minimum, and every
    /// distance is measured from the previous received packet.
    #[default]
    PaperLiteral,
    /// Abandon evicts the minimum, a gap evicts the maximum, and distances
    /// are measured from the last accepted packet.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Window size N*.
    pub window: usize,
    /// Minkowski order p.
    pub order_p: f64,
    pub mode: FilterMode,
    pub units: DistanceUnits,
    /// Most supplements inserted into one gap.
    pub max_supplements: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            window: 10,
            order_p: 2.0,
            mode: FilterMode::PaperLiteral,
            units: DistanceUnits::LocalMetres,
            max_supplements: 10,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), MecError> {
        if self.window < 2 {
            return Err(MecError::InvalidConfig {
                what: "window size",
                value: self.window as f64,
            });
        }
        if !(self.order_p >= 1.0) {
            return Err(MecError::MinkowskiOrder { p: self.order_p });
        }
        Ok(())
    }
}

/// The rolling set of recent distances, replaced in place.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Window {
    values: Vec<f64>,
}

impl Window {
    pub fn new(values: Vec<f64>) -> Self {
        Window { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn arg_by(&self, better: impl Fn(f64, f64) -> bool) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if better(*v, self.values[best]) {
                best = i;
            }
        }
        best
    }

    pub fn min(&self) -> f64 {
        self.values[self.arg_by(|a, b| a < b)]
    }

    pub fn max(&self) -> f64 {
        self.values[self.arg_by(|a, b| a > b)]
    }

    pub fn median(&self) -> f64 {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    fn replace_max(&mut self, m: f64) {
        let i = self.arg_by(|a, b| a > b);
        self.values[i] = m;
    }

    fn replace_min(&mut self, m: f64) {
        let i = self.arg_by(|a, b| a < b);
        self.values[i] = m;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Accept,
    Abandon,
    AcceptWithSupplements,
}

/// Which comparison fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Warmup,
    Pass,
    Abandon,
    /// Distance reached the window maximum. Yields no supplements when it is
    /// less than twice the median.
    Gap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub action: Action,
    pub branch: Branch,
    pub supplements: Vec<PositionPacket>,
    /// Distance to the comparison base; none for the first packet.
    pub distance: Option<f64>,
}

/// Per-source filter state.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    config: FilterConfig,
    window: Window,
    frame: Option<LocalFrame>,
    last_received: Option<PositionPacket>,
    last_accepted: Option<PositionPacket>,
    warmup_count: usize,
}

/// Number of packets that fit in a gap of `m` given typical step `median`.
pub fn supplement_count(m: f64, median: f64, cap: usize) -> usize {
    if !(median > 0.0) || !m.is_finite() {
        return 0;
    }
    let n = (m / median - REL_EPS).ceil() - 1.0;
    if n <= 0.0 {
        0
    } else {
        (n as usize).min(cap)
    }
}

/// `n` packets at `prev + q/(n+1)·(curr − prev)`, `q = 1..n`.
pub fn interpolate(prev: &PositionPacket, curr: &PositionPacket, n: usize) -> Vec<PositionPacket> {
    let lerp = |a: f64, b: f64, w: f64| a + w * (b - a);
    (1..=n)
        .map(|q| {
            let w = q as f64 / (n + 1) as f64;
            PositionPacket {
                source_id: curr.source_id.clone(),
                seq: prev.seq,
                time_s: match (prev.time_s, curr.time_s) {
                    (Some(a), Some(b)) => Some(lerp(a, b, w)),
                    _ => None,
                },
                lon_deg: lerp(prev.lon_deg, curr.lon_deg, w),
                lat_deg: lerp(prev.lat_deg, curr.lat_deg, w),
                alt_m: lerp(prev.alt_m, curr.alt_m, w),
                flag: PacketFlag::Supp,
            }
        })
        .collect()
}

impl FilterState {
    pub fn new(config: FilterConfig) -> Result<Self, MecError> {
        config.validate()?;
        Ok(FilterState {
            config,
            window: Window::default(),
            frame: None,
            last_received: None,
            last_accepted: None,
            warmup_count: 0,
        })
    }

    /// State past warmup with the given window, `last` being both the last
    /// received and last accepted packet.
    pub fn with_window(
        config: FilterConfig,
        window: Vec<f64>,
        last: PositionPacket,
    ) -> Result<Self, MecError> {
        let mut s = Self::new(FilterConfig {
            window: window.len(),
            ..config
        })?;
        s.frame = Some(LocalFrame::new(last.lon_deg, last.lat_deg));
        s.warmup_count = window.len() + 1;
        s.window = Window::new(window);
        s.last_received = Some(last.clone());
        s.last_accepted = Some(last);
        Ok(s)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    pub fn warmup_complete(&self) -> bool {
        self.warmup_count > self.config.window
    }

    pub fn last_accepted(&self) -> Option<&PositionPacket> {
        self.last_accepted.as_ref()
    }

    fn distance(&self, a: &PositionPacket, b: &PositionPacket) -> Result<f64, MecError> {
        let frame = self.frame.expect("frame is set by the first packet");
        minkowski(
            &coordinates(a, self.config.units, &frame),
            &coordinates(b, self.config.units, &frame),
            self.config.order_p,
        )
    }

    fn accept(&mut self, packet: PositionPacket) {
        self.last_received = Some(packet.clone());
        self.last_accepted = Some(packet);
    }

    pub fn process(&mut self, packet: PositionPacket) -> Result<Verdict, MecError> {
        packet.validate()?;
        let Some(prev) = self.last_received.clone() else {
            self.frame = Some(LocalFrame::new(packet.lon_deg, packet.lat_deg));
            self.warmup_count = 1;
            self.accept(packet);
            return Ok(Verdict {
                action: Action::Accept,
                branch: Branch::Warmup,
                supplements: Vec::new(),
                distance: None,
            });
        };
        if packet.seq <= prev.seq {
            return Err(MecError::Sequence {
                previous: prev.seq,
                got: packet.seq,
            });
        }
        if !self.warmup_complete() {
            let m = self.distance(&prev, &packet)?;
            self.window.values.push(m);
            self.warmup_count += 1;
            self.accept(packet);
            return Ok(Verdict {
                action: Action::Accept,
                branch: Branch::Warmup,
                supplements: Vec::new(),
                distance: Some(m),
            });
        }
        let base = match self.config.mode {
            FilterMode::PaperLiteral => prev,
            FilterMode::Corrected => self
                .last_accepted
                .clone()
                .expect("accepted packet exists after warmup"),
        };
        let m = self.distance(&base, &packet)?;
        let (lo, hi) = (self.window.min(), self.window.max());
        let slack = REL_EPS * hi.abs();
        if m < lo - slack {
            match self.config.mode {
                FilterMode::PaperLiteral => self.window.replace_max(m),
                FilterMode::Corrected => self.window.replace_min(m),
            }
            self.last_received = Some(packet);
            return Ok(Verdict {
                action: Action::Abandon,
                branch: Branch::Abandon,
                supplements: Vec::new(),
                distance: Some(m),
            });
        }
        if m >= hi - slack {
            let n = supplement_count(m, self.window.median(), self.config.max_supplements);
            let supplements = interpolate(&base, &packet, n);
            match self.config.mode {
                FilterMode::PaperLiteral => self.window.replace_min(m),
                FilterMode::Corrected => self.window.replace_max(m),
            }
            self.accept(packet);
            return Ok(Verdict {
                action: if supplements.is_empty() {
                    Action::Accept
                } else {
                    Action::AcceptWithSupplements
                },
                branch: Branch::Gap,
                supplements,
                distance: Some(m),
            });
        }
        self.accept(packet);
        Ok(Verdict {
            action: Action::Accept,
            branch: Branch::Pass,
            supplements: Vec::new(),
            distance: Some(m),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw_cfg(mode: FilterMode) -> FilterConfig {
        FilterConfig {
            units: DistanceUnits::Raw,
            mode,
            ..Default::default()
        }
    }

    fn at(seq: u64, lon: f64) -> PositionPacket {
        PositionPacket::new("u1", seq, Some(seq as f64), lon, 0.0, 100.0)
    }

    fn traced(m: f64, mode: FilterMode) -> (Verdict, Vec<f64>) {
        let mut s =
            FilterState::with_window(raw_cfg(mode), vec![1.0, 2.0, 3.0], at(1, 0.0)).unwrap();
        let v = s.process(at(2, m)).unwrap();
        (v, s.window().values().to_vec())
    }

    #[test]
    fn hand_trace_abandon() {
        let (v, w) = traced(0.5, FilterMode::PaperLiteral);
        assert_eq!(v.action, Action::Abandon);
        assert_eq!(v.distance, Some(0.5));
        assert_eq!(w, vec![1.0, 2.0, 0.5]);
        let (_, w) = traced(0.5, FilterMode::Corrected);
        assert_eq!(w, vec![0.5, 2.0, 3.0]);
    }

    #[test]
    fn hand_trace_supplement() {
        let (v, w) = traced(3.5, FilterMode::PaperLiteral);
        assert_eq!(v.action, Action::AcceptWithSupplements);
        assert_eq!(w, vec![3.5, 2.0, 3.0]);
        assert_eq!(v.supplements.len(), 1);
        let mid = &v.supplements[0];
        assert_eq!(mid.lon_deg, 1.75);
        assert_eq!(mid.time_s, Some(1.5));
        assert!(mid.is_supplement());
        let (_, w) = traced(3.5, FilterMode::Corrected);
        assert_eq!(w, vec![1.0, 2.0, 3.5]);
    }

    #[test]
    fn hand_trace_pass() {
        for mode in [FilterMode::PaperLiteral, FilterMode::Corrected] {
            let (v, w) = traced(1.5, mode);
            assert_eq!(v.action, Action::Accept);
            assert_eq!(v.branch, Branch::Pass);
            assert_eq!(w, vec![1.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn warmup_fills_window() {
        let cfg = FilterConfig {
            window: 3,
            ..raw_cfg(FilterMode::PaperLiteral)
        };
        let mut s = FilterState::new(cfg).unwrap();
        let first = s.process(at(1, 0.0)).unwrap();
        assert_eq!(first.distance, None);
        assert!(s.window().is_empty());
        for k in 2..=4 {
            let v = s.process(at(k, (k - 1) as f64)).unwrap();
            assert_eq!(v.branch, Branch::Warmup);
        }
        assert_eq!(s.window().values(), &[1.0, 1.0, 1.0]);
        assert!(s.warmup_complete());
        assert_eq!(
            s.process(at(4, 9.0)),
            Err(MecError::Sequence {
                previous: 4,
                got: 4
            })
        );
    }

    #[test]
    fn non_monotone_sequence_during_warmup() {
        let mut s = FilterState::new(raw_cfg(FilterMode::PaperLiteral)).unwrap();
        s.process(at(5, 0.0)).unwrap();
        assert_eq!(
            s.process(at(3, 1.0)),
            Err(MecError::Sequence {
                previous: 5,
                got: 3
            })
        );
    }

    #[test]
    fn supplement_counts() {
        assert_eq!(supplement_count(3.5, 2.0, 10), 1);
        assert_eq!(supplement_count(20.0, 2.0, 10), 9);
        assert_eq!(supplement_count(200.0, 2.0, 10), 10);
        assert_eq!(supplement_count(4.0, 2.0, 10), 1);
        assert_eq!(supplement_count(4.0 * (1.0 + 1e-12), 2.0, 10), 1);
        assert_eq!(supplement_count(2.0, 2.0, 10), 0);
        assert_eq!(supplement_count(5.0, 0.0, 10), 0);
    }

    #[test]
    fn ten_median_gap_is_equally_spaced() {
        let prev = at(1, 0.0);
        let curr = at(11, 20.0);
        let sup = interpolate(&prev, &curr, supplement_count(20.0, 2.0, 10));
        assert_eq!(sup.len(), 9);
        for (q, p) in sup.iter().enumerate() {
            assert!((p.lon_deg - 2.0 * (q + 1) as f64).abs() < 1e-12);
            assert!(p.lon_deg > 0.0 && p.lon_deg < 20.0);
        }
        assert!(sup.windows(2).all(|w| w[0].time_s < w[1].time_s));
    }

    #[test]
    fn window_statistics() {
        let w = Window::new(vec![3.0, 1.0, 4.0, 1.0]);
        assert_eq!((w.min(), w.max(), w.median()), (1.0, 4.0, 2.0));
        let mut w2 = w.clone();
        w2.replace_min(9.0);
        assert_eq!(w2.values(), &[3.0, 9.0, 4.0, 1.0]);
    }

    #[test]
    fn invalid_config() {
        assert!(FilterState::new(FilterConfig {
            window: 1,
            ..Default::default()
        })
        .is_err());
        assert!(FilterState::new(FilterConfig {
            order_p: 0.5,
            ..Default::default()
        })
        .is_err());
    }
}
