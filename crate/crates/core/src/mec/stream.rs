//! Whole-stream filtering.

use std::collections::HashMap;

use serde::Serialize;

use super::filter::{Action, FilterConfig, FilterState};
use super::packet::PositionPacket;
use super::MecError;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    /// Accepted and supplemented packets in stream order.
    pub packets: Vec<PositionPacket>,
    pub summary: FilterSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterSummary {
    pub total: usize,
    pub accepted: usize,
    pub abandoned: usize,
    pub supplemented: usize,
    /// Abandoned over total received.
    pub reduction_ratio: f64,
}

/// Runs the filter over a stream. Each source keeps its own state; output
/// keeps input order with supplements placed before the packet that closed
/// their gap.
pub fn run_stream(
    packets: &[PositionPacket],
    config: &FilterConfig,
) -> Result<FilterReport, MecError> {
    config.validate()?;
    let mut states: HashMap<&str, FilterState> = HashMap::new();
    let mut out = Vec::with_capacity(packets.len());
    let (mut accepted, mut abandoned, mut supplemented) = (0, 0, 0);
    for (index, p) in packets.iter().enumerate() {
        let state = match states.get_mut(p.source_id.as_str()) {
            Some(s) => s,
            None => states
                .entry(p.source_id.as_str())
                .or_insert(FilterState::new(*config)?),
        };
        let verdict = state.process(p.clone()).map_err(|e| MecError::AtPacket {
            index,
            source: Box::new(e),
        })?;
        match verdict.action {
            Action::Abandon => abandoned += 1,
            Action::Accept | Action::AcceptWithSupplements => {
                accepted += 1;
                supplemented += verdict.supplements.len();
                out.extend(verdict.supplements);
                out.push(p.clone());
            }
        }
    }
    let total = packets.len();
    Ok(FilterReport {
        packets: out,
        summary: FilterSummary {
            total,
            accepted,
            abandoned,
            supplemented,
            reduction_ratio: if total == 0 {
                0.0
            } else {
                abandoned as f64 / total as f64
            },
        },
    })
}
