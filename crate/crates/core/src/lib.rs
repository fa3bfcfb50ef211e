//! Channel models, coverage analysis and on-board packet filtering for
//! hierarchical UAV surveillance networks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod a2a;
pub mod a2g;
pub mod harness;
pub mod mec;
pub mod quad;
pub mod rng;
pub mod units;
