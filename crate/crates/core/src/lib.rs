// Negated float comparisons are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod gaussian;
pub mod rng;
pub mod report;
pub mod save_transmit;
pub mod converse;
pub mod linear;
pub mod montecarlo;
pub mod cli;
