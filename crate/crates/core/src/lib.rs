//! Goal-oriented online-adaptive generalized multiscale finite elements for
//! 2D heterogeneous elliptic (Darcy) problems on the unit square.

// `!(x > 0.0)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod cli;
pub mod coarse;
pub mod dense;
pub mod error;
pub mod fem;
pub mod grid;
pub mod offline;
pub mod online;
pub mod patch;

pub use error::{Error, Result};
pub use fem::{FineOperator, LocalOperator, NodalVector, PermeabilityField};
pub use grid::{GridPair, Neighborhood, NodeWindow};
