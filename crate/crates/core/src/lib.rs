//! Shuttling-schedule compiler for grid-type QCCD trapped-ion devices.
//!
//! The pipeline: a circuit is parsed (or generated), SWAPs are removed by relabeling,
//! gates are rewritten into the native `RX/RY/RZ/RZZ` set and peephole-optimized, and
//! a dependency graph is built. The [`scheduler`] then moves one-ion chains through an
//! [`arch::ArchGraph`] time step by time step, rotating loops of the grid to get past
//! blocking chains, until every gate has run in the processing zone. [`verify`] replays
//! any schedule against the movement rules and [`oracle`] computes exact minimum
//! schedule lengths for small full-register-access instances.

pub mod arch;
pub mod bench;
pub mod circuit;
pub mod error;
pub mod oracle;
pub mod scalar;
pub mod scheduler;
pub mod selection;
pub mod verify;

pub use arch::{ArchGraph, GridSpec};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision circuit, the default everywhere in the CLI.
pub type Circuit = circuit::Circuit<f64>;
pub type Gate = circuit::Gate<f64>;
/// Single-precision variants.
pub type Circuit32 = circuit::Circuit<f32>;
pub type Gate32 = circuit::Gate<f32>;
