//! Figure reproduction, validation suites and parameter sweeps for the
//! cavity-QED single-photon source model in `sps-core`.
//!
//! The `sps-sim` binary is a thin command-line layer over this library.
//! Every command writes CSV (and sometimes SVG) artifacts together with a
//! JSON manifest listing their SHA-256 checksums.

pub mod analysis;
pub mod checks;
pub mod config;
pub mod error;
pub mod figures;
pub mod montecarlo;
pub mod output;
pub mod svg;
pub mod sweep;
pub mod validate;

pub use config::{Budget, GhzParams, GridSpec, RunConfig};
pub use error::{Result, SimError};
