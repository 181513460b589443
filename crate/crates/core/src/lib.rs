//! Numerics for a single-photon source built from a two-level emitter
//! strongly coupled to a leaky cavity mode.
//!
//! The crate covers coherent dynamics (closed-form propagator, occupation
//! probabilities, quantum efficiency), pure dephasing modeled as a Wiener
//! phase diffusion (averaged moments, dephased efficiency, secular roots),
//! side and forward emission spectra, and a set of independent numerical
//! oracles used to cross-check every closed form.
//!
//! All rates are angular frequencies in rad/s and all times are seconds.
//! Use [`params::SystemParams::from_ghz`] to enter values in the usual
//! `rate / 2π` GHz convention.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// Every `use num_traits::Float` carries `allow(unused_imports)`: whenever std
// is linked anywhere in the build, its inherent float methods shadow the trait.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coherent;
pub mod dephasing;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod spectra;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use params::{DerivedRates, SystemParams};
