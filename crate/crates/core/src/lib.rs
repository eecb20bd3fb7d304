//! Link-level model of a two-user uplink NOMA system served by a hybrid
//! (active + passive) reconfigurable intelligent surface.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! * [`units`] and [`config`]: typed configuration, unit conversion, validation.
//! * [`channel`]: UMi NLOS path loss and reproducible Rayleigh channel draws.
//! * [`ris`]: phase alignment of both partitions and the amplifier gain model.
//! * [`link`]: effective link terms and per-user SINR with (im)perfect SIC.
//! * [`montecarlo`]: trial kernels for outage, SINR samples and term moments.
//! * [`analytic`]: CLT moments, quadratic-form characteristic functions and
//!   Gil-Pelaez inversion.
//! * [`optimizer`]: RIS power-budget search for outage fairness.
//!
//! IO, the command line and multi-threaded drivers live in the `risnoma`
//! companion crate.
#![no_std]
// Float math goes through `num_traits::Float` (libm). When a std-linking
// dev-dependency is in the graph the inherent `f64` methods shadow it, hence
// the `allow(unused_imports)` on those imports.
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod channel;
pub mod config;
mod error;
pub mod link;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;
pub mod ris;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
