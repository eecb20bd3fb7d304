//! Parallel drivers, config files, sweeps and presets on top of
//! [`risnoma_core`].

pub mod config_file;
pub mod error;
pub mod fit;
pub mod parallel;
pub mod presets;
pub mod sweep;

pub use error::{Result, SimError};
pub use risnoma_core as core;
