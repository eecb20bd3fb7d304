//! Power and ratio conversions. Everything past the config boundary works in
//! watts and linear ratios.

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}

fn positive(what: &'static str, value: f64) -> Result<f64> {
    finite(what, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { what, value })
    }
}

/// `10^(p/10)` milliwatts, expressed in watts.
pub fn dbm_to_watt(dbm: f64) -> Result<f64> {
    let dbm = finite("power (dBm)", dbm)?;
    Ok(Float::powf(10.0, dbm / 10.0) * 1e-3)
}

pub fn watt_to_dbm(watt: f64) -> Result<f64> {
    let watt = positive("power (W)", watt)?;
    Ok(10.0 * Float::log10(watt * 1e3))
}

pub fn db_to_linear(db: f64) -> Result<f64> {
    let db = finite("ratio (dB)", db)?;
    Ok(Float::powf(10.0, db / 10.0))
}

pub fn linear_to_db(ratio: f64) -> Result<f64> {
    let ratio = positive("ratio (linear)", ratio)?;
    Ok(10.0 * Float::log10(ratio))
}
