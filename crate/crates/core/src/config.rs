//! Run configuration: every scalar of the system model plus solver settings.
//!
//! Powers are stored in dBm and gains in dB because that is how they are
//! written in config files; [`crate::link::LinkBudget`] converts them once to
//! watts and linear ratios.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::quadrature::QuadratureSettings;
use crate::{Error, Result};

/// Amplification factor range: 0 dB to 30 dB of power gain.
pub const ALPHA_MIN: f64 = 1.0;
pub const ALPHA_MAX: f64 = 1000.0;

/// Validity range of the UMi NLOS path-loss fit.
pub const FC_GHZ_RANGE: (f64, f64) = (2.0, 6.0);
pub const DISTANCE_M_RANGE: (f64, f64) = (10.0, 2000.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum UserId {
    U1,
    U2,
}

impl UserId {
    pub const BOTH: [UserId; 2] = [UserId::U1, UserId::U2];

    pub fn other(self) -> UserId {
        match self {
            UserId::U1 => UserId::U2,
            UserId::U2 => UserId::U1,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            UserId::U1 => 1,
            UserId::U2 => 2,
        }
    }
}

impl TryFrom<u8> for UserId {
    type Error = String;

    fn try_from(v: u8) -> core::result::Result<Self, String> {
        match v {
            1 => Ok(UserId::U1),
            2 => Ok(UserId::U2),
            other => Err(alloc::format!("user id must be 1 or 2, got {other}")),
        }
    }
}

impl From<UserId> for u8 {
    fn from(u: UserId) -> u8 {
        u.index()
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// How the amplification factor of the active partition is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// Use `alpha_linear` as is.
    Fixed,
    /// Derive alpha from `pt_ris_dbm` through the amplifier gain model.
    FromPower,
    /// Search `pt_ris_dbm` for outage fairness, then derive alpha from it.
    Optimized,
}

impl AlphaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaMode::Fixed => "fixed",
            AlphaMode::FromPower => "from_power",
            AlphaMode::Optimized => "optimized",
        }
    }
}

/// Which event counts as an outage for the SIC-decoded (passive-served) user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageRule {
    /// `P(gamma_k < 2^r - 1)` for each user on its own.
    PerUser,
    /// The SIC user is also in outage whenever the first-stage decode fails.
    /// Only available from simulation.
    Joint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub pt_user_dbm: f64,
    pub pt_ris_dbm: f64,
    pub alpha_mode: AlphaMode,
    pub alpha_linear: f64,
    pub m_active: usize,
    pub n_passive: usize,
    pub rate_threshold_bps_hz: f64,
    pub epsilon_sic: f64,
    pub w0_dbm: f64,
    pub namp_dbm: f64,
    pub pa_efficiency: f64,
    pub g_max_db: f64,
    pub fc_ghz: f64,
    pub d_u1_ris_m: f64,
    pub d_u2_ris_m: f64,
    pub d_ris_bs_m: f64,
    /// Which user the active partition is aligned to.
    pub active_user: UserId,
    pub outage_rule: OutageRule,
    pub mc_trials: u64,
    pub seed: u64,
    /// Truncation limit of the inversion integral, in units of `1/std(G)`.
    pub quad_omega_max: f64,
    /// Absolute tolerance on the inverted CDF.
    pub quad_tol: f64,
    // Geometry kept for reference only; the path-loss model takes the
    // user-RIS and RIS-BS distances and the direct links are blocked.
    pub d_u1_bs_m: f64,
    pub d_u2_bs_m: f64,
    pub h_u1_m: f64,
    pub h_u2_m: f64,
    pub h_ris_m: f64,
    pub h_bs_m: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let quad = QuadratureSettings::default();
        Self {
            pt_user_dbm: 15.0,
            pt_ris_dbm: -47.0,
            alpha_mode: AlphaMode::Fixed,
            alpha_linear: 8.5,
            m_active: 512,
            n_passive: 512,
            rate_threshold_bps_hz: 2.0,
            epsilon_sic: 0.0,
            w0_dbm: -130.0,
            namp_dbm: -130.0,
            pa_efficiency: 1.0,
            g_max_db: 30.0,
            fc_ghz: 5.0,
            d_u1_ris_m: 35.51,
            d_u2_ris_m: 35.51,
            d_ris_bs_m: 20.22,
            active_user: UserId::U1,
            outage_rule: OutageRule::PerUser,
            mc_trials: 100_000,
            seed: 0x5EED_0001,
            quad_omega_max: quad.omega_max,
            quad_tol: quad.abs_tol,
            d_u1_bs_m: 55.73,
            d_u2_bs_m: 55.73,
            h_u1_m: 10.0,
            h_u2_m: 10.0,
            h_ris_m: 4.0,
            h_bs_m: 1.0,
        }
    }
}

/// One violated invariant, reported by [`SystemConfig::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigViolation {
    pub field: &'static str,
    pub value: f64,
    pub rule: &'static str,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.rule)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigWarning {
    AlphaClamped { from: f64, to: f64 },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::AlphaClamped { from, to } => {
                write!(f, "alpha_linear {from} clamped to {to} (allowed 0..30 dB)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Validated {
    pub config: SystemConfig,
    pub warnings: Vec<ConfigWarning>,
}

impl SystemConfig {
    /// Checks every invariant, clamping alpha into 0..30 dB.
    ///
    /// All violations are collected into a single [`Error::InvalidConfig`].
    pub fn validate(&self) -> Result<Validated> {
        let mut bad = Vec::new();
        let mut warnings = Vec::new();
        let mut push = |field, value, rule| bad.push(ConfigViolation { field, value, rule });

        for (field, value) in [
            ("pt_user_dbm", self.pt_user_dbm),
            ("pt_ris_dbm", self.pt_ris_dbm),
            ("w0_dbm", self.w0_dbm),
            ("namp_dbm", self.namp_dbm),
            ("g_max_db", self.g_max_db),
            ("h_u1_m", self.h_u1_m),
            ("h_u2_m", self.h_u2_m),
            ("h_ris_m", self.h_ris_m),
            ("h_bs_m", self.h_bs_m),
            ("d_u1_bs_m", self.d_u1_bs_m),
            ("d_u2_bs_m", self.d_u2_bs_m),
        ] {
            if !value.is_finite() {
                push(field, value, "must be finite");
            }
        }
        if self.m_active < 1 {
            push("m_active", self.m_active as f64, "must be at least 1");
        }
        if self.n_passive < 1 {
            push("n_passive", self.n_passive as f64, "must be at least 1");
        }
        if self.mc_trials < 1 {
            push("mc_trials", self.mc_trials as f64, "must be at least 1");
        }
        if !(self.rate_threshold_bps_hz >= 0.0 && self.rate_threshold_bps_hz.is_finite()) {
            push(
                "rate_threshold_bps_hz",
                self.rate_threshold_bps_hz,
                "must be finite and >= 0",
            );
        }
        if !(0.0..=1.0).contains(&self.epsilon_sic) {
            push("epsilon_sic", self.epsilon_sic, "must lie in [0, 1]");
        }
        if !(self.pa_efficiency > 0.0 && self.pa_efficiency <= 1.0) {
            push("pa_efficiency", self.pa_efficiency, "must lie in (0, 1]");
        }
        if self.g_max_db < 0.0 {
            push("g_max_db", self.g_max_db, "must be >= 0 dB");
        }
        if !(FC_GHZ_RANGE.0..=FC_GHZ_RANGE.1).contains(&self.fc_ghz) {
            push("fc_ghz", self.fc_ghz, "path-loss model valid for 2..6 GHz");
        }
        for (field, d) in [
            ("d_u1_ris_m", self.d_u1_ris_m),
            ("d_u2_ris_m", self.d_u2_ris_m),
            ("d_ris_bs_m", self.d_ris_bs_m),
        ] {
            if !(DISTANCE_M_RANGE.0..=DISTANCE_M_RANGE.1).contains(&d) {
                push(field, d, "path-loss model valid for 10..2000 m");
            }
        }
        if !(self.quad_omega_max > 0.0 && self.quad_omega_max.is_finite()) {
            push(
                "quad_omega_max",
                self.quad_omega_max,
                "must be finite and > 0",
            );
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            push("quad_tol", self.quad_tol, "must lie in (0, 1)");
        }

        let mut config = self.clone();
        if self.alpha_linear.is_nan() {
            push("alpha_linear", self.alpha_linear, "must be a number");
        } else {
            let clamped = self.alpha_linear.clamp(ALPHA_MIN, ALPHA_MAX);
            if clamped != self.alpha_linear {
                warnings.push(ConfigWarning::AlphaClamped {
                    from: self.alpha_linear,
                    to: clamped,
                });
                config.alpha_linear = clamped;
            }
        }

        if bad.is_empty() {
            Ok(Validated { config, warnings })
        } else {
            Err(Error::InvalidConfig(bad))
        }
    }

    pub fn quadrature(&self) -> QuadratureSettings {
        QuadratureSettings {
            omega_max: self.quad_omega_max,
            abs_tol: self.quad_tol,
            ..QuadratureSettings::default()
        }
    }

    /// SINR threshold `2^r - 1` for the configured rate.
    pub fn sinr_threshold(&self) -> f64 {
        num_traits::Float::exp2(self.rate_threshold_bps_hz) - 1.0
    }

    /// Stable 64-bit digest of every field, used to tag results.
    pub fn digest(&self) -> ConfigDigest {
        let mut text = String::new();
        // `{:?}` on f64 is the shortest round-trip representation.
        let _ = write!(
            text,
            "{:?}|{:?}|{}|{:?}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{:?}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}",
            self.pt_user_dbm,
            self.pt_ris_dbm,
            self.alpha_mode.as_str(),
            self.alpha_linear,
            self.m_active,
            self.n_passive,
            self.rate_threshold_bps_hz,
            self.epsilon_sic,
            self.w0_dbm,
            self.namp_dbm,
            self.pa_efficiency,
            self.g_max_db,
            self.fc_ghz,
            self.d_u1_ris_m,
            self.d_u2_ris_m,
            self.d_ris_bs_m,
            self.active_user,
            self.outage_rule,
            self.mc_trials,
            self.seed,
            self.quad_omega_max,
            self.quad_tol,
            self.d_u1_bs_m,
            self.d_u2_bs_m,
            self.h_u1_m,
            self.h_u2_m,
            self.h_ris_m,
            self.h_bs_m,
        );
        let hash = Sha256::digest(text.as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&hash[..8]);
        ConfigDigest(u64::from_be_bytes(bytes))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConfigDigest(pub u64);

impl fmt::Display for ConfigDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}
