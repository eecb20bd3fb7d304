//! Effective end-to-end link terms and per-user SINR.
//!
//! With the active partition aligned to the "active-served" user and the
//! passive partition to the other one, the received signal collapses to
//!
//! ```text
//! y = sqrt(Pt) [ (a + b) x_act + (c + d) x_pas ] + sqrt(alpha) sum z theta h_bs + w0
//! ```
//!
//! and the BS decodes the amplified user first, then the other after SIC.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::{ChannelRealization, LinkVariances};
use crate::config::{AlphaMode, OutageRule, SystemConfig, UserId};
use crate::ris::{GainModel, HybridRisState};
use crate::units::{db_to_linear, dbm_to_watt};
use crate::{Error, Result};

/// Every scalar the link model needs, in watts and linear ratios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    pub m: usize,
    pub n: usize,
    pub pt_user_w: f64,
    pub w0_w: f64,
    pub sigma_z2_w: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// SINR threshold `2^r - 1`.
    pub threshold: f64,
    pub variances: LinkVariances,
    pub active_user: UserId,
    pub outage_rule: OutageRule,
}

impl LinkBudget {
    /// Resolves a validated config. `AlphaMode::Optimized` must be turned into
    /// a concrete power by the optimizer first.
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let mut budget = Self::with_alpha(config, 1.0)?;
        budget.alpha =
            match config.alpha_mode {
                AlphaMode::Fixed => crate::ris::clamp_alpha(config.alpha_linear),
                AlphaMode::FromPower => budget
                    .gain_model(config)?
                    .alpha(dbm_to_watt(config.pt_ris_dbm)?),
                AlphaMode::Optimized => return Err(Error::Unsupported(
                    "alpha_mode = optimized must be resolved by the optimizer before evaluation",
                )),
            };
        Ok(budget)
    }

    /// Same as [`from_config`](Self::from_config) but with an explicit alpha.
    pub fn with_alpha(config: &SystemConfig, alpha: f64) -> Result<Self> {
        Ok(Self {
            m: config.m_active,
            n: config.n_passive,
            pt_user_w: dbm_to_watt(config.pt_user_dbm)?,
            w0_w: dbm_to_watt(config.w0_dbm)?,
            sigma_z2_w: dbm_to_watt(config.namp_dbm)?,
            alpha,
            epsilon: config.epsilon_sic,
            threshold: config.sinr_threshold(),
            variances: LinkVariances::from_config(config)?,
            active_user: config.active_user,
            outage_rule: config.outage_rule,
        })
    }

    pub fn gain_model(&self, config: &SystemConfig) -> Result<GainModel> {
        Ok(GainModel {
            m_active: self.m,
            pt_user_w: self.pt_user_w,
            mean_sq_channel: self.variances.user_ris(self.active_user),
            g_max: db_to_linear(config.g_max_db)?.sqrt(),
        })
    }

    pub fn passive_user(&self) -> UserId {
        self.active_user.other()
    }

    pub fn role(&self, user: UserId) -> Role {
        if user == self.active_user {
            Role::Active
        } else {
            Role::Passive
        }
    }

    /// Channel standard deviations `(sigma_h_act, sigma_h_pas, sigma_bs)`.
    pub fn sigmas(&self) -> (f64, f64, f64) {
        (
            self.variances.user_ris(self.active_user).sqrt(),
            self.variances.user_ris(self.passive_user()).sqrt(),
            self.variances.ris_bs.sqrt(),
        )
    }
}

/// Which partition a user is aligned to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Served (and amplified) by the active partition; decoded first.
    Active,
    /// Served by the passive partition; decoded after SIC.
    Passive,
}

/// Effective link terms of one realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkTerms {
    /// `sqrt(alpha) sum |h_act||h_bs|`
    pub a: f64,
    /// `sum g_act beta g_bs`
    pub b: Complex64,
    /// `sqrt(alpha) sum h_pas theta h_bs`
    pub c: Complex64,
    /// `sum |g_pas||g_bs|`
    pub d: f64,
    /// `sum |theta h_bs|^2 = sum |h_bs|^2`
    pub active_noise_gain: f64,
    pub alpha: f64,
    pub w0: f64,
    pub sigma_z2: f64,
}

impl LinkTerms {
    pub fn noise_power(&self) -> f64 {
        self.sigma_z2 * self.alpha * self.active_noise_gain + self.w0
    }
}

/// SINR of the active-served user (`gamma1`) and of the SIC user (`gamma2`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl SinrPair {
    pub fn of(&self, role: Role) -> f64 {
        match role {
            Role::Active => self.gamma1,
            Role::Passive => self.gamma2,
        }
    }
}

/// Computes the link terms; `ris` must be aligned with `budget.active_user`
/// on the active partition.
pub fn compute_link_terms(
    ch: &ChannelRealization,
    ris: &HybridRisState,
    budget: &LinkBudget,
) -> Result<LinkTerms> {
    ch.check_dims()?;
    for (what, len, want) in [
        ("theta", ris.theta.len(), ch.m()),
        ("beta", ris.beta.len(), ch.n()),
    ] {
        if len != want {
            return Err(Error::DimensionMismatch {
                what,
                expected: want,
                found: len,
            });
        }
    }
    let act = budget.active_user;
    let pas = act.other();
    let sqrt_alpha = ris.alpha.sqrt();

    let mut a = 0.0;
    let mut c = Complex64::new(0.0, 0.0);
    let mut noise_gain = 0.0;
    for (((ha, hp), hb), th) in ch
        .h(act)
        .iter()
        .zip(ch.h(pas))
        .zip(&ch.h_bs)
        .zip(&ris.theta)
    {
        a += ha.norm() * hb.norm();
        c += hp * th * hb;
        noise_gain += (th * hb).norm_sqr();
    }
    let mut b = Complex64::new(0.0, 0.0);
    let mut d = 0.0;
    for (((ga, gp), gb), be) in ch.g(act).iter().zip(ch.g(pas)).zip(&ch.g_bs).zip(&ris.beta) {
        b += ga * be * gb;
        d += gp.norm() * gb.norm();
    }
    Ok(LinkTerms {
        a: sqrt_alpha * a,
        b,
        c: c * sqrt_alpha,
        d,
        active_noise_gain: noise_gain,
        alpha: ris.alpha,
        w0: budget.w0_w,
        sigma_z2: budget.sigma_z2_w,
    })
}

/// Per-user SINR with residual SIC interference `epsilon * Pt |a+b|^2`.
pub fn sinr(lt: &LinkTerms, budget: &LinkBudget) -> SinrPair {
    let s1 = budget.pt_user_w * (lt.b + lt.a).norm_sqr();
    let s2 = budget.pt_user_w * (lt.c + lt.d).norm_sqr();
    let noise = lt.noise_power();
    SinrPair {
        gamma1: s1 / (s2 + noise),
        gamma2: s2 / (budget.epsilon * s1 + noise),
    }
}

/// Literal superposition of both users' symbols through every RIS element.
///
/// `x1`, `x2` are the symbols of user 1 and 2, `z` the amplifier noise of the
/// M active elements and `w0` the receiver noise sample.
pub fn synthesize_received(
    ch: &ChannelRealization,
    ris: &HybridRisState,
    budget: &LinkBudget,
    x1: Complex64,
    x2: Complex64,
    z: &[Complex64],
    w0: Complex64,
) -> Result<Complex64> {
    ch.check_dims()?;
    if z.len() != ch.m() {
        return Err(Error::DimensionMismatch {
            what: "amplifier noise",
            expected: ch.m(),
            found: z.len(),
        });
    }
    let sqrt_alpha = ris.alpha.sqrt();
    let mut y = Complex64::new(0.0, 0.0);
    for (user, x) in [(UserId::U1, x1), (UserId::U2, x2)] {
        let active: Complex64 = ch
            .h(user)
            .iter()
            .zip(&ris.theta)
            .zip(&ch.h_bs)
            .map(|((h, t), hb)| h * t * hb)
            .sum();
        let passive: Complex64 = ch
            .g(user)
            .iter()
            .zip(&ris.beta)
            .zip(&ch.g_bs)
            .map(|((g, b), gb)| g * b * gb)
            .sum();
        y += (active * sqrt_alpha + passive) * x;
    }
    y *= budget.pt_user_w.sqrt();
    let amp_noise: Complex64 = z
        .iter()
        .zip(&ris.theta)
        .zip(&ch.h_bs)
        .map(|((z, t), hb)| z * t * hb)
        .sum();
    Ok(y + amp_noise * sqrt_alpha + w0)
}
