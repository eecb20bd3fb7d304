//! Hybrid RIS: per-partition phase alignment and the active-element gain.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::ChannelRealization;
use crate::config::{UserId, ALPHA_MAX, ALPHA_MIN};
use crate::{Error, Result};

/// Phase vectors of both partitions and the power amplification factor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HybridRisState {
    /// Active partition, unit modulus, length M.
    pub theta: Vec<Complex64>,
    /// Passive partition, unit modulus, length N.
    pub beta: Vec<Complex64>,
    /// Power gain of every active element (linear).
    pub alpha: f64,
}

/// Unit phasor that cancels the phase of `p`; zero products map to phase 0.
#[inline]
fn counter_phase(p: Complex64) -> Complex64 {
    let r = p.norm();
    if r > 0.0 {
        p.conj() / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

impl HybridRisState {
    /// Re-aligns in place: the active partition co-phases `active_user`'s
    /// cascaded channel, the passive partition co-phases `passive_user`'s.
    pub fn realign(
        &mut self,
        ch: &ChannelRealization,
        active_user: UserId,
        passive_user: UserId,
    ) -> Result<()> {
        if active_user == passive_user {
            return Err(Error::SameUser);
        }
        ch.check_dims()?;
        let h = ch.h(active_user);
        let g = ch.g(passive_user);
        self.theta.clear();
        self.theta
            .extend(h.iter().zip(&ch.h_bs).map(|(h, hb)| counter_phase(h * hb)));
        self.beta.clear();
        self.beta
            .extend(g.iter().zip(&ch.g_bs).map(|(g, gb)| counter_phase(g * gb)));
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Coherent phase alignment. The returned state has `alpha = 1`; set the
/// amplification with [`HybridRisState::with_alpha`].
pub fn align_phases(
    ch: &ChannelRealization,
    active_user: UserId,
    passive_user: UserId,
) -> Result<HybridRisState> {
    let mut state = HybridRisState {
        alpha: 1.0,
        ..Default::default()
    };
    state.realign(ch, active_user, passive_user)?;
    Ok(state)
}

/// Output power available to each of the `m` active elements.
pub fn element_output_power(pt_ris_w: f64, m: usize) -> f64 {
    pt_ris_w / m.max(1) as f64
}

/// DC power drawn by one PA delivering `p_out_w` at efficiency `nu`.
pub fn pa_consumption(p_out_w: f64, nu: f64) -> f64 {
    p_out_w / nu
}

/// Amplitude gain `min(sqrt(P_o / (P_t E|h|^2)), G_max)`.
///
/// `mean_sq_channel` is the average power of the user-to-element channel seen
/// at one amplifier input.
pub fn amplifier_gain(p_o_w: f64, pt_user_w: f64, mean_sq_channel: f64, g_max: f64) -> f64 {
    (p_o_w / (pt_user_w * mean_sq_channel)).sqrt().min(g_max)
}

/// Inputs of the amplifier gain model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainModel {
    pub m_active: usize,
    pub pt_user_w: f64,
    /// Per-element channel power of the active-served user.
    pub mean_sq_channel: f64,
    /// Amplitude gain cap (linear).
    pub g_max: f64,
}

impl GainModel {
    /// Power gain `G^2` for a given RIS budget, before the 0..30 dB clamp.
    pub fn raw_alpha(&self, pt_ris_w: f64) -> f64 {
        let g = amplifier_gain(
            element_output_power(pt_ris_w, self.m_active),
            self.pt_user_w,
            self.mean_sq_channel,
            self.g_max,
        );
        g * g
    }

    /// Power gain clamped to the practical 0..30 dB range.
    pub fn alpha(&self, pt_ris_w: f64) -> f64 {
        clamp_alpha(self.raw_alpha(pt_ris_w))
    }
}

pub fn clamp_alpha(alpha: f64) -> f64 {
    alpha.clamp(ALPHA_MIN, ALPHA_MAX)
}
