//! Large-scale path loss and small-scale Rayleigh fading.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{SystemConfig, UserId, DISTANCE_M_RANGE, FC_GHZ_RANGE};
use crate::{Error, Result};

/// 3GPP UMi street-canyon NLOS point-to-point fit, carrier in GHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossModel {
    fc_ghz: f64,
}

impl PathLossModel {
    pub fn new(fc_ghz: f64) -> Result<Self> {
        check_range("carrier frequency (GHz)", fc_ghz, FC_GHZ_RANGE)?;
        Ok(Self { fc_ghz })
    }

    pub fn fc_ghz(&self) -> f64 {
        self.fc_ghz
    }

    /// `36.7 log10(d) + 22.7 + 26 log10(fc)` in dB.
    pub fn loss_db(&self, distance_m: f64) -> Result<f64> {
        check_range("distance (m)", distance_m, DISTANCE_M_RANGE)?;
        Ok(36.7 * distance_m.log10() + 22.7 + 26.0 * self.fc_ghz.log10())
    }

    /// Complex channel variance `1/L`.
    pub fn variance(&self, distance_m: f64) -> Result<f64> {
        Ok(variance_from_loss_db(self.loss_db(distance_m)?))
    }
}

fn check_range(what: &'static str, value: f64, (min, max): (f64, f64)) -> Result<()> {
    if value.is_finite() && (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    }
}

pub fn path_loss_db(distance_m: f64, fc_ghz: f64) -> Result<f64> {
    PathLossModel::new(fc_ghz)?.loss_db(distance_m)
}

pub fn channel_variance(distance_m: f64, fc_ghz: f64) -> Result<f64> {
    PathLossModel::new(fc_ghz)?.variance(distance_m)
}

pub fn variance_from_loss_db(loss_db: f64) -> f64 {
    Float::powf(10.0, -loss_db / 10.0)
}

/// Complex variance of each link class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkVariances {
    pub u1_ris: f64,
    pub u2_ris: f64,
    pub ris_bs: f64,
}

impl LinkVariances {
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let model = PathLossModel::new(config.fc_ghz)?;
        Ok(Self {
            u1_ris: model.variance(config.d_u1_ris_m)?,
            u2_ris: model.variance(config.d_u2_ris_m)?,
            ris_bs: model.variance(config.d_ris_bs_m)?,
        })
    }

    /// Unit variance on every link (0 dB path loss), for tests and studies
    /// that factor out geometry.
    pub fn unit() -> Self {
        Self {
            u1_ris: 1.0,
            u2_ris: 1.0,
            ris_bs: 1.0,
        }
    }

    pub fn user_ris(&self, user: UserId) -> f64 {
        match user {
            UserId::U1 => self.u1_ris,
            UserId::U2 => self.u2_ris,
        }
    }
}

/// Counter-based random substream: one per Monte-Carlo trial.
///
/// The same `(seed, stream_id)` yields the same sequence on any thread, so
/// trials can be evaluated in any order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One draw of every fading coefficient.
///
/// `h*` have length M (active partition), `g*` have length N (passive).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelRealization {
    pub h1: Vec<Complex64>,
    pub h2: Vec<Complex64>,
    pub g1: Vec<Complex64>,
    pub g2: Vec<Complex64>,
    pub h_bs: Vec<Complex64>,
    pub g_bs: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn m(&self) -> usize {
        self.h_bs.len()
    }

    pub fn n(&self) -> usize {
        self.g_bs.len()
    }

    pub fn h(&self, user: UserId) -> &[Complex64] {
        match user {
            UserId::U1 => &self.h1,
            UserId::U2 => &self.h2,
        }
    }

    pub fn g(&self, user: UserId) -> &[Complex64] {
        match user {
            UserId::U1 => &self.g1,
            UserId::U2 => &self.g2,
        }
    }

    pub(crate) fn check_dims(&self) -> Result<()> {
        let (m, n) = (self.m(), self.n());
        for (what, len, want) in [
            ("h1", self.h1.len(), m),
            ("h2", self.h2.len(), m),
            ("g1", self.g1.len(), n),
            ("g2", self.g2.len(), n),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: want,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// Redraws every vector in place, reusing the allocations.
    ///
    /// Draw order is fixed (h1, h2, g1, g2, h_bs, g_bs; real then imaginary
    /// part) so a stream maps to exactly one realization.
    pub fn redraw(&mut self, m: usize, n: usize, var: &LinkVariances, stream: RandomStream) {
        let mut rng = stream.rng();
        fill_cn(&mut self.h1, m, var.u1_ris, &mut rng);
        fill_cn(&mut self.h2, m, var.u2_ris, &mut rng);
        fill_cn(&mut self.g1, n, var.u1_ris, &mut rng);
        fill_cn(&mut self.g2, n, var.u2_ris, &mut rng);
        fill_cn(&mut self.h_bs, m, var.ris_bs, &mut rng);
        fill_cn(&mut self.g_bs, n, var.ris_bs, &mut rng);
    }

    pub fn draw(m: usize, n: usize, var: &LinkVariances, stream: RandomStream) -> Self {
        let mut ch = Self::default();
        ch.redraw(m, n, var, stream);
        ch
    }
}

/// Circularly-symmetric CN(0, variance): each quadrature part has half.
fn fill_cn<R: Rng>(out: &mut Vec<Complex64>, len: usize, variance: f64, rng: &mut R) {
    let s = (variance / 2.0).sqrt();
    out.clear();
    out.extend((0..len).map(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    }));
}

/// Draws all six fading vectors for `config` from `stream`.
pub fn draw_realization(config: &SystemConfig, stream: RandomStream) -> Result<ChannelRealization> {
    let var = LinkVariances::from_config(config)?;
    Ok(ChannelRealization::draw(
        config.m_active,
        config.n_passive,
        &var,
        stream,
    ))
}
