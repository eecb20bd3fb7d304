//! Monte-Carlo trial kernels.
//!
//! Trial `i` always draws its channels from `RandomStream::new(seed, i)`, so a
//! range of trials can be evaluated anywhere and the per-range results merged
//! in any order (counts) or in a fixed order (moment accumulators). The
//! functions here are sequential; `risnoma` runs the same kernels in parallel.

use core::fmt;
use core::ops::Range;

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::{ChannelRealization, RandomStream};
use crate::config::{ConfigDigest, OutageRule, SystemConfig, UserId};
use crate::link::{compute_link_terms, sinr, LinkBudget, LinkTerms, SinrPair};
use crate::ris::HybridRisState;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    Analytic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonteCarlo => "mc",
            Method::Analytic => "analytic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageResult {
    pub op: f64,
    /// Zero for analytic results.
    pub trials: u64,
    /// Binomial standard error for Monte-Carlo, inversion error bound for
    /// analytic results.
    pub std_err: f64,
    pub method: Method,
    pub user: UserId,
    pub config_digest: ConfigDigest,
}

impl OutageResult {
    pub fn from_counts(counts: &OutageCounts, user: UserId, digest: ConfigDigest) -> Self {
        let op = counts.op(user);
        let n = counts.trials.max(1) as f64;
        Self {
            op,
            trials: counts.trials,
            std_err: (op * (1.0 - op) / n).sqrt(),
            method: Method::MonteCarlo,
            user,
            config_digest: digest,
        }
    }
}

/// Reusable buffers for one trial: draw, align, link terms.
#[derive(Clone, Debug)]
pub struct TrialKernel {
    budget: LinkBudget,
    ch: ChannelRealization,
    ris: HybridRisState,
}

impl TrialKernel {
    pub fn new(budget: &LinkBudget) -> Self {
        Self {
            budget: *budget,
            ch: ChannelRealization::default(),
            ris: HybridRisState {
                alpha: budget.alpha,
                ..Default::default()
            },
        }
    }

    pub fn budget(&self) -> &LinkBudget {
        &self.budget
    }

    pub fn terms(&mut self, seed: u64, trial: u64) -> Result<LinkTerms> {
        let b = &self.budget;
        self.ch
            .redraw(b.m, b.n, &b.variances, RandomStream::new(seed, trial));
        self.ris
            .realign(&self.ch, b.active_user, b.passive_user())?;
        compute_link_terms(&self.ch, &self.ris, b)
    }

    pub fn sinr(&mut self, seed: u64, trial: u64) -> Result<SinrPair> {
        let lt = self.terms(seed, trial)?;
        Ok(sinr(&lt, &self.budget))
    }
}

/// Outage event counts of both users over a set of trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OutageCounts {
    pub trials: u64,
    /// Indexed by `UserId::index() - 1`.
    pub outages: [u64; 2],
}

impl OutageCounts {
    pub fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            outages: [
                self.outages[0] + other.outages[0],
                self.outages[1] + other.outages[1],
            ],
        }
    }

    pub fn op(&self, user: UserId) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.outages[user.index() as usize - 1] as f64 / self.trials as f64
    }
}

/// Which users are in outage for one SINR pair.
pub fn outage_events(s: &SinrPair, budget: &LinkBudget) -> [bool; 2] {
    let v = budget.threshold;
    let active_out = s.gamma1 < v;
    let passive_out = match budget.outage_rule {
        OutageRule::PerUser => s.gamma2 < v,
        OutageRule::Joint => s.gamma2 < v || active_out,
    };
    let mut out = [false; 2];
    out[budget.active_user.index() as usize - 1] = active_out;
    out[budget.passive_user().index() as usize - 1] = passive_out;
    out
}

/// Counts outages of both users over `trials`.
pub fn count_outages(budget: &LinkBudget, seed: u64, trials: Range<u64>) -> Result<OutageCounts> {
    let mut k = TrialKernel::new(budget);
    let mut counts = OutageCounts::default();
    for t in trials {
        let s = k.sinr(seed, t)?;
        let ev = outage_events(&s, budget);
        counts.trials += 1;
        for (c, e) in counts.outages.iter_mut().zip(ev) {
            *c += e as u64;
        }
    }
    Ok(counts)
}

/// Sequential Monte-Carlo outage estimate with `config.mc_trials` trials.
pub fn estimate_outage(config: &SystemConfig, user: UserId) -> Result<OutageResult> {
    let budget = LinkBudget::from_config(config)?;
    let counts = count_outages(&budget, config.seed, 0..config.mc_trials)?;
    Ok(OutageResult::from_counts(&counts, user, config.digest()))
}

/// Appends the SINR of `user` for each trial in `trials` to `out`.
pub fn sample_sinr_range(
    budget: &LinkBudget,
    seed: u64,
    user: UserId,
    trials: Range<u64>,
    out: &mut Vec<f64>,
) -> Result<()> {
    let role = budget.role(user);
    let mut k = TrialKernel::new(budget);
    out.reserve(trials.end.saturating_sub(trials.start) as usize);
    for t in trials {
        out.push(k.sinr(seed, t)?.of(role));
    }
    Ok(())
}

/// `n` SINR samples of `user`, trial `i` from stream `i`.
pub fn sample_sinr(config: &SystemConfig, user: UserId, n: usize) -> Result<Vec<f64>> {
    let budget = LinkBudget::from_config(config)?;
    let mut out = Vec::new();
    sample_sinr_range(&budget, config.seed, user, 0..n as u64, &mut out)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    A,
    B,
    C,
    D,
}

impl Term {
    pub const ALL: [Term; 4] = [Term::A, Term::B, Term::C, Term::D];

    pub fn of(self, lt: &LinkTerms) -> Complex64 {
        match self {
            Term::A => Complex64::new(lt.a, 0.0),
            Term::B => lt.b,
            Term::C => lt.c,
            Term::D => Complex64::new(lt.d, 0.0),
        }
    }
}

/// Streaming mean, total variance and A-C / B-D co-moments of the link
/// terms. Merging follows Chan et al., so fixed-order merges of fixed chunks
/// are reproducible.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TermAccumulator {
    pub n: u64,
    mean: [Complex64; 4],
    /// `sum |x - mean|^2`
    m2: [f64; 4],
    /// `sum (A - mean_A) conj(C - mean_C)`
    co_ac: Complex64,
    /// `sum (B - mean_B) conj(D - mean_D)`
    co_bd: Complex64,
}

impl TermAccumulator {
    pub fn push(&mut self, lt: &LinkTerms) {
        let x = Term::ALL.map(|t| t.of(lt));
        self.n += 1;
        let n = self.n as f64;
        let delta: [Complex64; 4] = core::array::from_fn(|i| x[i] - self.mean[i]);
        for (m, d) in self.mean.iter_mut().zip(delta) {
            *m += d / n;
        }
        let after: [Complex64; 4] = core::array::from_fn(|i| x[i] - self.mean[i]);
        for i in 0..4 {
            self.m2[i] += (delta[i] * after[i].conj()).re;
        }
        self.co_ac += delta[0] * after[2].conj();
        self.co_bd += delta[1] * after[3].conj();
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: [Complex64; 4] = core::array::from_fn(|i| other.mean[i] - self.mean[i]);
        let w = na * nb / n;
        Self {
            n: self.n + other.n,
            mean: core::array::from_fn(|i| self.mean[i] + delta[i] * (nb / n)),
            m2: core::array::from_fn(|i| self.m2[i] + other.m2[i] + delta[i].norm_sqr() * w),
            co_ac: self.co_ac + other.co_ac + delta[0] * delta[2].conj() * w,
            co_bd: self.co_bd + other.co_bd + delta[1] * delta[3].conj() * w,
        }
    }

    pub fn mean(&self, t: Term) -> Complex64 {
        self.mean[t as usize]
    }

    /// Unbiased total (real + imaginary) variance.
    pub fn variance(&self, t: Term) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2[t as usize] / (self.n - 1) as f64
    }

    /// Magnitude of the complex correlation coefficient of A and C.
    pub fn corr_ac(&self) -> f64 {
        self.co_ac.norm() / (self.m2[0] * self.m2[2]).sqrt()
    }

    /// Magnitude of the complex correlation coefficient of B and D.
    pub fn corr_bd(&self) -> f64 {
        self.co_bd.norm() / (self.m2[1] * self.m2[3]).sqrt()
    }
}

/// Accumulates link-term moments over `trials`.
pub fn accumulate_terms(
    budget: &LinkBudget,
    seed: u64,
    trials: Range<u64>,
) -> Result<TermAccumulator> {
    let mut k = TrialKernel::new(budget);
    let mut acc = TermAccumulator::default();
    for t in trials {
        acc.push(&k.terms(seed, t)?);
    }
    Ok(acc)
}

/// Sample mean and total variance of one link term over `n` realizations.
pub fn empirical_moments(config: &SystemConfig, term: Term, n: u64) -> Result<(Complex64, f64)> {
    let budget = LinkBudget::from_config(config)?;
    let acc = accumulate_terms(&budget, config.seed, 0..n)?;
    Ok((acc.mean(term), acc.variance(term)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkVariances;
    use crate::config::AlphaMode;

    fn unit_budget(m: usize, n: usize) -> LinkBudget {
        let mut b = LinkBudget::with_alpha(&SystemConfig::default(), 1.0).unwrap();
        b.m = m;
        b.n = n;
        b.variances = LinkVariances::unit();
        b.pt_user_w = 1.0;
        b.w0_w = 1.0;
        b.sigma_z2_w = 0.0;
        b
    }

    #[test]
    fn zero_rate_never_outage() {
        let c = SystemConfig {
            rate_threshold_bps_hz: 0.0,
            mc_trials: 200,
            m_active: 16,
            n_passive: 16,
            ..SystemConfig::default()
        };
        for u in UserId::BOTH {
            assert_eq!(estimate_outage(&c, u).unwrap().op, 0.0);
        }
    }

    #[test]
    fn interference_free_user_never_in_outage() {
        // Only user 1 has a channel, no noise at all: its SINR is infinite.
        let mut b = unit_budget(4, 4);
        b.w0_w = 0.0;
        let mut k = TrialKernel::new(&b);
        k.ch.redraw(4, 4, &b.variances, RandomStream::new(1, 0));
        for v in k.ch.h2.iter_mut().chain(k.ch.g2.iter_mut()) {
            *v = Complex64::new(0.0, 0.0);
        }
        k.ris.realign(&k.ch, UserId::U1, UserId::U2).unwrap();
        let lt = compute_link_terms(&k.ch, &k.ris, &b).unwrap();
        b.threshold = 1e12;
        assert!(!outage_events(&sinr(&lt, &b), &b)[0]);
    }

    #[test]
    fn counts_split_and_merge() {
        let b = unit_budget(8, 8);
        let whole = count_outages(&b, 3, 0..300).unwrap();
        let parts = count_outages(&b, 3, 100..300)
            .unwrap()
            .merge(count_outages(&b, 3, 0..100).unwrap());
        assert_eq!(whole, parts);
    }

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let b = unit_budget(8, 8);
        let whole = accumulate_terms(&b, 9, 0..500).unwrap();
        let merged = accumulate_terms(&b, 9, 0..137)
            .unwrap()
            .merge(accumulate_terms(&b, 9, 137..500).unwrap());
        for t in Term::ALL {
            assert!((whole.mean(t) - merged.mean(t)).norm() < 1e-12);
            assert!((whole.variance(t) / merged.variance(t) - 1.0).abs() < 1e-12);
        }
        assert!((whole.corr_ac() - merged.corr_ac()).abs() < 1e-12);
    }

    #[test]
    fn joint_rule_dominates_per_user() {
        let mut b = unit_budget(8, 8);
        let per_user = count_outages(&b, 5, 0..400).unwrap();
        b.outage_rule = OutageRule::Joint;
        let joint = count_outages(&b, 5, 0..400).unwrap();
        assert_eq!(joint.outages[0], per_user.outages[0]);
        assert!(joint.outages[1] >= per_user.outages[1]);
    }

    #[test]
    fn samples_are_non_negative_and_match_counts() {
        let c = SystemConfig {
            m_active: 32,
            n_passive: 32,
            mc_trials: 400,
            ..SystemConfig::default()
        };
        let b = LinkBudget::from_config(&c).unwrap();
        for u in UserId::BOTH {
            let s = sample_sinr(&c, u, 400).unwrap();
            assert!(s.iter().all(|&g| g >= 0.0));
            let below = s.iter().filter(|&&g| g < b.threshold).count() as f64 / 400.0;
            assert_eq!(below, estimate_outage(&c, u).unwrap().op);
        }
    }

    #[test]
    fn from_power_alpha_is_used() {
        let c = SystemConfig {
            alpha_mode: AlphaMode::FromPower,
            m_active: 8,
            n_passive: 8,
            ..SystemConfig::default()
        };
        let b = LinkBudget::from_config(&c).unwrap();
        let lt = TrialKernel::new(&b).terms(1, 0).unwrap();
        assert_eq!(lt.alpha, b.alpha);
    }
}
