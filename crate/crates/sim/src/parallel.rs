//! Multi-threaded Monte-Carlo drivers.
//!
//! Trials are cut into fixed chunks of [`CHUNK`] and every chunk runs the
//! sequential kernel from `risnoma_core::montecarlo`. Chunk results are
//! collected in chunk order before reduction, so every output is
//! bit-identical for any number of worker threads.

use std::ops::Range;

use rayon::prelude::*;
use risnoma_core::config::{SystemConfig, UserId};
use risnoma_core::link::LinkBudget;
use risnoma_core::montecarlo::{self, OutageCounts, OutageResult, Term, TermAccumulator};
use risnoma_core::optimizer::OutageEvaluator;
use risnoma_core::Complex64;

use crate::error::{Result, SimError};

pub const CHUNK: u64 = 4096;

fn chunks(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(CHUNK))
        .map(|i| i * CHUNK..((i + 1) * CHUNK).min(trials))
        .collect()
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SimError::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn outage_counts(budget: &LinkBudget, seed: u64, trials: u64) -> Result<OutageCounts> {
    let parts = chunks(trials)
        .into_par_iter()
        .map(|r| montecarlo::count_outages(budget, seed, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts
        .into_iter()
        .fold(OutageCounts::default(), OutageCounts::merge))
}

/// Outage of both users from one set of draws.
pub fn estimate_both(config: &SystemConfig) -> Result<[OutageResult; 2]> {
    let budget = LinkBudget::from_config(config)?;
    let counts = outage_counts(&budget, config.seed, config.mc_trials)?;
    let digest = config.digest();
    Ok(UserId::BOTH.map(|u| OutageResult::from_counts(&counts, u, digest)))
}

pub fn estimate_outage(config: &SystemConfig, user: UserId) -> Result<OutageResult> {
    Ok(estimate_both(config)?[user.index() as usize - 1])
}

pub fn sample_sinr_budget(
    budget: &LinkBudget,
    seed: u64,
    user: UserId,
    n: u64,
) -> Result<Vec<f64>> {
    let parts = chunks(n)
        .into_par_iter()
        .map(|r| {
            let mut out = Vec::new();
            montecarlo::sample_sinr_range(budget, seed, user, r, &mut out).map(|_| out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts.concat())
}

pub fn sample_sinr(config: &SystemConfig, user: UserId, n: usize) -> Result<Vec<f64>> {
    let budget = LinkBudget::from_config(config)?;
    sample_sinr_budget(&budget, config.seed, user, n as u64)
}

pub fn accumulate_terms(budget: &LinkBudget, seed: u64, n: u64) -> Result<TermAccumulator> {
    let parts = chunks(n)
        .into_par_iter()
        .map(|r| montecarlo::accumulate_terms(budget, seed, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts
        .into_iter()
        .fold(TermAccumulator::default(), TermAccumulator::merge))
}

/// Sample mean and total variance of one link term.
pub fn empirical_moments(config: &SystemConfig, term: Term, n: u64) -> Result<(Complex64, f64)> {
    let budget = LinkBudget::from_config(config)?;
    let acc = accumulate_terms(&budget, config.seed, n)?;
    Ok((acc.mean(term), acc.variance(term)))
}

/// Parallel Monte-Carlo objective with common random numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParallelMcEvaluator {
    pub seed: u64,
    pub trials: u64,
}

impl OutageEvaluator for ParallelMcEvaluator {
    fn evaluate(&mut self, budget: &LinkBudget) -> risnoma_core::Result<[f64; 2]> {
        let parts = chunks(self.trials)
            .into_par_iter()
            .map(|r| montecarlo::count_outages(budget, self.seed, r))
            .collect::<Result<Vec<_>, _>>()?;
        let c = parts
            .into_iter()
            .fold(OutageCounts::default(), OutageCounts::merge);
        Ok([c.op(UserId::U1), c.op(UserId::U2)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_every_trial_once() {
        let c = chunks(2 * CHUNK + 5);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2], 2 * CHUNK..2 * CHUNK + 5);
        assert!(chunks(0).is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let config = SystemConfig {
            m_active: 16,
            n_passive: 16,
            mc_trials: 10_000,
            alpha_linear: 3.0,
            ..SystemConfig::default()
        };
        for u in UserId::BOTH {
            let seq = montecarlo::estimate_outage(&config, u).unwrap();
            let par = with_workers(Some(3), || estimate_outage(&config, u))
                .unwrap()
                .unwrap();
            assert_eq!(seq, par);
        }
        let seq = montecarlo::sample_sinr(&config, UserId::U2, 5000).unwrap();
        assert_eq!(seq, sample_sinr(&config, UserId::U2, 5000).unwrap());
    }

    #[test]
    fn moments_independent_of_worker_count() {
        let b = LinkBudget::from_config(&SystemConfig {
            m_active: 8,
            n_passive: 8,
            ..SystemConfig::default()
        })
        .unwrap();
        let one = with_workers(Some(1), || accumulate_terms(&b, 5, 20_000))
            .unwrap()
            .unwrap();
        let four = with_workers(Some(4), || accumulate_terms(&b, 5, 20_000))
            .unwrap()
            .unwrap();
        assert_eq!(one, four);
    }
}
