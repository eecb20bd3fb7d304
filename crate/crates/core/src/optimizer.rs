//! Choice of the RIS power budget `P_t^RIS` (hence the amplifier gain) that
//! balances the two users' outage probabilities.
//!
//! The search first scans a 1 dB grid over the interval. If one user is in
//! outage at least `ceiling` everywhere on it, the budget is spent on the
//! other user alone (minimizing its outage); otherwise the gap
//! `|OP1 - OP2|` is minimized. The grid minimum is then refined inside its
//! neighbouring cells by golden-section search or simulated annealing.

use core::fmt;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytic::analytic_outage_budget;
use crate::config::{SystemConfig, UserId};
use crate::link::LinkBudget;
use crate::montecarlo::count_outages;
use crate::quadrature::QuadratureSettings;
use crate::ris::GainModel;
use crate::units::dbm_to_watt;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    GoldenSection,
    SimulatedAnnealing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvaluatorKind {
    Analytic,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealingSchedule {
    /// In decades of the objective.
    pub initial_temperature: f64,
    pub cooling: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling: 0.97,
            iterations: 400,
            seed: 0x00A1_1EA1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Search interval for `P_t^RIS`, dBm.
    pub interval: (f64, f64),
    /// Refinement tolerance, dB.
    pub tol_db: f64,
    pub grid_step_db: f64,
    pub method: SearchMethod,
    pub evaluator: EvaluatorKind,
    /// A user whose outage never drops below this on the grid is given up.
    pub ceiling: f64,
    pub annealing: AnnealingSchedule,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            interval: (-70.0, -10.0),
            tol_db: 0.1,
            grid_step_db: 1.0,
            method: SearchMethod::GoldenSection,
            evaluator: EvaluatorKind::Analytic,
            ceiling: 0.1,
            annealing: AnnealingSchedule::default(),
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::OutOfRange {
                what: "optimizer interval",
                value: hi - lo,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        for (what, v) in [("tol_db", self.tol_db), ("grid_step_db", self.grid_step_db)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive { what, value: v });
            }
        }
        if !(self.ceiling > 0.0 && self.ceiling < 1.0) {
            return Err(Error::OutOfRange {
                what: "ceiling",
                value: self.ceiling,
                min: 0.0,
                max: 1.0,
            });
        }
        let a = &self.annealing;
        if !(a.cooling > 0.0 && a.cooling < 1.0) {
            return Err(Error::OutOfRange {
                what: "annealing cooling",
                value: a.cooling,
                min: 0.0,
                max: 1.0,
            });
        }
        if a.initial_temperature.is_nan() || a.initial_temperature <= 0.0 {
            return Err(Error::NonPositive {
                what: "annealing initial_temperature",
                value: a.initial_temperature,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OptimizerMode {
    Balanced,
    FallbackToUser1,
    FallbackToUser2,
}

impl OptimizerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerMode::Balanced => "balanced",
            OptimizerMode::FallbackToUser1 => "fallback_u1",
            OptimizerMode::FallbackToUser2 => "fallback_u2",
        }
    }

    /// The user whose outage is minimized in a fallback mode.
    pub fn served_user(self) -> Option<UserId> {
        match self {
            OptimizerMode::Balanced => None,
            OptimizerMode::FallbackToUser1 => Some(UserId::U1),
            OptimizerMode::FallbackToUser2 => Some(UserId::U2),
        }
    }
}

impl fmt::Display for OptimizerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationOutcome {
    pub pt_ris_dbm: f64,
    /// Clamped power gain at `pt_ris_dbm`.
    pub alpha: f64,
    pub op1: f64,
    pub op2: f64,
    pub gap: f64,
    /// `max(op1, op2)`.
    pub max_op: f64,
    pub mode: OptimizerMode,
    /// Distinct budgets evaluated.
    pub evaluations: usize,
}

impl OptimizationOutcome {
    pub fn op(&self, user: UserId) -> f64 {
        match user {
            UserId::U1 => self.op1,
            UserId::U2 => self.op2,
        }
    }
}

/// Outage probabilities of both users, `[OP1, OP2]`, for a resolved budget.
pub trait OutageEvaluator {
    fn evaluate(&mut self, budget: &LinkBudget) -> Result<[f64; 2]>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticEvaluator {
    pub quad: QuadratureSettings,
}

impl OutageEvaluator for AnalyticEvaluator {
    fn evaluate(&mut self, budget: &LinkBudget) -> Result<[f64; 2]> {
        Ok([
            analytic_outage_budget(budget, UserId::U1, &self.quad)?.value,
            analytic_outage_budget(budget, UserId::U2, &self.quad)?.value,
        ])
    }
}

/// Single-threaded Monte-Carlo with common random numbers: every budget is
/// evaluated on the same channel draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequentialMcEvaluator {
    pub seed: u64,
    pub trials: u64,
}

impl OutageEvaluator for SequentialMcEvaluator {
    fn evaluate(&mut self, budget: &LinkBudget) -> Result<[f64; 2]> {
        let c = count_outages(budget, self.seed, 0..self.trials)?;
        Ok([c.op(UserId::U1), c.op(UserId::U2)])
    }
}

/// Maps `P_t^RIS` to a budget and memoizes evaluations.
struct Problem<'a, E: ?Sized> {
    config: &'a SystemConfig,
    gain: GainModel,
    eval: &'a mut E,
    cache: Vec<(f64, f64, [f64; 2])>,
}

impl<'a, E: OutageEvaluator + ?Sized> Problem<'a, E> {
    fn new(config: &'a SystemConfig, eval: &'a mut E) -> Result<Self> {
        let base = LinkBudget::with_alpha(config, 1.0)?;
        let gain = base.gain_model(config)?;
        Ok(Self {
            config,
            gain,
            eval,
            cache: Vec::new(),
        })
    }

    fn alpha(&self, p_dbm: f64) -> Result<f64> {
        Ok(self.gain.alpha(dbm_to_watt(p_dbm)?))
    }

    /// `(alpha, [OP1, OP2])` at `p_dbm`.
    fn ops(&mut self, p_dbm: f64) -> Result<(f64, [f64; 2])> {
        if let Some(&(_, a, ops)) = self.cache.iter().find(|(p, _, _)| *p == p_dbm) {
            return Ok((a, ops));
        }
        let alpha = self.alpha(p_dbm)?;
        let budget = LinkBudget::with_alpha(self.config, alpha)?;
        let ops = self.eval.evaluate(&budget)?;
        if !(ops[0].is_finite() && ops[1].is_finite()) {
            return Err(Error::NonFiniteObjective { at: p_dbm });
        }
        self.cache.push((p_dbm, alpha, ops));
        Ok((alpha, ops))
    }

    fn objective(&mut self, p_dbm: f64, mode: OptimizerMode) -> Result<f64> {
        let (_, [op1, op2]) = self.ops(p_dbm)?;
        Ok(match mode {
            OptimizerMode::Balanced => (op1 - op2).abs(),
            OptimizerMode::FallbackToUser1 => op1,
            OptimizerMode::FallbackToUser2 => op2,
        })
    }
}

/// `|OP1 - OP2|` at `pt_ris_dbm`, analytic, with the gain implied by the
/// budget.
pub fn objective_gap(pt_ris_dbm: f64, config: &SystemConfig) -> Result<f64> {
    let mut eval = AnalyticEvaluator {
        quad: config.quadrature(),
    };
    let mut p = Problem::new(config, &mut eval)?;
    p.objective(pt_ris_dbm, OptimizerMode::Balanced)
}

/// Grid over the interval, endpoints included.
fn grid(settings: &OptimizerSettings) -> Vec<f64> {
    let (lo, hi) = settings.interval;
    let step = settings.grid_step_db;
    let n = ((hi - lo) / step).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if g.last().is_some_and(|&x| x < hi) {
        g.push(hi);
    }
    g
}

/// Fallback rule applied to the grid values.
pub fn select_mode(grid_ops: &[[f64; 2]], ceiling: f64) -> OptimizerMode {
    let u1_lost = grid_ops.iter().all(|o| o[0] >= ceiling);
    let u2_lost = grid_ops.iter().all(|o| o[1] >= ceiling);
    let best = |i: usize| grid_ops.iter().map(|o| o[i]).fold(f64::INFINITY, f64::min);
    match (u1_lost, u2_lost) {
        (false, false) => OptimizerMode::Balanced,
        (false, true) => OptimizerMode::FallbackToUser1,
        (true, false) => OptimizerMode::FallbackToUser2,
        (true, true) if best(1) < best(0) => OptimizerMode::FallbackToUser2,
        (true, true) => OptimizerMode::FallbackToUser1,
    }
}

/// Optimizes with the evaluator named in `settings`; Monte-Carlo runs
/// sequentially with `config.mc_trials` trials.
pub fn optimize(
    config: &SystemConfig,
    settings: &OptimizerSettings,
) -> Result<OptimizationOutcome> {
    match settings.evaluator {
        EvaluatorKind::Analytic => optimize_with(
            config,
            settings,
            &mut AnalyticEvaluator {
                quad: config.quadrature(),
            },
        ),
        EvaluatorKind::MonteCarlo => optimize_with(
            config,
            settings,
            &mut SequentialMcEvaluator {
                seed: config.seed,
                trials: config.mc_trials,
            },
        ),
    }
}

pub fn optimize_with<E: OutageEvaluator + ?Sized>(
    config: &SystemConfig,
    settings: &OptimizerSettings,
    eval: &mut E,
) -> Result<OptimizationOutcome> {
    settings.validate()?;
    let mut prob = Problem::new(config, eval)?;
    let points = grid(settings);
    let mut grid_ops = Vec::with_capacity(points.len());
    for &p in &points {
        grid_ops.push(prob.ops(p)?.1);
    }
    let mode = select_mode(&grid_ops, settings.ceiling);

    // Strict `<` keeps the lowest power among ties (flat, capped regions).
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for (i, &p) in points.iter().enumerate() {
        let f = prob.objective(p, mode)?;
        if f < best_f {
            best_i = i;
            best_f = f;
        }
    }
    let mut best_p = points[best_i];

    let (lo, hi) = settings.interval;
    let refined = match settings.method {
        SearchMethod::GoldenSection => {
            let a = if best_i > 0 { points[best_i - 1] } else { lo };
            let b = points.get(best_i + 1).copied().unwrap_or(hi);
            golden_section(&mut prob, mode, a, b, settings.tol_db)?
        }
        SearchMethod::SimulatedAnnealing => anneal(&mut prob, mode, best_p, settings)?,
    };
    if prob.objective(refined, mode)? < best_f {
        best_p = refined;
    }

    let (alpha, [op1, op2]) = prob.ops(best_p)?;
    Ok(OptimizationOutcome {
        pt_ris_dbm: best_p,
        alpha,
        op1,
        op2,
        gap: (op1 - op2).abs(),
        max_op: op1.max(op2),
        mode,
        evaluations: prob.cache.len(),
    })
}

fn golden_section<E: OutageEvaluator + ?Sized>(
    prob: &mut Problem<'_, E>,
    mode: OptimizerMode,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = prob.objective(x1, mode)?;
    let mut f2 = prob.objective(x2, mode)?;
    // The bracket shrinks geometrically, so this ends even on flat stretches.
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = prob.objective(x1, mode)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = prob.objective(x2, mode)?;
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

/// Metropolis search over the whole interval on `log10` of the objective.
fn anneal<E: OutageEvaluator + ?Sized>(
    prob: &mut Problem<'_, E>,
    mode: OptimizerMode,
    start: f64,
    settings: &OptimizerSettings,
) -> Result<f64> {
    let s = &settings.annealing;
    let (lo, hi) = settings.interval;
    let energy = |f: f64| (f + 1e-300).log10();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut x = start;
    let mut e = energy(prob.objective(x, mode)?);
    let (mut best_x, mut best_e) = (x, e);
    let mut temp = s.initial_temperature;
    for _ in 0..s.iterations {
        let scale = (0.25 * (hi - lo) * temp / s.initial_temperature).max(0.25 * settings.tol_db);
        let z: f64 = rng.sample(StandardNormal);
        let cand = (x + scale * z).clamp(lo, hi);
        let ec = energy(prob.objective(cand, mode)?);
        let u: f64 = rng.random();
        if ec <= e || u < ((e - ec) / temp).exp() {
            x = cand;
            e = ec;
            if e < best_e {
                best_x = x;
                best_e = e;
            }
        }
        temp *= s.cooling;
    }
    Ok(best_x)
}
