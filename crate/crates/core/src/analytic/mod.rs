//! Outage probability without simulation.
//!
//! For large arrays the link terms are Gaussian ([`stats`]), so the outage
//! event `gamma_k < v` becomes `G < W0 v` for a weighted sum `G` of
//! independent (non)central chi-square variables ([`quadform`]), whose CDF is
//! recovered from its characteristic function ([`gilpelaez`]).

pub mod gilpelaez;
pub mod quadform;
pub mod stats;

pub use gilpelaez::{gil_pelaez_cdf, CdfValue, CharacteristicFunction, FnCf};
pub use quadform::{build_quadform, cf_eval, QuadComponent, QuadFormSpec};
pub use stats::{stats_a, stats_b, stats_c, stats_d, LinkStats, TermKind, TermStats};

use crate::config::{OutageRule, SystemConfig, UserId};
use crate::link::LinkBudget;
use crate::montecarlo::{Method, OutageResult};
use crate::quadrature::QuadratureSettings;
use crate::{Error, Result};

/// `P(gamma_user < threshold)` for a resolved budget.
pub fn analytic_outage_budget(
    budget: &LinkBudget,
    user: UserId,
    quad: &QuadratureSettings,
) -> Result<CdfValue> {
    if budget.outage_rule == OutageRule::Joint {
        return Err(Error::Unsupported(
            "joint outage has no closed form; use Monte-Carlo",
        ));
    }
    let v = budget.threshold;
    if v <= 0.0 {
        // G >= 0 and g = 0: the event has probability zero.
        return Ok(CdfValue {
            value: 0.0,
            abs_err: 0.0,
            omega_cut: 0.0,
            panels: 0,
            subdivisions: 0,
        });
    }
    let stats = LinkStats::from_budget(budget);
    let spec = build_quadform(&stats, budget, budget.role(user), v);
    gil_pelaez_cdf(&spec, budget.w0_w * v, quad)
}

/// Analytic outage probability of `user`; `std_err` carries the inversion
/// error bound.
pub fn analytic_outage(config: &SystemConfig, user: UserId) -> Result<OutageResult> {
    let budget = LinkBudget::from_config(config)?;
    let cdf = analytic_outage_budget(&budget, user, &config.quadrature())?;
    Ok(OutageResult {
        op: cdf.value,
        trials: 0,
        std_err: cdf.abs_err,
        method: Method::Analytic,
        user,
        config_digest: config.digest(),
    })
}
