//! Weighted sums of independent (non)central chi-square variables and their
//! characteristic function.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::gilpelaez::CharacteristicFunction;
use super::stats::LinkStats;
use crate::link::{LinkBudget, Role};

/// `weight * sum_{k=1}^{dof} X_k^2` with `X_k ~ N(mu_k, variance)` and
/// `sum mu_k^2 = mean^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadComponent {
    pub weight: f64,
    pub dof: u32,
    /// Variance of each underlying real Gaussian.
    pub variance: f64,
    /// Root noncentrality; zero for a central component.
    pub mean: f64,
}

impl QuadComponent {
    pub fn central(weight: f64, dof: u32, variance: f64) -> Self {
        Self {
            weight,
            dof,
            variance,
            mean: 0.0,
        }
    }

    pub fn noncentral(weight: f64, variance: f64, mean: f64) -> Self {
        Self {
            weight,
            dof: 1,
            variance,
            mean,
        }
    }

    pub fn expectation(&self) -> f64 {
        self.weight * (self.dof as f64 * self.variance + self.mean * self.mean)
    }

    pub fn var(&self) -> f64 {
        let s2 = self.variance;
        self.weight
            * self.weight
            * (2.0 * self.dof as f64 * s2 * s2 + 4.0 * s2 * self.mean * self.mean)
    }

    /// `ln Psi(omega)` of this component, without the `exp`.
    #[inline]
    fn ln_cf(&self, omega: f64) -> (f64, f64) {
        // (1 - 2j x)^{-n/2} exp(j y / (1 - 2j x)), x = w omega s2, y = w omega mu^2
        let x = self.weight * omega * self.variance;
        let y = self.weight * omega * self.mean * self.mean;
        let q = 1.0 + 4.0 * x * x;
        let half_n = 0.5 * self.dof as f64;
        let re = -0.5 * half_n * (4.0 * x * x).ln_1p() - 2.0 * x * y / q;
        let im = half_n * (2.0 * x).atan() + y / q;
        (re, im)
    }
}

/// The random variable `G` whose CDF at `g` is the outage probability.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadFormSpec {
    pub components: Vec<QuadComponent>,
}

impl QuadFormSpec {
    pub fn new(components: Vec<QuadComponent>) -> Self {
        Self { components }
    }

    /// Adds a component unless its weight is zero.
    pub fn push(&mut self, c: QuadComponent) {
        if c.weight != 0.0 {
            self.components.push(c);
        }
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(QuadComponent::expectation).sum()
    }

    pub fn variance(&self) -> f64 {
        self.components.iter().map(QuadComponent::var).sum()
    }

    /// `Psi_G(omega)`: product of per-component CFs, each at `weight * omega`.
    pub fn cf(&self, omega: f64) -> Complex64 {
        self.ln_cf(omega).exp()
    }
}

impl CharacteristicFunction for QuadFormSpec {
    fn ln_cf(&self, omega: f64) -> Complex64 {
        let (re, im) = self
            .components
            .iter()
            .map(|c| c.ln_cf(omega))
            .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
        Complex64::new(re, im)
    }

    fn mean(&self) -> f64 {
        QuadFormSpec::mean(self)
    }

    fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// Evaluates the CF of `spec` at `omega`.
pub fn cf_eval(spec: &QuadFormSpec, omega: f64) -> Complex64 {
    spec.cf(omega)
}

/// Builds `G` for one user at SINR threshold `v`; the outage probability is
/// `P(G < W0 v)`.
///
/// `|A+B|^2` is split into `(Re A + Re B)^2 + (Im B)^2` and `|C+D|^2` into
/// `(Re C + D)^2 + (Im C)^2`, complex variances halving between parts.
pub fn build_quadform(stats: &LinkStats, budget: &LinkBudget, role: Role, v: f64) -> QuadFormSpec {
    let pt = budget.pt_user_w;
    let ab = |w: f64| {
        [
            QuadComponent::noncentral(w, stats.a.var + stats.b.var / 2.0, stats.a.mu),
            QuadComponent::central(w, 1, stats.b.var / 2.0),
        ]
    };
    let cd = |w: f64| {
        [
            QuadComponent::noncentral(w, stats.d.var + stats.c.var / 2.0, stats.d.mu),
            QuadComponent::central(w, 1, stats.c.var / 2.0),
        ]
    };
    let noise = QuadComponent::central(
        -budget.sigma_z2_w * budget.alpha * v,
        2 * budget.m as u32,
        stats.e_var / 2.0,
    );

    let mut spec = QuadFormSpec::default();
    match role {
        Role::Active => {
            ab(pt).into_iter().for_each(|c| spec.push(c));
            cd(-pt * v).into_iter().for_each(|c| spec.push(c));
        }
        Role::Passive => {
            cd(pt).into_iter().for_each(|c| spec.push(c));
            ab(-budget.epsilon * pt * v)
                .into_iter()
                .for_each(|c| spec.push(c));
        }
    }
    spec.push(noise);
    spec
}
