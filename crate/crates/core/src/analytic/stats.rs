//! Large-array (CLT) moments of the effective link terms.
//!
//! Arguments named `sigma_*` are channel standard deviations, i.e. square
//! roots of the complex variances.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::link::LinkBudget;

/// `1 - pi^2/16`: variance of a product of two unit Rayleigh magnitudes.
pub const RAYLEIGH_PRODUCT_VAR: f64 = 1.0 - PI * PI / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermKind {
    RealGaussian,
    /// Circularly-symmetric; `var` is the total (real + imaginary) variance.
    ComplexGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TermStats {
    pub mu: f64,
    pub var: f64,
    pub kind: TermKind,
}

/// Coherent active sum `sqrt(alpha) sum |h||h_bs|`.
pub fn stats_a(alpha: f64, m: usize, sigma_h: f64, sigma_bs: f64) -> TermStats {
    let m = m as f64;
    TermStats {
        mu: alpha.sqrt() * m * PI * sigma_h * sigma_bs / 4.0,
        var: alpha * m * sigma_h.powi(2) * sigma_bs.powi(2) * RAYLEIGH_PRODUCT_VAR,
        kind: TermKind::RealGaussian,
    }
}

/// Unaligned passive sum of the active-served user.
pub fn stats_b(n: usize, sigma_g: f64, sigma_bs: f64) -> TermStats {
    TermStats {
        mu: 0.0,
        var: n as f64 * sigma_g.powi(2) * sigma_bs.powi(2),
        kind: TermKind::ComplexGaussian,
    }
}

/// Unaligned (amplified) active sum of the passive-served user.
pub fn stats_c(alpha: f64, m: usize, sigma_h: f64, sigma_bs: f64) -> TermStats {
    TermStats {
        mu: 0.0,
        var: alpha * m as f64 * sigma_h.powi(2) * sigma_bs.powi(2),
        kind: TermKind::ComplexGaussian,
    }
}

/// Coherent passive sum `sum |g||g_bs|`.
pub fn stats_d(n: usize, sigma_g: f64, sigma_bs: f64) -> TermStats {
    let n = n as f64;
    TermStats {
        mu: n * PI * sigma_g * sigma_bs / 4.0,
        var: n * sigma_g.powi(2) * sigma_bs.powi(2) * RAYLEIGH_PRODUCT_VAR,
        kind: TermKind::RealGaussian,
    }
}

/// Moments of every term for one budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkStats {
    pub a: TermStats,
    pub b: TermStats,
    pub c: TermStats,
    pub d: TermStats,
    /// Complex variance of each `theta h_bs` entry.
    pub e_var: f64,
}

impl LinkStats {
    pub fn from_budget(b: &LinkBudget) -> Self {
        let (s_act, s_pas, s_bs) = b.sigmas();
        Self {
            a: stats_a(b.alpha, b.m, s_act, s_bs),
            b: stats_b(b.n, s_act, s_bs),
            c: stats_c(b.alpha, b.m, s_pas, s_bs),
            d: stats_d(b.n, s_pas, s_bs),
            e_var: b.variances.ris_bs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn term_a_unit_statistics() {
        let s = stats_a(1.0, 1, 1.0, 1.0);
        assert_abs_diff_eq!(s.mu, core::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.var, 0.383_15, epsilon = 1e-5);
        assert_eq!(s.kind, TermKind::RealGaussian);
        assert_abs_diff_eq!(stats_a(1.0, 100, 1.0, 1.0).mu, 78.540, epsilon = 1e-3);
    }

    #[test]
    fn alpha_scaling() {
        for m in [1, 17, 512] {
            let base = stats_a(1.0, m, 0.3, 0.7);
            let four = stats_a(4.0, m, 0.3, 0.7);
            assert_eq!(four.mu, 2.0 * base.mu);
            assert_eq!(four.var, 4.0 * base.var);
        }
    }

    #[test]
    fn terms_b_c_d_statistics() {
        let b = stats_b(1, 1.0, 1.0);
        assert_eq!((b.mu, b.var, b.kind), (0.0, 1.0, TermKind::ComplexGaussian));
        let c = stats_c(1.0, 1, 1.0, 1.0);
        assert_eq!((c.mu, c.var, c.kind), (0.0, 1.0, TermKind::ComplexGaussian));
        assert_abs_diff_eq!(stats_d(4, 1.0, 1.0).mu, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            stats_d(64, 1.0, 1.0).var,
            64.0 * RAYLEIGH_PRODUCT_VAR,
            epsilon = 1e-12
        );
    }
}
