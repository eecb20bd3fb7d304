//! CDF recovery from a characteristic function by Gil-Pelaez inversion:
//!
//! ```text
//! F(g) = 1/2 - (1/pi) \int_0^inf Im{ e^{-j w g} Psi(w) } / w dw
//! ```
//!
//! The integral runs in the normalized frequency `t = w std(G)` over dyadic
//! panels `[0,1], [1,2], [2,4], ...`, each integrated by adaptive
//! Gauss-Kronrod, until the remaining tail is provably below tolerance.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{integrate, QuadratureSettings};
use crate::{Error, Result};

/// A characteristic function `Psi(w) = E[exp(j w G)]` of a real variable.
pub trait CharacteristicFunction {
    /// `ln Psi(w)`. Only the imaginary part modulo `2 pi` matters.
    fn ln_cf(&self, omega: f64) -> Complex64;
    fn mean(&self) -> f64;
    fn std_dev(&self) -> f64;

    fn eval(&self, omega: f64) -> Complex64 {
        self.ln_cf(omega).exp()
    }
}

/// Adapts a closure returning `Psi(w)` plus the first two moments.
#[derive(Clone, Copy, Debug)]
pub struct FnCf<F> {
    pub f: F,
    pub mean: f64,
    pub std_dev: f64,
}

impl<F: Fn(f64) -> Complex64> FnCf<F> {
    pub fn new(f: F, mean: f64, std_dev: f64) -> Self {
        Self { f, mean, std_dev }
    }
}

impl<F: Fn(f64) -> Complex64> CharacteristicFunction for FnCf<F> {
    fn ln_cf(&self, omega: f64) -> Complex64 {
        (self.f)(omega).ln()
    }

    fn eval(&self, omega: f64) -> Complex64 {
        (self.f)(omega)
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn std_dev(&self) -> f64 {
        self.std_dev
    }
}

/// An inverted CDF value with its error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdfValue {
    /// `F(g)`, clamped to `[0, 1]`.
    pub value: f64,
    /// Quadrature plus truncation error bound.
    pub abs_err: f64,
    /// Truncation point in the original frequency units.
    pub omega_cut: f64,
    pub panels: usize,
    pub subdivisions: usize,
}

/// `F(g) = P(G <= g)` by Gil-Pelaez inversion.
///
/// Fails with [`Error::Accuracy`] when the error bound cannot be brought below
/// `quad.abs_tol` before `quad.omega_max` (normalized) or the subdivision
/// budget is spent.
pub fn gil_pelaez_cdf<C: CharacteristicFunction + ?Sized>(
    cf: &C,
    g: f64,
    quad: &QuadratureSettings,
) -> Result<CdfValue> {
    let mean = cf.mean();
    let s = cf.std_dev();
    if !g.is_finite() {
        return Err(Error::NonFinite {
            what: "g",
            value: g,
        });
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::NonPositive {
            what: "std(G)",
            value: s,
        });
    }
    let tol = quad.abs_tol;
    let limit_at_zero = (mean - g) / s;
    let integrand = |t: f64| {
        if t < quad.omega_min {
            return limit_at_zero;
        }
        let w = t / s;
        let z = cf.ln_cf(w);
        z.re.exp() * (z.im - w * g).sin() / t
    };
    // Tail heuristic: |Psi(T)| / T.
    let tail = |t: f64| cf.ln_cf(t / s).re.exp() / t;

    let budget = 0.5 * core::f64::consts::PI * tol;
    let mut sum = 0.0;
    let mut quad_err = 0.0;
    let mut subdivisions = 0;
    let mut panels = 0;
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        let k = panels as f64;
        let panel_tol = 3.0 * tol / (core::f64::consts::PI * (k + 1.0) * (k + 1.0));
        let r = integrate(integrand, lo, hi, panel_tol, quad.max_subdivisions);
        sum += r.value;
        quad_err += r.abs_err;
        subdivisions += r.subdivisions;
        panels += 1;

        let tail_bound = tail(hi);
        if tail_bound <= budget && r.value.abs() <= budget {
            let abs_err = (quad_err + tail_bound) / core::f64::consts::PI;
            if abs_err > tol {
                return Err(Error::Accuracy {
                    requested: tol,
                    achieved: abs_err,
                    omega: hi / s,
                });
            }
            let value = (0.5 - sum / core::f64::consts::PI).clamp(0.0, 1.0);
            return Ok(CdfValue {
                value,
                abs_err,
                omega_cut: hi / s,
                panels,
                subdivisions,
            });
        }
        if hi >= quad.omega_max {
            return Err(Error::Accuracy {
                requested: tol,
                achieved: (quad_err + tail_bound) / core::f64::consts::PI,
                omega: hi / s,
            });
        }
        lo = hi;
        hi *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn settings() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn normal_median() {
        let cf = FnCf::new(|w: f64| Complex64::new((-0.5 * w * w).exp(), 0.0), 0.0, 1.0);
        let r = gil_pelaez_cdf(&cf, 0.0, &settings()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn exponential_at_one() {
        let cf = FnCf::new(|w: f64| Complex64::new(1.0, -w).inv(), 1.0, 1.0);
        let r = gil_pelaez_cdf(&cf, 1.0, &settings()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 - (-1.0f64).exp(), epsilon = 1e-6);
        assert!(r.abs_err <= settings().abs_tol);
    }

    #[test]
    fn rejects_degenerate_variance() {
        let cf = FnCf::new(|_| Complex64::new(1.0, 0.0), 0.0, 0.0);
        assert!(matches!(
            gil_pelaez_cdf(&cf, 1.0, &settings()),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn truncation_limit_is_reported() {
        // A point mass never decays, so no finite cut-off suffices.
        let cf = FnCf::new(|w: f64| Complex64::new(0.0, w).exp(), 1.0, 1e-3);
        let quad = QuadratureSettings {
            omega_max: 1e3,
            ..settings()
        };
        assert!(matches!(
            gil_pelaez_cdf(&cf, 0.5, &quad),
            Err(Error::Accuracy { .. })
        ));
    }
}
