//! Moment-matched Gamma fit of SINR samples.

use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{Result, SimError};

pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
    /// Kolmogorov-Smirnov distance between the samples and the fit.
    pub ks_stat: f64,
}

/// Fits `k = mean^2 / var`, `theta = var / mean`.
pub fn fit_gamma(samples: &[f64]) -> Result<GammaFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(SimError::Fit("need at least 100 samples"));
    }
    if !samples.iter().all(|&x| x > 0.0 && x.is_finite()) {
        return Err(SimError::Fit("samples must be positive and finite"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if var.is_nan() || var <= 0.0 {
        return Err(SimError::Fit("samples have zero variance"));
    }
    let shape = mean * mean / var;
    let scale = var / mean;
    let dist = Gamma::new(shape, 1.0 / scale).map_err(|_| SimError::Fit("degenerate moments"))?;

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ks_stat = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(GammaFit {
        shape,
        scale,
        ks_stat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(fit_gamma(&[1.0; 50]).is_err());
        assert!(fit_gamma(&[2.5; 500]).is_err());
        let mut v: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        v[7] = 0.0;
        assert!(fit_gamma(&v).is_err());
        v[7] = -1.0;
        assert!(fit_gamma(&v).is_err());
    }
}
