//! Statistical checks of the channel generator and path loss.

use risnoma_core::channel::{
    channel_variance, path_loss_db, ChannelRealization, LinkVariances, RandomStream,
};
use statrs::distribution::{ContinuousCDF, Normal};

fn draws(seed: u64, trials: u64) -> Vec<risnoma_core::Complex64> {
    (0..trials)
        .flat_map(|t| {
            ChannelRealization::draw(16, 16, &LinkVariances::unit(), RandomStream::new(seed, t)).h1
        })
        .collect()
}

#[test]
fn rayleigh_magnitude_and_quadrature_variance() {
    let h = draws(7, 20_000);
    let n = h.len() as f64;
    let mean_abs = h.iter().map(|z| z.norm()).sum::<f64>() / n;
    assert!(
        (mean_abs - std::f64::consts::PI.sqrt() / 2.0).abs() < 0.003,
        "{mean_abs}"
    );
    let var_re = h.iter().map(|z| z.re * z.re).sum::<f64>() / n;
    let var_im = h.iter().map(|z| z.im * z.im).sum::<f64>() / n;
    assert!((var_re - 0.5).abs() < 0.005 && (var_im - 0.5).abs() < 0.005);
    let power = h.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    assert!((power - 1.0).abs() < 0.01);
}

#[test]
fn real_parts_pass_kolmogorov_smirnov() {
    let mut x: Vec<f64> = draws(8, 3_000).iter().map(|z| z.re).collect();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let dist = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = dist.cdf(v);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    // 1% critical value 1.63 / sqrt(n)
    assert!(d < 1.63 / n.sqrt(), "D = {d}");
}

#[test]
fn streams_are_distinct_and_uncorrelated() {
    let a = ChannelRealization::draw(4096, 1, &LinkVariances::unit(), RandomStream::new(1, 10)).h1;
    let b = ChannelRealization::draw(4096, 1, &LinkVariances::unit(), RandomStream::new(1, 11)).h1;
    let c = ChannelRealization::draw(4096, 1, &LinkVariances::unit(), RandomStream::new(2, 10)).h1;
    assert_ne!(a, b);
    assert_ne!(a, c);
    let corr = |x: &[risnoma_core::Complex64], y: &[risnoma_core::Complex64]| {
        let s: risnoma_core::Complex64 = x.iter().zip(y).map(|(p, q)| p * q.conj()).sum();
        s.norm() / x.len() as f64
    };
    assert!(corr(&a, &b) < 0.06 && corr(&a, &c) < 0.06);
    let again =
        ChannelRealization::draw(4096, 1, &LinkVariances::unit(), RandomStream::new(1, 10)).h1;
    assert_eq!(a, again);
}

#[test]
fn link_variances_scale_with_path_loss() {
    for (d, loss) in [(20.22, 88.795), (35.51, 97.772), (55.73, 104.955)] {
        assert!((path_loss_db(d, 5.0).unwrap() - loss).abs() < 1e-3);
        let v = channel_variance(d, 5.0).unwrap();
        assert!((10.0 * v.log10() + loss).abs() < 1e-3);
    }
}
