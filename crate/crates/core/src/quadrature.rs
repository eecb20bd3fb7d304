//! Globally adaptive Gauss-Kronrod (10/21-point) quadrature.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

/// Settings of the characteristic-function inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    /// Largest truncation point tried, in units of `1/std(G)`.
    pub omega_max: f64,
    /// Target absolute error of the returned probability.
    pub abs_tol: f64,
    /// Subdivision budget per dyadic panel.
    pub max_subdivisions: usize,
    /// Below this (normalized) frequency the integrand is replaced by its
    /// limit at zero.
    pub omega_min: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            omega_max: 1e8,
            abs_tol: 1e-8,
            max_subdivisions: 20_000,
            omega_min: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub subdivisions: usize,
    /// Whether `abs_err` met the requested tolerance.
    pub converged: bool,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_993_411,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One 21-point Kronrod rule with the QUADPACK error heuristic.
fn qk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = kronrod.abs();
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Integrates `f` over `[a, b]`, bisecting the worst segment until the summed
/// error estimate drops below `abs_tol` or `max_subdivisions` is spent.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Integral {
    let (value, err) = qk21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total_err = err;
    let mut subdivisions = 1;
    while total_err > abs_tol && subdivisions < max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Segment too narrow to split further.
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk21(&mut f, worst.a, mid);
        let (v2, e2) = qk21(&mut f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        subdivisions += 1;
    }
    // Re-sum from the segments; the running error total drifts.
    let (value, abs_err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
    Integral {
        value,
        abs_err,
        subdivisions,
        converged: abs_err <= abs_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1e-12, 10);
        assert!(
            (r.value - (8.0 + 1.0 - 2.0 + 0.5 + 6.0)).abs() < 1e-13,
            "{r:?}"
        );
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn oscillatory_integrand() {
        // \int_0^{20} sin(10x) dx = (1 - cos 200)/10
        let exact = (1.0 - 200f64.cos()) / 10.0;
        let r = integrate(|x| (10.0 * x).sin(), 0.0, 20.0, 1e-12, 1000);
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // \int_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9, 2000);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, 1e-15, 5);
        assert!(!r.converged);
        assert_eq!(r.subdivisions, 5);
    }
}
