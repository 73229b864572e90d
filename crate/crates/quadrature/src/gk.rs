//! The 21-point Gauss-Kronrod rule and a globally adaptive bisection driver.

use crate::{Estimate, Method, QuadValue};

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One application of the 21-point Kronrod rule on `[a, b]`.
///
/// Returns the Kronrod estimate and a QUADPACK-style error estimate built from the
/// difference to the embedded 10-point Gauss rule.
pub fn qk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = T::zero();
    let mut res_abs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let width = half.abs();
    let result = res_k * half;
    res_abs *= width;
    res_asc *= width;
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Stopping rules for [`adaptive_gk`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for GkOptions {
    fn default() -> Self {
        GkOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 200 }
    }
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// Globally adaptive integration of `f` over `[a, b]`: the interval with the largest
/// error estimate is bisected until the summed error meets the tolerance.
///
/// A reversed or empty interval integrates to exactly zero.
pub fn adaptive_gk<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, opts: &GkOptions) -> Estimate<T> {
    if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Estimate { value: T::zero(), error: 0.0, evaluations: 0, method: Method::Empty };
    }
    let (value, error) = qk21(&mut f, a, b);
    let mut pieces = vec![Piece { a, b, value, error }];
    let mut evaluations = 21;
    loop {
        let total = pieces.iter().fold(T::zero(), |acc, p| acc + p.value);
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if total_err <= target || pieces.len() >= opts.max_intervals {
            return Estimate { value: total, error: total_err, evaluations, method: Method::Adaptive };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval can no longer be split in floating point.
            pieces.push(p);
            let total = pieces.iter().fold(T::zero(), |acc, p| acc + p.value);
            let total_err: f64 = pieces.iter().map(|p| p.error).sum();
            return Estimate { value: total, error: total_err, evaluations, method: Method::Adaptive };
        }
        let (v1, e1) = qk21(&mut f, p.a, mid);
        let (v2, e2) = qk21(&mut f, mid, p.b);
        evaluations += 42;
        pieces.push(Piece { a: p.a, b: mid, value: v1, error: e1 });
        pieces.push(Piece { a: mid, b: p.b, value: v2, error: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_on_high_degree_polynomials() {
        for deg in 0..=31 {
            let mut f = |x: f64| x.powi(deg);
            let (v, _) = qk21(&mut f, -1.0, 2.0);
            let exact = (2f64.powi(deg + 1) - (-1f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!((v - exact).abs() <= 1e-12 * exact.abs().max(1.0), "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let est = adaptive_gk(|x: f64| x.sqrt(), 0.0, 1.0, &GkOptions::default());
        assert!((est.value - 2.0 / 3.0).abs() < 1e-10);
    }
}
