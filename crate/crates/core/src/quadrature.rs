//! One-dimensional rules: Gauss-Legendre (fixed order) and adaptive
//! Gauss-Kronrod 21 with error propagation for nested use.

use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

pub(crate) fn gl12() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre_01(12))
}

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
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

/// Value and error estimate of an integral; `err` includes errors reported
/// by the integrand itself (inner integrals of a nested scheme).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Estimate {
    pub value: f64,
    pub err: f64,
    pub evals: u64,
}

fn gk21(f: &mut impl FnMut(f64) -> Estimate, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[10] * fc.value;
    let mut inner = WGK[10] * fc.err;
    let mut gauss = 0.0;
    let mut evals = fc.evals.max(1);
    for j in 0..10 {
        let f1 = f(c - hl * XGK[j]);
        let f2 = f(c + hl * XGK[j]);
        evals += f1.evals.max(1) + f2.evals.max(1);
        kron += WGK[j] * (f1.value + f2.value);
        inner += WGK[j] * (f1.err + f2.err);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1.value + f2.value);
        }
    }
    let value = kron * hl;
    let diff = ((kron - gauss) * hl).abs();
    Estimate { value, err: diff + inner * hl.abs() + 50.0 * f64::EPSILON * value.abs(), evals }
}

/// Adaptive bisection until `err <= max(abs_tol, rel_tol*|value|)` or the
/// interval budget is exhausted. Returns `(estimate, converged)`.
pub(crate) fn adaptive(
    mut f: impl FnMut(f64) -> Estimate,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> (Estimate, bool) {
    let mut pieces = vec![(a, b, gk21(&mut f, a, b))];
    loop {
        let value: f64 = pieces.iter().map(|p| p.2.value).sum();
        let err: f64 = pieces.iter().map(|p| p.2.err).sum();
        let evals: u64 = pieces.iter().map(|p| p.2.evals).sum();
        let est = Estimate { value, err, evals };
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return (est, true);
        }
        if pieces.len() >= max_intervals {
            return (est, false);
        }
        let (k, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.err.total_cmp(&y.1 .2.err))
            .expect("nonempty");
        let (lo, hi, old) = pieces.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            pieces.push((lo, hi, old));
            return (est, false);
        }
        pieces.push((lo, mid, gk21(&mut f, lo, mid)));
        pieces.push((mid, hi, gk21(&mut f, mid, hi)));
    }
}
