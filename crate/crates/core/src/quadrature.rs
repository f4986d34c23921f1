//! Adaptive 21-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::sum::CompensatedSum;

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

/// Integral estimate over one interval.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    /// Smallest error the rule can certify in f64 on this interval.
    pub roundoff: f64,
}

impl PartialEq for Estimate {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Estimate {}

impl PartialOrd for Estimate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Estimate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One application of the 21-point Kronrod rule with its embedded 10-point
/// Gauss rule.
pub fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    Estimate {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale),
        roundoff: 50.0 * f64::EPSILON * res_abs * scale,
    }
}

/// Tolerances and limits for [`integrate`] and [`integrate_to_infinity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals per finite integral.
    pub max_intervals: usize,
    /// The truncated tail must be below this fraction of the integral.
    pub tail_tol: f64,
    /// Width of the chunks used to march out to infinity.
    pub chunk: f64,
    /// Maximum number of chunks.
    pub max_chunks: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 2000,
            tail_tol: 1e-12,
            chunk: 2.0,
            max_chunks: 10_000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    /// Upper limit actually used for semi-infinite integrals.
    pub upper: f64,
    /// Bound on the neglected tail for semi-infinite integrals.
    pub tail: f64,
}

/// Globally adaptive bisection on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadSpec) -> Result<Integral> {
    let first = qk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;
    let mut roundoff = first.roundoff;
    let mut intervals = 1;
    while error > spec.abs_tol.max(spec.rel_tol * value.abs()).max(2.0 * roundoff) {
        if intervals >= spec.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{a}, {b}] after {intervals} intervals (error {error:e})"
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in f64
            heap.push(worst);
            break;
        }
        let left = qk21(f, worst.a, mid);
        let right = qk21(f, mid, worst.b);
        intervals += 1;
        heap.push(left);
        heap.push(right);
        // re-sum to avoid drift from repeated updates
        value = heap.iter().map(|e| e.value).collect::<CompensatedSum>().value();
        error = heap.iter().map(|e| e.error).sum();
        roundoff = heap.iter().map(|e| e.roundoff).sum();
    }
    if !value.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integral on [{a}, {b}]"
        )));
    }
    Ok(Integral {
        value,
        error,
        intervals,
        upper: b,
        tail: 0.0,
    })
}

/// `∫_a^∞ f` for an integrand that is eventually decreasing and decays at
/// least exponentially.
///
/// Marches out in chunks of `spec.chunk`; stops once a chunk contributes
/// less than `tail_tol` of the total and the contributions are shrinking
/// geometrically, bounding the rest by the geometric series of the last
/// ratio.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    spec: &QuadSpec,
) -> Result<Integral> {
    let mut total = CompensatedSum::new();
    let mut error = 0.0;
    let mut intervals = 0;
    let mut lo = a;
    let mut previous: Option<f64> = None;
    for _ in 0..spec.max_chunks {
        let hi = lo + spec.chunk;
        let part = integrate(f, lo, hi, spec)?;
        total.add(part.value);
        error += part.error;
        intervals += part.intervals;
        lo = hi;
        let sum = total.value();
        let piece = part.value.abs();
        if let Some(prev) = previous {
            let ratio = if prev > 0.0 { piece / prev } else { 0.0 };
            if ratio < 1.0 {
                let tail = piece * ratio / (1.0 - ratio);
                if tail <= spec.tail_tol * sum.abs() || (sum == 0.0 && piece == 0.0) {
                    return Ok(Integral {
                        value: sum,
                        error,
                        intervals,
                        upper: lo,
                        tail,
                    });
                }
            }
        }
        previous = Some(piece);
    }
    Err(Error::QuadratureFailure(format!(
        "tail from {a} did not fall below {:e} within {} chunks",
        spec.tail_tol, spec.max_chunks
    )))
}
