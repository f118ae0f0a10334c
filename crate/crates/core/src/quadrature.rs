//! Globally adaptive 21-point Gauss-Kronrod quadrature.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed error estimate drops below the
//! requested tolerance. Error estimates follow the QUADPACK rescaling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

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

/// Function evaluations spent on one panel.
pub const EVALS_PER_PANEL: usize = 21;

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_evals: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Value, absolute error estimate and evaluation count of one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Single 21-point Kronrod panel with embedded 10-point Gauss error estimate.
///
/// Returns `(integral, integral of |f|, error estimate)`.
pub fn gauss_kronrod_21<F>(f: &F, lo: f64, hi: f64) -> (f64, f64, f64)
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * f_center;
    let mut res_abs = res_kronrod.abs();

    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let error = rescale_error(err, res_abs, res_asc * half.abs());
    (value, res_abs, error)
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points
/// used as initial panel boundaries.
///
/// `points` must be sorted and contain at least two entries. Zero-width
/// panels are dropped. The relative tolerance is measured against the
/// integral of `|f|`, which equals the value for non-negative integrands and
/// stays meaningful for integrands that cancel to nearly zero.
pub fn integrate<F>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if points.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain(format!(
            "quadrature breakpoints must be sorted and finite: {points:?}"
        )));
    }
    if !(opts.rel_tol >= 0.0 && opts.abs_tol >= 0.0) || (opts.rel_tol == 0.0 && opts.abs_tol == 0.0)
    {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, abs_value, error) = gauss_kronrod_21(&f, w[0], w[1]);
            evaluations += EVALS_PER_PANEL;
            heap.push(Panel {
                lo: w[0],
                hi: w[1],
                value,
                abs_value,
                error,
            });
        }
    }

    let sums = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, a, e), p| {
            (v + p.value, a + p.abs_value, e + p.error)
        })
    };
    let (mut value, mut abs_value, mut error) = sums(&heap);
    let mut iterations = 0usize;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::convergence(format!(
                "integrand produced a non-finite panel sum ({value}, {error})"
            )));
        }
        let target = |value: f64, abs_value: f64| {
            opts.abs_tol.max(opts.rel_tol * value.abs().max(abs_value))
        };
        if error <= target(value, abs_value) {
            // running sums drift; confirm against a fresh summation
            (value, abs_value, error) = sums(&heap);
            if error <= target(value, abs_value) {
                return Ok(QuadResult {
                    value,
                    abs_error: error,
                    evaluations,
                });
            }
        }
        if evaluations + 2 * EVALS_PER_PANEL > opts.max_evals {
            return Err(Error::BudgetExceeded {
                evaluations,
                value,
                abs_error: error,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::convergence(format!(
                "panel [{}, {}] cannot be subdivided further; error estimate {:e}",
                worst.lo, worst.hi, error
            )));
        }
        value -= worst.value;
        abs_value -= worst.abs_value;
        error -= worst.error;
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (v, va, e) = gauss_kronrod_21(&f, lo, hi);
            value += v;
            abs_value += va;
            error += e;
            heap.push(Panel {
                lo,
                hi,
                value: v,
                abs_value: va,
                error: e,
            });
        }
        evaluations += 2 * EVALS_PER_PANEL;
        iterations += 1;
        if iterations.is_multiple_of(64) {
            (value, abs_value, error) = sums(&heap);
        }
    }
}
