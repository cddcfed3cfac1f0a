//! Integration of smooth-times-oscillatory integrands over finite intervals.
//!
//! The interval is first cut at the zeros of the oscillator (spacing `pi/r`),
//! each panel is integrated with the 21-point Gauss-Kronrod rule, and panels
//! whose error estimate dominates are bisected until the summed estimate
//! meets `rel_tol * |value| + abs_floor`. Short intervals (less than one full
//! oscillation) start from a single panel. Panel sums are combined in panel
//! order with compensated summation, so the result does not depend on the
//! refinement history.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Real, Result};

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
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
    0.123_491_976_262_065_851_077_208_976_253_279,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_ABS_FLOOR: f64 = 1e-30;
pub const DEFAULT_MAX_PANELS: usize = 1_000_000;

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> NeumaierSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), compensation: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorKind {
    /// `f(k) sin(k r)`
    SineProduct,
    /// `f(k) cos(k r)`
    CosineProduct,
}

/// Tolerance and budget shared by every integral of a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub rel_tol: T,
    pub abs_floor: T,
    pub max_panels: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self { rel_tol: T::lit(DEFAULT_REL_TOL), abs_floor: T::lit(DEFAULT_ABS_FLOOR), max_panels: DEFAULT_MAX_PANELS }
    }
}

impl<T: Real> QuadratureOptions<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.rel_tol <= T::lit(1e-2)) {
            return Err(Error::InvalidQuadrature(format!("rel_tol = {} must lie in (0, 1e-2]", self.rel_tol)));
        }
        if !(self.abs_floor >= T::zero()) {
            return Err(Error::InvalidQuadrature(format!("abs_floor = {} must be non-negative", self.abs_floor)));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidQuadrature("max_panels must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorySpec<T> {
    pub kind: OscillatorKind,
    /// Phase rate `r` of the oscillator.
    pub rate: T,
    pub k_lo: T,
    pub k_hi: T,
    pub options: QuadratureOptions<T>,
}

impl<T: Real> OscillatorySpec<T> {
    pub fn new(kind: OscillatorKind, rate: T, k_lo: T, k_hi: T) -> Self {
        Self { kind, rate, k_lo, k_hi, options: QuadratureOptions::default() }
    }

    pub fn with_options(mut self, options: QuadratureOptions<T>) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_interval(self.k_lo, self.k_hi)?;
        if !(self.rate >= T::zero()) || !self.rate.is_finite() {
            return Err(Error::InvalidQuadrature(format!("rate = {} must be non-negative", self.rate)));
        }
        self.options.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    pub panels_used: usize,
    /// Error estimate minus its roundoff floor met `rel_tol * |value| + abs_floor`.
    pub converged: bool,
}

impl<T: Real> QuadratureResult<T> {
    /// Turns a non-converged result into [`Error::BudgetExhausted`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExhausted {
                value: self.value.as_f64(),
                abs_error: self.abs_error_estimate.as_f64(),
                panels: self.panels_used,
            })
        }
    }

    /// Scales value and estimate by `factor`.
    pub fn scaled(self, factor: T) -> Self {
        Self { value: self.value * factor, abs_error_estimate: self.abs_error_estimate * factor.abs(), ..self }
    }
}

fn check_interval<T: Real>(lo: T, hi: T) -> Result<()> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    // error floor from roundoff, 50 eps * integral of |f|
    roundoff: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    // largest error first; ties broken by position so refinement order is fixed
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// One Gauss-Kronrod 10/21 evaluation on `[a, b]` with QUADPACK error rescaling.
fn gk21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    let f_center = f(center);
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * ratio.min(T::one());
    }
    let roundoff = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(roundoff);
    }
    Panel { a, b, value, error: err, roundoff }
}

/// Global adaptive GK21 integration starting from the given breakpoints.
fn integrate_from_breakpoints<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    breakpoints: &[T],
    options: &QuadratureOptions<T>,
) -> QuadratureResult<T> {
    let mut heap: BinaryHeap<Panel<T>> = BinaryHeap::with_capacity(breakpoints.len());
    let mut value = T::zero();
    let mut error = T::zero();
    let mut roundoff = T::zero();
    for w in breakpoints.windows(2) {
        let p = gk21(&mut f, w[0], w[1]);
        value = value + p.value;
        error = error + p.error;
        roundoff = roundoff + p.roundoff;
        heap.push(p);
    }

    // the roundoff floor cannot be refined away, so only the excess over it
    // has to meet the requested tolerance
    let tolerance = |v: T, floor: T| options.rel_tol * v.abs() + options.abs_floor + floor;
    let mut converged = false;
    loop {
        if error <= tolerance(value, roundoff) {
            // running sums drift; confirm with an exact reduction
            let (v, e, r) = reduce(heap.iter());
            value = v;
            error = e;
            roundoff = r;
            if error <= tolerance(value, roundoff) {
                converged = true;
                break;
            }
        }
        if heap.len() >= options.max_panels || !value.is_finite() || !error.is_finite() {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let resolution = T::lit(4.0) * T::epsilon() * worst.a.abs().max(worst.b.abs());
        if !(mid - worst.a > resolution && worst.b - mid > resolution) {
            // cannot bisect further at this precision
            heap.push(worst);
            break;
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        value = value + (left.value + right.value - worst.value);
        error = error + (left.error + right.error - worst.error);
        roundoff = roundoff + (left.roundoff + right.roundoff - worst.roundoff);
        heap.push(left);
        heap.push(right);
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let (value, error, roundoff) = reduce(panels.iter());
    QuadratureResult {
        value,
        abs_error_estimate: error,
        panels_used: panels.len(),
        converged: converged && error <= tolerance(value, roundoff),
    }
}

fn reduce<'a, T: Real>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, T, T) {
    let mut v = NeumaierSum::new();
    let mut e = NeumaierSum::new();
    let mut r = NeumaierSum::new();
    for p in panels {
        v.add(p.value);
        e.add(p.error);
        r.add(p.roundoff);
    }
    (v.value(), e.value(), r.value())
}

/// Plain adaptive GK21 integration of `f` over `[lo, hi]`.
pub fn integrate_adaptive<T: Real, F: FnMut(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    options: &QuadratureOptions<T>,
) -> Result<QuadratureResult<T>> {
    check_interval(lo, hi)?;
    options.validate()?;
    Ok(integrate_from_breakpoints(f, &[lo, hi], options))
}

/// Integrates `f(k) * sin(k r)` or `f(k) * cos(k r)` over the spec's interval.
///
/// A result that missed the tolerance within `max_panels` is returned with
/// `converged = false`; see [`QuadratureResult::require_converged`].
pub fn integrate_oscillatory<T: Real, F: Fn(T) -> T>(f: F, spec: &OscillatorySpec<T>) -> Result<QuadratureResult<T>> {
    spec.validate()?;
    let r = spec.rate;
    let breakpoints = half_period_breakpoints(spec);
    let result = match spec.kind {
        OscillatorKind::SineProduct => {
            integrate_from_breakpoints(|k: T| f(k) * (k * r).sin(), &breakpoints, &spec.options)
        }
        OscillatorKind::CosineProduct => {
            integrate_from_breakpoints(|k: T| f(k) * (k * r).cos(), &breakpoints, &spec.options)
        }
    };
    Ok(result)
}

/// Interval endpoints plus the oscillator zeros strictly inside, thinned so
/// that at most `max_panels` panels result.
fn half_period_breakpoints<T: Real>(spec: &OscillatorySpec<T>) -> Vec<T> {
    let (lo, hi, r) = (spec.k_lo, spec.k_hi, spec.rate);
    let two_pi = T::lit(2.0) * T::PI();
    if r * (hi - lo) < two_pi || spec.options.max_panels < 2 {
        return vec![lo, hi];
    }
    let half_period = T::PI() / r;
    let offset = match spec.kind {
        OscillatorKind::SineProduct => T::zero(),
        OscillatorKind::CosineProduct => T::lit(0.5),
    };
    // zeros at (m + offset) * pi / r
    let first = (lo / half_period - offset).floor() + T::one();
    let last = (hi / half_period - offset).ceil() - T::one();
    let count = (last - first + T::one()).max(T::zero()).to_usize().unwrap_or(0);
    let stride = count.div_ceil(spec.options.max_panels - 1).max(1);
    let min_gap = T::lit(1e-3) * half_period;

    let mut points = Vec::with_capacity(count / stride + 2);
    points.push(lo);
    let mut m = 0;
    while m < count {
        let zero = (first + T::from_usize(m).unwrap() + offset) * half_period;
        if zero - lo > min_gap && hi - zero > min_gap {
            points.push(zero);
        }
        m += stride;
    }
    points.push(hi);
    points
}

/// Derivative of a sampled profile: three-point central differences inside,
/// second-order one-sided differences at the ends. Handles mild non-uniformity.
pub fn differentiate_profile<T: Real>(samples: &[(T, T)]) -> Result<Vec<(T, T)>> {
    const MIN_SAMPLES: usize = 5;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    if let Some(i) = samples.windows(2).position(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::NonMonotonicAbscissa(i + 1));
    }
    let n = samples.len();
    let x = |i: usize| samples[i].0;
    let y = |i: usize| samples[i].1;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(n);

    // forward slopes over the first two intervals
    let (h1, h2) = (x(1) - x(0), x(2) - x(1));
    let (s1, s2) = ((y(1) - y(0)) / h1, (y(2) - y(1)) / h2);
    out.push((x(0), s1 * (two * h1 + h2) / (h1 + h2) - s2 * h1 / (h1 + h2)));

    for i in 1..n - 1 {
        let (h1, h2) = (x(i) - x(i - 1), x(i + 1) - x(i));
        let d = (h1 * h1 * (y(i + 1) - y(i)) + h2 * h2 * (y(i) - y(i - 1))) / (h1 * h2 * (h1 + h2));
        out.push((x(i), d));
    }

    let (h1, h2) = (x(n - 2) - x(n - 3), x(n - 1) - x(n - 2));
    let (s1, s2) = ((y(n - 2) - y(n - 3)) / h1, (y(n - 1) - y(n - 2)) / h2);
    out.push((x(n - 1), s2 * (two * h2 + h1) / (h1 + h2) - s1 * h2 / (h1 + h2)));
    Ok(out)
}
