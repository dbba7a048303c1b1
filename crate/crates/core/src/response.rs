//! Frequency-response classification and measurement.

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::RationalTf;
use crate::filter::FilterMode;
use crate::Scalar;

/// Minimum sample count of a [`FrequencyResponse`].
pub const MIN_SAMPLES: usize = 16;

/// Half-width of the "unity" band in dB.
pub const UNITY_BAND_DB: f64 = 1.0;
/// Level a low-/high-pass stopband or notch null must reach, in dB.
pub const STOP_DB: f64 = -30.0;
/// Level a band-pass skirt must reach at the sweep edges, in dB.
pub const SKIRT_DB: f64 = -20.0;
/// Minimum rise of a band-pass peak over its skirts, in dB.
pub const PEAK_RISE_DB: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResponseError {
    #[error("a frequency response needs at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample frequencies must be positive, finite and strictly increasing (index {0})")]
    BadFrequency(usize),
    #[error("unclassifiable response")]
    Unclassifiable,
    #[error("sweep too narrow: {0}")]
    SweepTooNarrow(&'static str),
}

/// Ordered `(ω, H(jω))` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse<T> {
    samples: Vec<(T, Complex<T>)>,
}

impl<T: Scalar> FrequencyResponse<T> {
    pub fn new(samples: Vec<(T, Complex<T>)>) -> Result<Self, ResponseError> {
        if samples.len() < MIN_SAMPLES {
            return Err(ResponseError::TooFewSamples(samples.len()));
        }
        for (i, (w, _)) in samples.iter().enumerate() {
            if !(w.is_finite() && *w > T::zero()) || (i > 0 && samples[i - 1].0 >= *w) {
                return Err(ResponseError::BadFrequency(i));
            }
        }
        Ok(Self { samples })
    }

    /// Samples a closed-form transfer function.
    pub fn from_tf(tf: &RationalTf<T>, omegas: &[T]) -> Result<Self, ResponseError> {
        let samples = omegas
            .iter()
            .map(|&w| (w, tf.evaluate(w).unwrap_or_else(|_| Complex::new(T::infinity(), T::zero()))))
            .collect();
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(T, Complex<T>)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn omegas(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.1.norm()).collect()
    }

    pub fn magnitudes_db(&self) -> Vec<T> {
        self.samples.iter().map(|s| to_db(s.1.norm())).collect()
    }
}

pub fn to_db<T: Scalar>(mag: T) -> T {
    T::lit(20.0) * mag.log10()
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    let last = T::from_usize(count - 1).unwrap();
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                T::lit(10.0).powf(a + (b - a) * T::from_usize(k).unwrap() / last)
            }
        })
        .collect()
}

/// Log grid from `lo` to `hi` with (rounded) `points_per_decade` density.
pub fn decade_grid<T: Scalar>(lo: T, hi: T, points_per_decade: usize) -> Vec<T> {
    let decades = (hi / lo).log10();
    let intervals = (decades * T::from_usize(points_per_decade).unwrap()).round().to_usize().unwrap_or(1).max(1);
    log_space(lo, hi, intervals + 1)
}

/// Grid spanning `decades` decades centered (geometrically) on `center`.
pub fn centered_grid<T: Scalar>(center: T, decades: T, points_per_decade: usize) -> Vec<T> {
    let half = T::lit(10.0).powf(decades / T::lit(2.0));
    decade_grid(center / half, center * half, points_per_decade)
}

/// Measured counterpart of the design parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredParams<T> {
    pub kind: FilterMode,
    /// rad/s
    pub omega0: T,
    pub q: T,
    /// rad/s
    pub bandwidth: T,
    pub dc_gain: T,
    pub hf_gain: T,
    /// Peak magnitude (band-pass, low-/high-pass) or null depth (notch).
    pub peak_or_null_gain: T,
    /// Response order inferred from the total phase swing (1 or 2 for the
    /// circuits here). Only meaningful for low-/high-pass.
    pub order: usize,
}

fn interior_argmax<T: Scalar>(v: &[T]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

fn interior_argmin<T: Scalar>(v: &[T]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] < v[best] { i } else { best })
}

/// Classifies a sweep from its edge levels and interior extremum.
///
/// Notch is tested first, so a response that also looked like a band-pass
/// would be reported as a notch.
pub fn classify<T: Scalar>(resp: &FrequencyResponse<T>) -> Result<FilterMode, ResponseError> {
    let db: Vec<f64> = resp.magnitudes_db().iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let n = db.len();
    let (lo, hi) = (db[0], db[n - 1]);
    let unity = |v: f64| v.abs() <= UNITY_BAND_DB;
    let imin = interior_argmin(&db);
    let imax = interior_argmax(&db);
    let interior = |i: usize| i > 0 && i < n - 1;

    if unity(lo) && unity(hi) && interior(imin) && db[imin] <= STOP_DB {
        return Ok(FilterMode::Notch);
    }
    if unity(lo) && hi <= STOP_DB {
        return Ok(FilterMode::LowPass);
    }
    if lo <= STOP_DB && unity(hi) {
        return Ok(FilterMode::HighPass);
    }
    if lo <= SKIRT_DB && hi <= SKIRT_DB && interior(imax) && db[imax] - lo.max(hi) >= PEAK_RISE_DB {
        return Ok(FilterMode::BandPass);
    }
    Err(ResponseError::Unclassifiable)
}

/// Vertex of the parabola through three points.
fn parabola_vertex<T: Scalar>(x: [T; 3], y: [T; 3]) -> (T, T) {
    let [x0, x1, x2] = x;
    let [y0, y1, y2] = y;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a.is_zero() {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (T::lit(2.0) * a);
    let yv = y1 + (xv - x1) * (b + a * (xv + x1));
    (xv, yv)
}

/// Linear interpolation of `x` where `y` crosses `level` between two samples.
fn cross<T: Scalar>(x0: T, y0: T, x1: T, y1: T, level: T) -> T {
    if y1 == y0 {
        return x0;
    }
    x0 + (x1 - x0) * (level - y0) / (y1 - y0)
}

/// Crossing of `level` between samples `i` and `i + 1`, from the quadratic
/// through those two and the nearer outer neighbour; linear when the
/// quadratic root leaves the bracket.
fn cross3<T: Scalar>(x: &[T], y: &[T], i: usize, level: T) -> T {
    let linear = cross(x[i], y[i], x[i + 1], y[i + 1], level);
    let k = match (i > 0, i + 2 < x.len()) {
        (true, true) => {
            if (x[i + 1] - x[i - 1]) <= (x[i + 2] - x[i]) {
                i - 1
            } else {
                i + 2
            }
        }
        (true, false) => i - 1,
        (false, true) => i + 2,
        (false, false) => return linear,
    };
    // Newton form about x[i]: y = y_i + d1 (t) + a (t)(t - h), t = x - x_i
    let (x0, x1, x2) = (x[i], x[i + 1], x[k]);
    let d1 = (y[i + 1] - y[i]) / (x1 - x0);
    let d2 = (y[k] - y[i + 1]) / (x2 - x1);
    let a = (d2 - d1) / (x2 - x0);
    let h = x1 - x0;
    // a t² + (d1 - a h) t + (y_i - level) = 0
    let b = d1 - a * h;
    let c = y[i] - level;
    if a.abs() * h.abs() <= T::epsilon() * b.abs() {
        return linear;
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return linear;
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let qq = -(b + b.signum() * sq) / T::lit(2.0);
    let roots = [if qq.is_zero() { T::nan() } else { c / qq }, qq / a];
    let (lo, hi) = if h > T::zero() { (T::zero(), h) } else { (h, T::zero()) };
    roots
        .iter()
        .copied()
        .filter(|t| *t >= lo && *t <= hi)
        .min_by(|p, q| (x0 + *p - linear).abs().partial_cmp(&(x0 + *q - linear).abs()).unwrap())
        .map(|t| x0 + t)
        .unwrap_or(linear)
}

/// Value at `u` of the quadratic through samples `i - 1..=i + 1` (shifted
/// inward at the ends).
fn quad_at<T: Scalar>(x: &[T], y: &[T], i: usize, u: T) -> T {
    if x.len() < 3 {
        return y[i];
    }
    let c = i.clamp(1, x.len() - 2);
    let (x0, x1, x2) = (x[c - 1], x[c], x[c + 1]);
    let d01 = (y[c] - y[c - 1]) / (x1 - x0);
    let d12 = (y[c + 1] - y[c]) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    y[c - 1] + d01 * (u - x0) + a * (u - x0) * (u - x1)
}

/// Walks from `start` (forward or backward) until `db` passes `level` in
/// the requested direction and returns the crossing in log ω.
fn find_crossing<T: Scalar>(
    logw: &[T],
    db: &[T],
    start: usize,
    forward: bool,
    above_to_below: bool,
    level: T,
    quadratic: bool,
) -> Option<T> {
    let n = db.len();
    let mut i = start;
    loop {
        let j = if forward {
            if i + 1 >= n {
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        let crossed = if above_to_below { db[i] >= level && db[j] < level } else { db[i] <= level && db[j] > level };
        if crossed {
            let i = i.min(j);
            return Some(if quadratic { cross3(logw, db, i, level) } else { cross(logw[i], db[i], logw[i + 1], db[i + 1], level) });
        }
        i = j;
    }
}

fn unwrap_phase<T: Scalar>(phases: impl Iterator<Item = T>) -> Vec<T> {
    let two_pi = T::TAU();
    let mut out: Vec<T> = Vec::new();
    for p in phases {
        let v = match out.last() {
            None => p,
            Some(&prev) => {
                let mut v = p;
                while v - prev > T::PI() {
                    v = v - two_pi;
                }
                while v - prev < -T::PI() {
                    v = v + two_pi;
                }
                v
            }
        };
        out.push(v);
    }
    out
}

/// Passband magnitude at one end of the sweep, extrapolated from
/// |H|² ≈ A + B·ω^(±2) through the edge sample and the one an octave in.
/// Falls back to the edge sample when the edge is not yet in that regime.
fn asymptote<T: Scalar>(w: &[T], mags: &[T], low_end: bool) -> T {
    let n = w.len();
    let (a, edge) = if low_end { (0, w[0]) } else { (n - 1, w[n - 1]) };
    let two = T::lit(2.0);
    let b = if low_end {
        w.iter().position(|&x| x >= edge * two).unwrap_or(n - 1)
    } else {
        w.iter().rposition(|&x| x <= edge / two).unwrap_or(0)
    };
    if a == b {
        return mags[a];
    }
    // t = ω² at the low end, ω⁻² at the high end
    let t = |x: T| if low_end { x * x } else { (x * x).recip() };
    let (ta, tb) = (t(w[a]), t(w[b]));
    let (ga, gb) = (mags[a] * mags[a], mags[b] * mags[b]);
    let g = (ga * tb - gb * ta) / (tb - ta);
    if !(g > T::zero()) || ((g - ga) / ga).abs() > T::lit(1e-2) {
        return mags[a];
    }
    g.sqrt()
}

/// Measures ω₀, Q and bandwidth of a classified sweep.
///
/// * Band-pass: ω₀ at the peak (parabolic refinement of log|H| over log ω),
///   bandwidth between the −3 dB points.
/// * Notch: ω₀ at the null (parabolic refinement of |H|² over ω), bandwidth
///   between the points 3 dB below the low-frequency gain.
/// * Low-/high-pass: ω₀ where the phase, relative to the passband asymptote,
///   has swung halfway (−90° for a biquad low-pass); Q is the normalized
///   magnitude there, which equals Q exactly for a second-order section.
pub fn measure<T: Scalar>(resp: &FrequencyResponse<T>, kind: FilterMode) -> Result<MeasuredParams<T>, ResponseError> {
    let w = resp.omegas();
    let mags = resp.magnitudes();
    let db = resp.magnitudes_db();
    let logw: Vec<T> = w.iter().map(|x| x.ln()).collect();
    let n = w.len();
    let three_db = T::lit(10.0) * T::lit(2.0).log10();
    let (dc_gain, hf_gain) = (mags[0], mags[n - 1]);

    let mut out = MeasuredParams {
        kind,
        omega0: T::nan(),
        q: T::nan(),
        bandwidth: T::nan(),
        dc_gain,
        hf_gain,
        peak_or_null_gain: T::nan(),
        order: 2,
    };

    match kind {
        FilterMode::BandPass => {
            let k = interior_argmax(&db);
            if k == 0 || k == n - 1 {
                return Err(ResponseError::SweepTooNarrow("band-pass peak at sweep edge"));
            }
            let lm: Vec<T> = mags.iter().map(|m| m.ln()).collect();
            let (u, v) = parabola_vertex([logw[k - 1], logw[k], logw[k + 1]], [lm[k - 1], lm[k], lm[k + 1]]);
            let peak_db = to_db(v.exp());
            let level = peak_db - three_db;
            let lo = find_crossing(&logw, &db, k, false, true, level, false)
                .ok_or(ResponseError::SweepTooNarrow("lower -3 dB point outside sweep"))?;
            let hi = find_crossing(&logw, &db, k, true, true, level, false)
                .ok_or(ResponseError::SweepTooNarrow("upper -3 dB point outside sweep"))?;
            out.omega0 = u.exp();
            out.bandwidth = hi.exp() - lo.exp();
            out.peak_or_null_gain = v.exp();
        }
        FilterMode::Notch => {
            let k = interior_argmin(&db);
            if k == 0 || k == n - 1 {
                return Err(ResponseError::SweepTooNarrow("notch null at sweep edge"));
            }
            let sq: Vec<T> = mags.iter().map(|m| *m * *m).collect();
            let (u, _) = parabola_vertex([w[k - 1], w[k], w[k + 1]], [sq[k - 1], sq[k], sq[k + 1]]);
            let level = to_db(asymptote(&w, &mags, true)) - three_db;
            let lo = find_crossing(&logw, &db, k, false, false, level, true)
                .ok_or(ResponseError::SweepTooNarrow("lower -3 dB point outside sweep"))?;
            let hi = find_crossing(&logw, &db, k, true, false, level, true)
                .ok_or(ResponseError::SweepTooNarrow("upper -3 dB point outside sweep"))?;
            out.omega0 = if u > w[k - 1] && u < w[k + 1] { u } else { w[k] };
            out.bandwidth = hi.exp() - lo.exp();
            out.peak_or_null_gain = mags[k];
        }
        FilterMode::LowPass | FilterMode::HighPass => {
            let low_pass = kind == FilterMode::LowPass;
            let edge = if low_pass { resp.samples()[0].1 } else { resp.samples()[n - 1].1 };
            if edge.norm().is_zero() {
                return Err(ResponseError::SweepTooNarrow("no passband asymptote"));
            }
            // a real transfer function's asymptote has phase 0 or π; the edge
            // sample's residual phase belongs to the roll-off and is kept
            let level = asymptote(&w, &mags, low_pass);
            let asym = if edge.re >= T::zero() { Complex::new(level, T::zero()) } else { Complex::new(-level, T::zero()) };
            let normalized: Vec<Complex<T>> = resp.samples().iter().map(|s| s.1 / asym).collect();
            // unwrap from the passband end so the asymptote sits at 0
            let mut phase: Vec<T> = if low_pass {
                unwrap_phase(normalized.iter().map(|h| h.arg()))
            } else {
                let mut p = unwrap_phase(normalized.iter().rev().map(|h| h.arg()));
                p.reverse();
                p
            };
            let far = if low_pass { phase[n - 1] } else { phase[0] };
            let quarter = T::FRAC_PI_2();
            let order = (far.abs() / quarter).round().to_usize().unwrap_or(0).max(1);
            let target = far.signum() * quarter * T::from_usize(order).unwrap() / T::lit(2.0);
            phase.iter_mut().for_each(|p| *p = *p - target);

            let norm_db: Vec<T> = normalized.iter().map(|h| to_db(h.norm())).collect();
            let knee = if low_pass {
                find_crossing(&logw, &norm_db, 0, true, true, -three_db, false)
            } else {
                find_crossing(&logw, &norm_db, n - 1, false, true, -three_db, false)
            };
            let center = knee.unwrap_or((logw[0] + logw[n - 1]) / T::lit(2.0));
            let crossing = (0..n - 1)
                .filter(|&i| (phase[i] <= T::zero()) != (phase[i + 1] <= T::zero()))
                .map(|i| (i, cross3(&logw, &phase, i, T::zero())))
                .min_by(|a, b| (a.1 - center).abs().partial_cmp(&(b.1 - center).abs()).unwrap());
            let (i, u) = crossing.ok_or(ResponseError::SweepTooNarrow("phase never reaches its midpoint"))?;
            // log|H| quadratic in log ω through the bracket and a neighbour
            let ln_mag: Vec<T> = normalized.iter().map(|h| h.norm().ln()).collect();
            let q = quad_at(&logw, &ln_mag, i, u).exp();
            out.omega0 = u.exp();
            out.q = q;
            out.bandwidth = out.omega0 / q;
            out.order = order;
            out.peak_or_null_gain = mags.iter().fold(T::zero(), |m, &x| m.max(x));
            return Ok(out);
        }
    }
    out.q = out.omega0 / out.bandwidth;
    if !(out.q > T::zero()) {
        return Err(ResponseError::SweepTooNarrow("degenerate bandwidth"));
    }
    Ok(out)
}
