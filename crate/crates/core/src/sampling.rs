//! Sampling and reconstruction of LCT-bandlimited signals.
//!
//! A signal whose LCT under `M' = [a', b'; c', d']` vanishes outside
//! `|u| ≤ 2π·W_M` becomes conventionally bandlimited to `W_M/|b'|` Hz once
//! multiplied by `exp(j·a'·t²/(2b'))`. Reconstruction demodulates the
//! samples, interpolates with a windowed sinc, and remodulates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::lct_domain_scale;
use crate::error::{Error, Result};
use crate::matrix::{LctMatrix, MatrixSpec};
use crate::signal::{relative_l2, sinc, SampledSignal};
use crate::transform::{lct_inverse_at, B_ZERO_THRESHOLD};

/// Interpolation kernel half-length in sample periods.
pub const KERNEL_LOBES: usize = 64;
/// Upper limit on the Kaiser shape parameter (about 300 dB stopband).
pub const MAX_KAISER_BETA: f64 = 32.0;

/// `2·W_M/(A sin α + B cos α)` samples/s.
pub fn min_sampling_rate(w_m: f64, a: f64, b: f64, alpha: f64) -> Result<f64> {
    if !(w_m.is_finite() && w_m > 0.0) {
        return Err(Error::param("w_m", format!("must be finite and > 0, got {w_m}")));
    }
    let s = lct_domain_scale(a, b, alpha);
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("alpha", format!("A·sin α + B·cos α must be > 0, got {s}")));
    }
    Ok(2.0 * w_m / s)
}

/// `M·F_α`: the domain reached by an FRFT of angle `α` followed by `M`.
/// Its `b` entry is `A sin α + B cos α`.
pub fn composite_matrix(m: &LctMatrix, alpha: f64) -> Result<LctMatrix> {
    m.compose(&LctMatrix::frft(alpha)?)
}

/// What to do when the samples are too sparse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    #[default]
    Strict,
    /// Reconstruct anyway; the error then measures aliasing.
    Force,
}

/// Modified Bessel function of the first kind, order zero.
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn kaiser(x: f64, beta: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    bessel_i0(beta * (1.0 - x * x).sqrt()) / bessel_i0(beta)
}

/// Kaiser shape parameter whose transition band fits in `transition`,
/// given as a fraction of the sample rate.
pub fn kaiser_beta(transition: f64) -> f64 {
    let atten = 7.95 + 14.36 * transition * (2 * KERNEL_LOBES) as f64;
    let beta = if atten > 50.0 {
        0.1102 * (atten - 8.7)
    } else if atten > 21.0 {
        0.5842 * (atten - 21.0).powf(0.4) + 0.07886 * (atten - 21.0)
    } else {
        0.0
    };
    beta.min(MAX_KAISER_BETA)
}

/// Windowed-sinc interpolation of uniformly spaced samples at `times`.
/// The kernel has cutoff at half the sample rate, spans [`KERNEL_LOBES`]
/// samples each side and uses a Kaiser window of shape `beta`.
pub fn sinc_interpolate(samples: &SampledSignal, times: &[f64], beta: f64) -> Vec<Complex64> {
    let rate = samples.sample_rate();
    let n = samples.len() as i64;
    let half = KERNEL_LOBES as i64;
    times
        .par_iter()
        .map(|&t| {
            let pos = (t - samples.t0()) * rate;
            let center = pos.round() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (center - half).max(0)..=(center + half).min(n - 1) {
                let d = pos - k as f64;
                acc += samples.samples()[k as usize] * (sinc(d) * kaiser(d / half as f64, beta));
            }
            acc
        })
        .collect()
}

fn demodulation_chirp(m: &LctMatrix, t: f64) -> Complex64 {
    Complex64::cis(m.a() * t * t / (2.0 * m.b()))
}

/// Multiplies the samples by `exp(j·a·t²/(2b))`, turning an LCT-bandlimited
/// sequence into a conventionally bandlimited one.
pub fn demodulate(samples: &SampledSignal, m: &LctMatrix) -> Result<SampledSignal> {
    if m.b().abs() <= B_ZERO_THRESHOLD {
        return Err(Error::param("m", "demodulation needs b ≠ 0"));
    }
    Ok(samples.map(|t, z| z * demodulation_chirp(m, t)))
}

/// Reconstructs a signal bandlimited to `|u| ≤ 2π·w_m` in the domain of `m`
/// from uniform samples, evaluating it on `dense`.
///
/// In strict mode a sample rate below `2·w_m/|b|` is refused.
pub fn reconstruct_from_samples(
    samples: &SampledSignal,
    m: &LctMatrix,
    w_m: f64,
    dense: &[f64],
    mode: SamplingMode,
) -> Result<Vec<Complex64>> {
    if m.b().abs() <= B_ZERO_THRESHOLD {
        return Err(Error::param("m", "reconstruction needs b ≠ 0"));
    }
    if !(w_m.is_finite() && w_m > 0.0) {
        return Err(Error::param("w_m", format!("must be finite and > 0, got {w_m}")));
    }
    let min_rate = 2.0 * w_m / m.b().abs();
    let rate = samples.sample_rate();
    if rate < min_rate && mode == SamplingMode::Strict {
        return Err(Error::Undersampled { rate, min_rate });
    }
    // Cutoff sits midway between the band edge and its first alias, so the
    // transition band is whatever the rate leaves beyond twice the band.
    let beta = kaiser_beta((1.0 - min_rate / rate).max(0.0));
    let base = demodulate(samples, m)?;
    let smooth = sinc_interpolate(&base, dense, beta);
    Ok(dense.iter().zip(smooth).map(|(&t, z)| z * demodulation_chirp(m, t).conj()).collect())
}

/// Test signal of the sampling demo: the inverse LCT under `m` of the
/// rectangle `|u| ≤ 2π·w_m`, sampled on `n_u` points across it.
pub fn rect_spectrum(w_m: f64, n_u: usize) -> Result<SampledSignal> {
    let du = 4.0 * PI * w_m / n_u as f64;
    SampledSignal::new(vec![Complex64::new(1.0, 0.0); n_u], -2.0 * PI * w_m + 0.5 * du, du)
}

/// Error of one reconstruction in a [`RateSweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub rate_multiplier: f64,
    pub rate: f64,
    pub reconstruction_error: f64,
}

/// Reconstruction error against sampling rate for the inverse LCT of the
/// rectangle `|u| ≤ 2π·w_m` in the domain `matrix·F_alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSweep {
    pub matrix: MatrixSpec,
    #[serde(default)]
    pub alpha: f64,
    pub w_m: f64,
    /// Rates as multiples of the minimum rate.
    pub multipliers: Vec<f64>,
    /// Points across the rectangle.
    #[serde(default = "default_spectrum_points")]
    pub spectrum_points: usize,
    /// Duration covered by the samples, centered on zero.
    #[serde(default = "default_sample_span")]
    pub sample_span: f64,
    /// Errors are measured on `[−h, h]`.
    #[serde(default = "default_eval_half_width")]
    pub eval_half_width: f64,
    #[serde(default = "default_eval_step")]
    pub eval_step: f64,
}

fn default_spectrum_points() -> usize {
    2048
}
fn default_sample_span() -> f64 {
    240.0
}
fn default_eval_half_width() -> f64 {
    20.0
}
fn default_eval_step() -> f64 {
    0.05
}

struct Prepared {
    domain: LctMatrix,
    spectrum: SampledSignal,
    dense: Vec<f64>,
    truth: Vec<Complex64>,
    min_rate: f64,
}

impl RateSweep {
    pub fn new(matrix: impl Into<MatrixSpec>, alpha: f64, w_m: f64, multipliers: Vec<f64>) -> Self {
        RateSweep {
            matrix: matrix.into(),
            alpha,
            w_m,
            multipliers,
            spectrum_points: default_spectrum_points(),
            sample_span: default_sample_span(),
            eval_half_width: default_eval_half_width(),
            eval_step: default_eval_step(),
        }
    }

    /// `matrix·F_alpha`, where the test signal is bandlimited.
    pub fn domain(&self) -> Result<LctMatrix> {
        composite_matrix(&self.matrix.resolve()?, self.alpha)
    }

    pub fn min_rate(&self) -> Result<f64> {
        let m = self.matrix.resolve()?;
        min_sampling_rate(self.w_m, m.a(), m.b(), self.alpha)
    }

    fn prepare(&self) -> Result<Prepared> {
        let min_rate = self.min_rate()?;
        let domain = self.domain()?;
        if self.spectrum_points < 2 {
            return Err(Error::param("spectrum_points", "need at least 2"));
        }
        for (name, v) in [
            ("sample_span", self.sample_span),
            ("eval_half_width", self.eval_half_width),
            ("eval_step", self.eval_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.eval_half_width >= self.sample_span / 2.0 {
            return Err(Error::param("eval_half_width", "must lie inside the sampled span"));
        }
        let spectrum = rect_spectrum(self.w_m, self.spectrum_points)?;
        // The discretized spectrum makes the signal periodic in t.
        let period = 2.0 * PI * domain.b().abs() / spectrum.dt();
        if self.sample_span >= period / 2.0 {
            return Err(Error::param("sample_span", format!("must stay below half the period {period}")));
        }
        let steps = (self.eval_half_width / self.eval_step).floor() as i64;
        let dense: Vec<f64> = (-steps..=steps).map(|k| k as f64 * self.eval_step).collect();
        let truth = lct_inverse_at(&spectrum, &domain, &dense)?;
        Ok(Prepared { domain, spectrum, dense, truth, min_rate })
    }

    fn error_with(&self, p: &Prepared, multiplier: f64, mode: SamplingMode) -> Result<RatePoint> {
        if !(multiplier.is_finite() && multiplier > 0.0) {
            return Err(Error::param("multipliers", format!("must be finite and > 0, got {multiplier}")));
        }
        let rate = multiplier * p.min_rate;
        let n = (self.sample_span * rate).round() as usize;
        let t0 = -((n / 2) as f64) / rate;
        let times: Vec<f64> = (0..n).map(|k| t0 + k as f64 / rate).collect();
        let samples = SampledSignal::new(lct_inverse_at(&p.spectrum, &p.domain, &times)?, t0, 1.0 / rate)?;
        let rec = reconstruct_from_samples(&samples, &p.domain, self.w_m, &p.dense, mode)?;
        Ok(RatePoint { rate_multiplier: multiplier, rate, reconstruction_error: relative_l2(&rec, &p.truth) })
    }

    /// Relative L2 reconstruction error at `multiplier` times the minimum rate.
    pub fn error_at(&self, multiplier: f64, mode: SamplingMode) -> Result<f64> {
        Ok(self.error_with(&self.prepare()?, multiplier, mode)?.reconstruction_error)
    }

    /// Runs every multiplier in force mode, so rates below the minimum
    /// report their aliasing error.
    pub fn run(&self) -> Result<Vec<RatePoint>> {
        let p = self.prepare()?;
        self.multipliers.iter().map(|&k| self.error_with(&p, k, SamplingMode::Force)).collect()
    }
}
