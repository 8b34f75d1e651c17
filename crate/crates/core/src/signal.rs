//! Uniformly sampled complex signals and the DSP primitives built on them:
//! continuous-Fourier spectra, brick-wall filtering, AWGN and energy.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex signal sampled at `t0 + k·dt`, `k = 0..n`.
///
/// The same container holds spectra, in which case the axis is frequency in
/// hertz, and LCT outputs, whose axis is the transform-domain variable `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    t0: f64,
    dt: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<Complex64>, t0: f64, dt: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("samples", "signal must hold at least one sample"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("sample spacing must be positive and finite, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::NonFinite("signal origin"));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("signal samples"));
        }
        Ok(SampledSignal { samples, t0, dt })
    }

    /// Samples `f` on `t0 + k·dt` for `k = 0..n`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = (0..n).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::new(samples, t0, dt)
    }

    /// Samples `f` on the grid `(k − n/2)·dt`, which contains `t = 0`.
    pub fn centered(n: usize, dt: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_fn(-((n / 2) as f64) * dt, dt, n, f)
    }

    pub fn zeros(t0: f64, dt: f64, n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], t0, dt)
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<Complex64>, t0: f64, dt: f64) -> Self {
        debug_assert!(!samples.is_empty() && dt > 0.0);
        SampledSignal { samples, t0, dt }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    /// Axis value of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Index of the grid point nearest to `t`, if `t` lies on the grid span.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = ((t - self.t0) / self.dt).round();
        (k >= 0.0 && (k as usize) < self.len()).then_some(k as usize)
    }

    /// Same grid, new sample values.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::param("samples", "length differs from grid"));
        }
        Self::new(samples, self.t0, self.dt)
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let samples = self.samples.iter().enumerate().map(|(k, &z)| f(self.time(k), z)).collect();
        SampledSignal { samples, t0: self.t0, dt: self.dt }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude among the two end samples relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        self.samples[0].norm().max(self.samples[self.len() - 1].norm()) / peak
    }

    /// Largest |t| among samples whose magnitude reaches `rel` of the peak.
    pub fn extent_above(&self, rel: f64) -> f64 {
        let thresh = self.peak() * rel;
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() >= thresh)
            .map(|(k, _)| self.time(k).abs())
            .fold(0.0, f64::max)
    }

    /// Pads with zeros so the grid grows to `factor·n` samples, keeping the
    /// original samples in the middle.
    pub fn zero_pad(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        let n = self.len();
        let extra = (factor - 1) * n;
        let before = extra / 2;
        let mut samples = vec![Complex64::new(0.0, 0.0); n * factor];
        samples[before..before + n].copy_from_slice(&self.samples);
        SampledSignal { samples, t0: self.t0 - before as f64 * self.dt, dt: self.dt }
    }

    /// `sqrt(Σ|x−y|²) / sqrt(Σ|y|²)` for signals of equal length.
    pub fn relative_l2(&self, reference: &SampledSignal) -> f64 {
        relative_l2(&self.samples, &reference.samples)
    }
}

pub fn relative_l2(x: &[Complex64], reference: &[Complex64]) -> f64 {
    assert_eq!(x.len(), reference.len(), "length mismatch");
    let num: f64 = x.iter().zip(reference).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|b| b.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Returns `Σ_n x_n·exp(sign·j2π f_k t_n)` for `f_k = f0 + k·df`,
/// `t_n = t0 + n·dt`, where `n·dt·df = 1`. `sign = -1` is the forward sum.
pub(crate) fn fourier_sum(x: &[Complex64], t0: f64, dt: f64, f0: f64, sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let df = 1.0 / (n as f64 * dt);
    let mut buf: Vec<Complex64> = x
        .iter()
        .enumerate()
        .map(|(m, &z)| z * Complex64::cis(sign * 2.0 * PI * f0 * m as f64 * dt))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = if sign < 0.0 { planner.plan_fft_forward(n) } else { planner.plan_fft_inverse(n) };
    fft.process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let f = f0 + k as f64 * df;
        *z *= Complex64::cis(sign * 2.0 * PI * f * t0);
    }
    buf
}

/// Riemann approximation of the continuous Fourier transform
/// `X(f) = ∫ x(t) e^{−j2πft} dt`, on the centered grid `f_k = (k − n/2)/(n·dt)`.
pub fn dft_spectrum(x: &SampledSignal) -> Result<SampledSignal> {
    let n = x.len();
    if n < 2 {
        return Err(Error::param("x", "spectrum needs at least two samples"));
    }
    let df = 1.0 / (n as f64 * x.dt);
    let f0 = -((n / 2) as f64) * df;
    let mut spec = fourier_sum(&x.samples, x.t0, x.dt, f0, -1.0);
    for z in &mut spec {
        *z *= x.dt;
    }
    Ok(SampledSignal::from_parts_unchecked(spec, f0, df))
}

/// Inverse of [`dft_spectrum`]: `x(t_m) = Σ_k X_k e^{j2πf_k t_m}·df` on the
/// grid `t0 + m/(n·df)`.
pub fn inverse_spectrum(spec: &SampledSignal, t0: f64) -> SampledSignal {
    let n = spec.len();
    let dt = 1.0 / (n as f64 * spec.dt);
    // Roles of time and frequency swap: sum over k of X_k e^{+j2π f_k t_m}.
    let mut x = fourier_sum(&spec.samples, spec.t0, spec.dt, t0, 1.0);
    for z in &mut x {
        *z *= spec.dt;
    }
    SampledSignal::from_parts_unchecked(x, t0, dt)
}

/// Ideal low-pass: zeroes every spectral bin with `|f| > w_cut`.
pub fn brickwall_lowpass(x: &SampledSignal, w_cut: f64) -> Result<SampledSignal> {
    let nyquist = 0.5 / x.dt;
    if !(w_cut > 0.0 && w_cut <= nyquist * (1.0 + 1e-12)) {
        return Err(Error::param("w_cut", format!("cutoff {w_cut} outside (0, {nyquist}]")));
    }
    let mut spec = dft_spectrum(x)?;
    let limit = w_cut * (1.0 + 1e-12);
    let f0 = spec.t0;
    let df = spec.dt;
    for (k, z) in spec.samples.iter_mut().enumerate() {
        if (f0 + k as f64 * df).abs() > limit {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    Ok(inverse_spectrum(&spec, x.t0))
}

/// Additive white Gaussian noise description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Noise scale η in W/Hz; the two-sided PSD is η/2.
    pub eta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(eta: f64, seed: u64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", format!("noise scale must be ≥ 0, got {eta}")));
        }
        Ok(NoiseSpec { eta, seed })
    }

    pub fn silent() -> Self {
        NoiseSpec { eta: 0.0, seed: 0 }
    }
}

/// Adds circular complex Gaussian noise with variance `η·f_s/2` per real
/// dimension, so the real part alone has two-sided PSD `η/2`.
pub fn add_awgn(x: &SampledSignal, noise: &NoiseSpec) -> SampledSignal {
    if noise.eta == 0.0 {
        return x.clone();
    }
    let sigma = (noise.eta * x.sample_rate() / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = x
        .samples
        .iter()
        .map(|&z| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            z + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    SampledSignal { samples, t0: x.t0, dt: x.dt }
}

/// `Σ|x_k|²·dt`.
pub fn measure_energy(x: &SampledSignal) -> f64 {
    x.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * x.dt
}

/// Axis label written in the CSV header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Time,
    Frequency,
    /// The variable of an LCT domain.
    Lct,
}

impl Axis {
    fn header(self) -> &'static str {
        match self {
            Axis::Time => "t,re,im",
            Axis::Frequency => "f,re,im",
            Axis::Lct => "u,re,im",
        }
    }
}

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(x: &SampledSignal, axis: Axis, mut out: W) -> Result<()> {
    writeln!(out, "{}", axis.header())?;
    for (k, z) in x.samples.iter().enumerate() {
        writeln!(out, "{},{},{}", fmt_f64(x.time(k)), fmt_f64(z.re), fmt_f64(z.im))?;
    }
    Ok(())
}

/// Reads a `t,re,im` or `f,re,im` file. The axis must be uniform to within
/// `1e−9·dt`.
pub fn read_csv<R: BufRead>(input: R) -> Result<(SampledSignal, Axis)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty file".into()))??;
    let axis = match header.trim() {
        "t,re,im" => Axis::Time,
        "f,re,im" => Axis::Frequency,
        "u,re,im" => Axis::Lct,
        other => return Err(Error::Format(format!("unexpected header `{other}`"))),
    };
    let mut axis_values = Vec::new();
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!("line {}: expected 3 fields", lineno + 2)));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 2)))
        };
        axis_values.push(parse(fields[0])?);
        samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    if samples.len() < 2 {
        return Err(Error::Format("need at least two samples".into()));
    }
    let n = axis_values.len();
    let t0 = axis_values[0];
    let dt = (axis_values[n - 1] - t0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Format("axis must be increasing".into()));
    }
    for (k, &t) in axis_values.iter().enumerate() {
        if (t - (t0 + k as f64 * dt)).abs() > 1e-9 * dt {
            return Err(Error::Format(format!("non-uniform spacing at row {}", k + 1)));
        }
    }
    Ok((SampledSignal::new(samples, t0, dt)?, axis))
}
