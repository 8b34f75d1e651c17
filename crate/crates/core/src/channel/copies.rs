//! Copy structure of the conventional spectrum of an LCT-transformed
//! codeword built from an LCT-bandlimited pulse.
//!
//! With `M = M_cft·M̃`, the conventional spectrum of `L_M̃ s` is `L_M s`,
//! and each delayed pulse `φ(t − τ)` lands as a copy of `L_M φ` centered at
//! `u = A·τ`. All extents here are in the native (angular) LCT variable.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::codeword::{symbol_count, synthesize_codeword_from, CodewordBlock, Pulse};
use crate::error::{Error, Result};
use crate::matrix::LctMatrix;
use crate::signal::{dft_spectrum, SampledSignal};
use crate::transform::{lct_forward, lct_inverse_on, B_ZERO_THRESHOLD};

/// Fraction of energy that defines an effective extent.
const SUPPORT_FRACTION: f64 = 0.99;
/// Peaks below this fraction of the strongest one are not copies.
const PEAK_THRESHOLD: f64 = 0.1;

/// Findings of [`spectrum_copy_analysis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyReport {
    pub n_symbols: usize,
    /// LCT-domain support of the pulse under `M`.
    pub w_m: f64,
    /// `4·W·W_M`; copies separate when `A` reaches it.
    pub a_bound: f64,
    pub separable: bool,
    pub copy_count: usize,
    /// Peak positions of the smoothed spectral envelope.
    pub peak_positions: Vec<f64>,
    /// Energy centroid of each symbol's copy.
    pub copy_centers: Vec<f64>,
    /// Full 99%-energy width of each symbol's copy about its center.
    pub copy_bandwidths: Vec<f64>,
    /// Largest ratio of foreign energy inside a copy's band `center ± W_M`
    /// to that copy's own energy.
    pub leakage: f64,
    /// One-sided 99%-energy extent of the whole spectrum.
    pub occupied_band: f64,
    /// `(2N − 1)·W_M`.
    pub expected_band: f64,
}

/// Distinct, nonzero marker amplitudes `(−1)^m·(1 − m/10)`.
pub fn marker_symbols(n: usize) -> Vec<f64> {
    (0..n).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 } * (1.0 - 0.1 * m as f64)).collect()
}

/// A pulse whose LCT under `m` is the Hann bump `cos²(πu/(2·w_nom))` on
/// `|u| ≤ w_nom`, sampled on `n` points of spacing `dt` centered on zero.
pub fn lct_bandlimited_pulse(m: &LctMatrix, w_nom: f64, n: usize, dt: f64) -> Result<SampledSignal> {
    if m.b().abs() <= B_ZERO_THRESHOLD {
        return Err(Error::param("m", "pulse construction needs b ≠ 0"));
    }
    if !(w_nom.is_finite() && w_nom > 0.0) {
        return Err(Error::param("w_nom", format!("must be finite and > 0, got {w_nom}")));
    }
    let du = 2.0 * PI * m.b().abs() / (n as f64 * dt);
    let bump = SampledSignal::centered(n, du, |u| {
        if u.abs() <= w_nom {
            Complex64::new((PI * u / (2.0 * w_nom)).cos().powi(2), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    lct_inverse_on(&bump, m, -((n / 2) as f64) * dt)
}

/// `|L_M s|²` sampled on the angular axis, via the conventional spectrum of
/// `L_M̃ s`.
fn copy_spectrum(s: &SampledSignal, m_tilde: &LctMatrix) -> Result<(Vec<f64>, f64, f64)> {
    let y = lct_forward(s, m_tilde)?;
    let spec = dft_spectrum(&y)?;
    let energy = spec.samples().iter().map(|z| z.norm_sqr()).collect();
    Ok((energy, 2.0 * PI * spec.t0(), 2.0 * PI * spec.dt()))
}

/// Smallest `w` with at least `fraction` of `e` inside `|x − center| ≤ w`.
fn extent_about(e: &[f64], x0: f64, dx: f64, center: f64, fraction: f64) -> f64 {
    let mut cells: Vec<(f64, f64)> =
        e.iter().enumerate().map(|(k, &v)| ((x0 + k as f64 * dx - center).abs(), v)).collect();
    cells.sort_by(|p, q| p.0.total_cmp(&q.0));
    let target = fraction * e.iter().sum::<f64>();
    let mut acc = 0.0;
    for (d, v) in cells {
        acc += v;
        if acc >= target {
            return d;
        }
    }
    0.0
}

fn moving_average(e: &[f64], half: usize) -> Vec<f64> {
    let mut prefix = vec![0.0; e.len() + 1];
    for (k, v) in e.iter().enumerate() {
        prefix[k + 1] = prefix[k] + v;
    }
    (0..e.len())
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half + 1).min(e.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Synthesizes the codeword `Σ x_m·φ(t − m/(2W))`, `m = 0..N−1`, with marker
/// symbols, and inspects the conventional spectrum of its `M̃`-transform
/// for `N` separated copies of `L_M φ`.
///
/// The pulse must sit on a grid whose spacing divides `1/(2W)`. Overlapping
/// copies are a finding, reported through `leakage` and `copy_count`.
pub fn spectrum_copy_analysis(pulse: &SampledSignal, m: &LctMatrix, w: f64, t_block: f64) -> Result<CopyReport> {
    let n = symbol_count(w, t_block)?;
    if m.a() == 0.0 {
        return Err(Error::param("m", "copy analysis needs a ≠ 0"));
    }
    let pulse_spectrum = lct_forward(pulse, m)?;
    let pe: Vec<f64> = pulse_spectrum.samples().iter().map(|z| z.norm_sqr()).collect();
    if pe.iter().sum::<f64>() == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let w_m = extent_about(&pe, pulse_spectrum.t0(), pulse_spectrum.dt(), 0.0, SUPPORT_FRACTION);
    let a_bound = 4.0 * w * w_m;
    let m_tilde = LctMatrix::cft().inverse().compose(m)?;
    let grid = crate::transform::Grid::of(pulse);
    let shape = Pulse::Custom(pulse.clone());

    let markers = marker_symbols(n);
    let block = CodewordBlock::new(markers.clone(), w, t_block, 1.0)?;
    let (total, x0, dx) = copy_spectrum(&synthesize_codeword_from(&block, &shape, grid, 0)?, &m_tilde)?;

    let mut copy_centers = Vec::with_capacity(n);
    let mut copy_bandwidths = Vec::with_capacity(n);
    let mut leakage: f64 = 0.0;
    for (i, &x) in markers.iter().enumerate() {
        let mut single = vec![0.0; n];
        single[i] = x;
        let block = CodewordBlock::new(single, w, t_block, 1.0)?;
        let s = synthesize_codeword_from(&block, &shape, grid, 0)?;
        let y = lct_forward(&s, &m_tilde)?;
        let spec = dft_spectrum(&y)?;
        let own: Vec<f64> = spec.samples().iter().map(|z| z.norm_sqr()).collect();
        let own_energy: f64 = own.iter().sum();
        let center = own.iter().enumerate().map(|(k, v)| (x0 + k as f64 * dx) * v).sum::<f64>() / own_energy;
        copy_centers.push(center);
        copy_bandwidths.push(2.0 * extent_about(&own, x0, dx, center, SUPPORT_FRACTION));
        // Foreign energy: |Y − Y_m|² inside the copy's band.
        let (full, _, _) = copy_spectrum(&synthesize_codeword_from(
            &CodewordBlock::new(
                markers.iter().enumerate().map(|(j, &v)| if j == i { 0.0 } else { v }).collect(),
                w,
                t_block,
                1.0,
            )?,
            &shape,
            grid,
            0,
        )?, &m_tilde)?;
        let foreign: f64 = full
            .iter()
            .enumerate()
            .filter(|(k, _)| (x0 + *k as f64 * dx - center).abs() <= w_m)
            .map(|(_, v)| v)
            .sum();
        leakage = leakage.max(foreign / own_energy);
    }

    let half = ((w_m / 4.0) / dx).round() as usize;
    let envelope = moving_average(&total, half);
    let peak = envelope.iter().cloned().fold(0.0, f64::max);
    let mut peak_positions = Vec::new();
    for k in 1..envelope.len().saturating_sub(1) {
        let v = envelope[k];
        if v > envelope[k - 1] && v >= envelope[k + 1] && v >= PEAK_THRESHOLD * peak {
            peak_positions.push(x0 + k as f64 * dx);
        }
    }

    Ok(CopyReport {
        n_symbols: n,
        w_m,
        a_bound,
        separable: m.a() >= a_bound,
        copy_count: peak_positions.len(),
        peak_positions,
        copy_centers,
        copy_bandwidths,
        leakage,
        occupied_band: extent_about(&total, x0, dx, 0.0, SUPPORT_FRACTION),
        expected_band: (2 * n - 1) as f64 * w_m,
    })
}
