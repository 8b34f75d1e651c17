use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::codeword::{synthesize_codeword, CodewordBlock, Pulse, MIN_SAMPLES_PER_SYMBOL};
use crate::error::{Error, Result};
use crate::matrix::LctMatrix;
use crate::signal::{add_awgn, brickwall_lowpass, NoiseSpec};
use crate::transform::{lct_forward, lct_inverse_on, Grid, B_ZERO_THRESHOLD};

/// Guard on each side, in block lengths, for matrices that only rescale.
pub const SCALING_GUARD: f64 = 1.0;
/// Guard for matrices with a chirp; the chirped pulse spreads further.
pub const CHIRP_GUARD: f64 = 4.0;
/// Relative widening of the default channel filter for chirped matrices.
pub const CHIRP_CHANNEL_MARGIN: f64 = 0.05;

/// Pulse family used by the pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Sinc,
    #[default]
    PeriodicSinc,
}

/// Grid controls for the pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub pulse: PulseKind,
    /// Guard per side in units of `T`; `None` picks a default from the matrix.
    pub guard_factor: Option<f64>,
    /// Multiplies the minimum sampling rate.
    pub grid_oversample: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { pulse: PulseKind::PeriodicSinc, guard_factor: None, grid_oversample: 1.0 }
    }
}

fn is_chirped(m: &LctMatrix) -> bool {
    m.b().abs() > B_ZERO_THRESHOLD
}

pub fn default_guard_factor(m: &LctMatrix) -> f64 {
    if is_chirped(m) {
        CHIRP_GUARD
    } else {
        SCALING_GUARD
    }
}

/// Conventional bandwidth `W·|d|` of the transformed signal for matrices
/// with `c = 0`; `None` otherwise.
pub fn nominal_channel_bandwidth(w: f64, m: &LctMatrix) -> Option<f64> {
    (m.c() == 0.0).then(|| w * m.d().abs())
}

/// Nominal bandwidth, widened for chirped matrices.
pub fn default_channel_bandwidth(w: f64, m: &LctMatrix) -> Option<f64> {
    let margin = if is_chirped(m) { 1.0 + CHIRP_CHANNEL_MARGIN } else { 1.0 };
    nominal_channel_bandwidth(w, m).map(|x| x * margin)
}

/// Time grid of a pipeline run and the sample index of every symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineGrid {
    pub grid: Grid,
    pub samples_per_symbol: usize,
    pub symbol_index: Vec<usize>,
}

/// Lays out `[−G, T + G]` so that symbol instants fall on samples, the span
/// holds an even number of symbol intervals, and the input chirp of `m` is
/// resolved over the whole span.
pub fn pipeline_grid(w: f64, n_symbols: usize, m: &LctMatrix, opts: &PipelineOptions) -> Result<PipelineGrid> {
    let guard = opts.guard_factor.unwrap_or_else(|| default_guard_factor(m));
    if !(guard.is_finite() && guard >= 0.0) {
        return Err(Error::param("guard_factor", format!("must be finite and ≥ 0, got {guard}")));
    }
    if !(opts.grid_oversample.is_finite() && opts.grid_oversample >= 1.0) {
        return Err(Error::param("grid_oversample", format!("must be ≥ 1, got {}", opts.grid_oversample)));
    }
    let left = (guard * n_symbols as f64).ceil() as usize;
    let mut right = left.max(1);
    if (left + n_symbols + right) % 2 == 1 {
        right += 1;
    }
    let intervals = left + n_symbols + right;
    let t_max = left.max(n_symbols + right) as f64 / (2.0 * w);
    let chirp = if is_chirped(m) { m.a().abs() * t_max / (2.0 * PI * m.b().abs()) } else { 0.0 };
    let fs = (2.0 * (chirp + w)).max(2.0 * w * MIN_SAMPLES_PER_SYMBOL) * opts.grid_oversample;
    let sps = (fs / (2.0 * w)).ceil() as usize;
    let step = 1.0 / (2.0 * w * sps as f64);
    let grid = Grid { start: -(left as f64) / (2.0 * w), step, len: intervals * sps };
    let symbol_index = (1..=n_symbols).map(|k| (left + k) * sps).collect();
    Ok(PipelineGrid { grid, samples_per_symbol: sps, symbol_index })
}

/// Encode, transform, add noise, filter to `w_chan`, invert and sample at
/// `m/(2W)`. Returns the real parts of the recovered symbols.
pub fn run_pipeline(
    block: &CodewordBlock,
    m_tilde: &LctMatrix,
    noise: &NoiseSpec,
    w_chan: f64,
    opts: &PipelineOptions,
) -> Result<Vec<f64>> {
    let layout = pipeline_grid(block.w(), block.len(), m_tilde, opts)?;
    let pulse = match opts.pulse {
        PulseKind::Sinc => Pulse::Sinc,
        PulseKind::PeriodicSinc => Pulse::PeriodicSinc,
    };
    let s = synthesize_codeword(block, &pulse, layout.grid)?;
    let channel = lct_forward(&s, m_tilde)?;
    let nyquist = 0.5 / channel.dt();
    if !(w_chan > 0.0) || w_chan > nyquist {
        return Err(Error::GridTooCoarse(format!(
            "channel bandwidth {w_chan} must lie in (0, {nyquist}] for the transformed grid"
        )));
    }
    let received = brickwall_lowpass(&add_awgn(&channel, noise), w_chan)?;
    let back = lct_inverse_on(&received, m_tilde, s.t0())?;
    Ok(layout.symbol_index.iter().map(|&k| back.samples()[k].re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rms_error(x: &[f64], y: &[f64]) -> f64 {
        let e: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let s: f64 = x.iter().map(|a| a * a).sum();
        (e / s).sqrt()
    }

    fn noiseless(m: LctMatrix, w_chan: Option<f64>) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let block = CodewordBlock::random(1.0, 8.0, 1.0, 1.0, Default::default(), &mut rng).unwrap();
        let w_chan = w_chan.unwrap_or_else(|| default_channel_bandwidth(1.0, &m).unwrap());
        let out = run_pipeline(&block, &m, &NoiseSpec::silent(), w_chan, &PipelineOptions::default()).unwrap();
        rms_error(block.symbols(), &out)
    }

    #[test]
    fn classical_channel_is_transparent() {
        assert!(noiseless(LctMatrix::theorem1(1.0, 0.0).unwrap(), Some(1.0)) < 1e-3);
    }

    #[test]
    fn scaled_channels_are_transparent() {
        for b in [0.5, 2.0] {
            assert!(noiseless(LctMatrix::theorem1(b, 0.0).unwrap(), None) < 1e-3, "{b}");
        }
    }

    #[test]
    fn chirped_channels_are_transparent() {
        let e = noiseless(LctMatrix::theorem2(2.0, 0.3).unwrap(), None);
        assert!(e < 1e-3, "{e}");
        let e = noiseless(LctMatrix::theorem1(2.0, 0.5).unwrap(), None);
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn grid_layout() {
        let m = LctMatrix::identity();
        let g = pipeline_grid(1.0, 16, &m, &PipelineOptions::default()).unwrap();
        assert_eq!(g.samples_per_symbol, 8);
        assert_eq!(g.grid.len % (2 * g.samples_per_symbol), 0);
        assert!((g.grid.point(g.symbol_index[0]) - 0.5).abs() < 1e-12);
        assert!((g.grid.point(g.symbol_index[15]) - 8.0).abs() < 1e-12);
        assert!((g.grid.start + 8.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_channel_is_refused() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let block = CodewordBlock::random(1.0, 8.0, 1.0, 1.0, Default::default(), &mut rng).unwrap();
        let m = LctMatrix::identity();
        let r = run_pipeline(&block, &m, &NoiseSpec::silent(), 1e3, &PipelineOptions::default());
        assert!(matches!(r, Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn in_band_noise_reaches_symbols() {
        // Real part of complex noise with PSD η filtered to W carries η·W.
        let m = LctMatrix::theorem1(0.5, 0.0).unwrap();
        let block = CodewordBlock::zeros(1.0, 8.0, 1.0).unwrap();
        let eta = 0.1;
        let mut acc = 0.0;
        let trials = 200;
        for seed in 0..trials {
            let noise = NoiseSpec::new(eta, seed).unwrap();
            let out = run_pipeline(&block, &m, &noise, 0.5, &PipelineOptions::default()).unwrap();
            acc += out.iter().map(|x| x * x).sum::<f64>() / out.len() as f64;
        }
        let var = acc / trials as f64;
        assert!((var - eta).abs() < 0.1 * eta, "{var}");
    }
}
