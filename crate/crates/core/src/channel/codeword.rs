use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{sinc, SampledSignal};
use crate::transform::Grid;

/// Minimum number of grid samples per symbol interval `1/(2W)`.
pub const MIN_SAMPLES_PER_SYMBOL: f64 = 8.0;

/// Real symbol amplitudes sent at the instants `m/(2W)` of a block of
/// duration `T`, with average power budget `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodewordBlock {
    symbols: Vec<f64>,
    w: f64,
    t_block: f64,
    power_budget: f64,
}

/// How random blocks honor the power budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// Draw once; the budget holds on average.
    #[default]
    Expectation,
    /// Redraw until `Σx² ≤ 2WPT`.
    Hard,
}

/// Number of symbols `round(2WT)` in a block.
pub fn symbol_count(w: f64, t_block: f64) -> Result<usize> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::param("w", format!("must be finite and > 0, got {w}")));
    }
    if !(t_block.is_finite() && t_block > 0.0) {
        return Err(Error::param("t_block", format!("must be finite and > 0, got {t_block}")));
    }
    let n = (2.0 * w * t_block).round();
    if n < 1.0 {
        return Err(Error::param("t_block", "block holds no symbol (round(2WT) < 1)"));
    }
    Ok(n as usize)
}

impl CodewordBlock {
    pub fn new(symbols: Vec<f64>, w: f64, t_block: f64, power_budget: f64) -> Result<Self> {
        let n = symbol_count(w, t_block)?;
        if symbols.len() != n {
            return Err(Error::param("symbols", format!("expected round(2WT) = {n} symbols, got {}", symbols.len())));
        }
        if symbols.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("codeword symbols"));
        }
        if !(power_budget.is_finite() && power_budget >= 0.0) {
            return Err(Error::param("power_budget", format!("must be finite and ≥ 0, got {power_budget}")));
        }
        Ok(CodewordBlock { symbols, w, t_block, power_budget })
    }

    pub fn zeros(w: f64, t_block: f64, power_budget: f64) -> Result<Self> {
        let n = symbol_count(w, t_block)?;
        Self::new(vec![0.0; n], w, t_block, power_budget)
    }

    /// I.i.d. zero-mean Gaussian symbols of the given variance.
    pub fn random<R: Rng + ?Sized>(
        w: f64,
        t_block: f64,
        power_budget: f64,
        variance: f64,
        mode: PowerMode,
        rng: &mut R,
    ) -> Result<Self> {
        let n = symbol_count(w, t_block)?;
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(Error::param("variance", format!("must be finite and ≥ 0, got {variance}")));
        }
        let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::param("variance", e.to_string()))?;
        let limit = 2.0 * w * power_budget * t_block;
        loop {
            let symbols: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
            if mode == PowerMode::Expectation || symbols.iter().map(|x| x * x).sum::<f64>() <= limit {
                return Self::new(symbols, w, t_block, power_budget);
            }
        }
    }

    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn t_block(&self) -> f64 {
        self.t_block
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    pub fn energy(&self) -> f64 {
        self.symbols.iter().map(|x| x * x).sum()
    }

    /// `2·W·P·T`.
    pub fn energy_limit(&self) -> f64 {
        2.0 * self.w * self.power_budget * self.t_block
    }

    pub fn meets_power_constraint(&self) -> bool {
        self.energy() <= self.energy_limit()
    }

    /// Instant of the `i`-th symbol when the first one sits at `first/(2W)`.
    pub fn instant(&self, i: usize, first: i64) -> f64 {
        (i as f64 + first as f64) / (2.0 * self.w)
    }
}

/// Interpolating pulse family.
#[derive(Clone, Debug, PartialEq)]
pub enum Pulse {
    /// `sinc(2Wτ)`, truncated by the grid.
    Sinc,
    /// The sinc periodized over the grid span `P`:
    /// `sin(2πWτ)/(K·tan(πτ/P))` with `K = 2WP`. It is exactly bandlimited
    /// to `W` on the grid's DFT, so truncation never enters.
    PeriodicSinc,
    /// A sampled pulse on the same spacing as the grid; shifts must land on
    /// whole samples.
    Custom(SampledSignal),
}

fn periodic_sinc(tau: f64, w: f64, period: f64, k: f64) -> f64 {
    let x = PI * tau / period;
    if x.sin().abs() < 1e-12 {
        return 1.0;
    }
    (2.0 * PI * w * tau).sin() / (k * x.tan())
}

/// `Σ x_m·pulse(t − m/(2W))` with symbols at `m = 1..N`.
pub fn synthesize_codeword(block: &CodewordBlock, pulse: &Pulse, grid: Grid) -> Result<SampledSignal> {
    synthesize_codeword_from(block, pulse, grid, 1)
}

/// As [`synthesize_codeword`] with the first symbol at `first/(2W)`.
pub fn synthesize_codeword_from(block: &CodewordBlock, pulse: &Pulse, grid: Grid, first: i64) -> Result<SampledSignal> {
    let w = block.w();
    if grid.len == 0 || !(grid.step > 0.0) {
        return Err(Error::param("grid", "needs at least one sample and a positive step"));
    }
    let per_symbol = 1.0 / (2.0 * w * grid.step);
    if per_symbol < MIN_SAMPLES_PER_SYMBOL - 1e-9 {
        return Err(Error::GridTooCoarse(format!(
            "{per_symbol:.3} samples per symbol interval, need at least {MIN_SAMPLES_PER_SYMBOL}"
        )));
    }
    let end = grid.point(grid.len - 1);
    for i in 0..block.len() {
        let t = block.instant(i, first);
        if t < grid.start || t > end {
            return Err(Error::param("grid", format!("symbol instant {t} lies outside [{}, {end}]", grid.start)));
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len];
    match pulse {
        Pulse::Sinc => {
            for (j, z) in out.iter_mut().enumerate() {
                let t = grid.point(j);
                let v: f64 = (0..block.len())
                    .map(|i| block.symbols[i] * sinc(2.0 * w * (t - block.instant(i, first))))
                    .sum();
                *z = Complex64::new(v, 0.0);
            }
        }
        Pulse::PeriodicSinc => {
            let period = grid.len as f64 * grid.step;
            let k = 2.0 * w * period;
            if (k - k.round()).abs() > 1e-6 || (k.round() as i64) % 2 != 0 {
                return Err(Error::param(
                    "grid",
                    format!("periodic sinc needs the grid to span an even number of symbol intervals, got {k}"),
                ));
            }
            let k = k.round();
            for (j, z) in out.iter_mut().enumerate() {
                let t = grid.point(j);
                let v: f64 = (0..block.len())
                    .map(|i| block.symbols[i] * periodic_sinc(t - block.instant(i, first), w, period, k))
                    .sum();
                *z = Complex64::new(v, 0.0);
            }
        }
        Pulse::Custom(phi) => {
            if (phi.dt() - grid.step).abs() > 1e-9 * grid.step {
                return Err(Error::param("pulse", "custom pulse spacing differs from the grid spacing"));
            }
            for (i, &x) in block.symbols.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                // Grid sample j carries pulse sample j − offset.
                let shift = (grid.start - block.instant(i, first) - phi.t0()) / grid.step;
                if (shift - shift.round()).abs() > 1e-6 {
                    return Err(Error::param("pulse", "symbol instants must fall on whole pulse samples"));
                }
                let shift = shift.round() as i64;
                for (j, z) in out.iter_mut().enumerate() {
                    let k = j as i64 + shift;
                    if k >= 0 && (k as usize) < phi.len() {
                        *z += x * phi.samples()[k as usize];
                    }
                }
            }
        }
    }
    SampledSignal::new(out, grid.start, grid.step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::measure_energy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(w: f64, t: f64, sps: usize) -> Grid {
        // [−T, 2T] with sps samples per symbol interval.
        let n_sym = (2.0 * w * 3.0 * t).round() as usize;
        let step = 1.0 / (2.0 * w * sps as f64);
        Grid { start: -t, step, len: n_sym * sps }
    }

    #[test]
    fn single_symbol_interpolates() {
        let mut s = vec![0.0; 16];
        s[0] = 1.0;
        let block = CodewordBlock::new(s, 1.0, 8.0, 1.0).unwrap();
        let g = grid(1.0, 8.0, 8);
        for pulse in [Pulse::Sinc, Pulse::PeriodicSinc] {
            let x = synthesize_codeword(&block, &pulse, g).unwrap();
            let at = |t: f64| x.samples()[x.index_of(t).unwrap()].re;
            assert!((at(0.5) - 1.0).abs() < 1e-3);
            for m in 2..=16 {
                assert!(at(m as f64 * 0.5).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn zero_block_is_silent() {
        let block = CodewordBlock::zeros(1.0, 8.0, 1.0).unwrap();
        let x = synthesize_codeword(&block, &Pulse::PeriodicSinc, grid(1.0, 8.0, 8)).unwrap();
        assert_eq!(measure_energy(&x), 0.0);
    }

    #[test]
    fn average_power_matches_budget() {
        // Orthogonal pulses of energy 1/(2W) carry Σx²/(2W) ≈ P·T per block.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = grid(1.0, 8.0, 16);
        let reps = 100;
        let mut acc = 0.0;
        for _ in 0..reps {
            let block = CodewordBlock::random(1.0, 8.0, 1.0, 1.0, PowerMode::Expectation, &mut rng).unwrap();
            let x = synthesize_codeword(&block, &Pulse::PeriodicSinc, g).unwrap();
            let inside: f64 = x
                .samples()
                .iter()
                .enumerate()
                .filter(|(k, _)| (0.0..=8.0).contains(&x.time(*k)))
                .map(|(_, z)| z.norm_sqr())
                .sum::<f64>()
                * x.dt();
            acc += inside / 8.0;
        }
        let power = acc / reps as f64;
        assert!((power - 1.0).abs() < 0.1, "{power}");
    }

    #[test]
    fn hard_mode_enforces_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let block = CodewordBlock::random(1.0, 8.0, 1.0, 1.0, PowerMode::Hard, &mut rng).unwrap();
            assert!(block.meets_power_constraint());
        }
    }

    #[test]
    fn custom_pulse_shifts_by_samples() {
        let phi = SampledSignal::centered(64, 1.0 / 16.0, |t| Complex64::new((-t * t * 100.0).exp(), 0.0)).unwrap();
        let block = CodewordBlock::new(vec![1.0, -2.0], 1.0, 1.0, 1.0).unwrap();
        let g = Grid { start: -2.0, step: 1.0 / 16.0, len: 96 };
        let x = synthesize_codeword(&block, &Pulse::Custom(phi), g).unwrap();
        assert!((x.samples()[x.index_of(0.5).unwrap()].re - 1.0).abs() < 1e-3);
        assert!((x.samples()[x.index_of(1.0).unwrap()].re + 2.0).abs() < 1e-3);
        let bad = SampledSignal::centered(64, 1.0 / 15.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(synthesize_codeword(&block, &Pulse::Custom(bad), g).is_err());
    }

    #[test]
    fn coarse_grid_and_bad_blocks() {
        let block = CodewordBlock::zeros(1.0, 8.0, 1.0).unwrap();
        let g = Grid { start: -8.0, step: 0.1, len: 240 };
        assert!(matches!(synthesize_codeword(&block, &Pulse::Sinc, g), Err(Error::GridTooCoarse(_))));
        assert!(CodewordBlock::new(vec![1.0; 3], 1.0, 8.0, 1.0).is_err());
        assert!(CodewordBlock::zeros(1.0, 0.1, 1.0).is_err());
        let odd = Grid { start: -8.0, step: 1.0 / 16.0, len: 8 * 47 };
        assert!(synthesize_codeword(&block, &Pulse::PeriodicSinc, odd).is_err());
    }
}
