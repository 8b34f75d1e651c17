use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codeword::{symbol_count, CodewordBlock, PowerMode};
use super::pipeline::{default_channel_bandwidth, run_pipeline, PipelineOptions, PulseKind};
use crate::error::{Error, Result};
use crate::matrix::{LctMatrix, MatrixSpec};
use crate::signal::NoiseSpec;

pub const MIN_TRIALS: usize = 100;

/// Which signal the power budget `P` refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerReference {
    /// The transformed signal on the channel. For `c = 0` matrices the
    /// symbol variance becomes `P·|a|`.
    #[default]
    Channel,
    /// The symbols themselves: variance `P`.
    Symbol,
}

/// A Monte Carlo run, as loaded from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub scheme: PulseKind,
    pub matrix: MatrixSpec,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub eta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_chan: Option<f64>,
    pub n_trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard_factor: Option<f64>,
    #[serde(default = "one")]
    pub grid_oversample: f64,
    #[serde(default)]
    pub power_reference: PowerReference,
    #[serde(default)]
    pub power_mode: PowerMode,
}

fn one() -> f64 {
    1.0
}

impl SimConfig {
    /// A config with default grid, filter and power settings.
    pub fn new(matrix: impl Into<MatrixSpec>, w: f64, p: f64, eta: f64, t: f64, n_trials: usize, seed: u64) -> Self {
        SimConfig {
            scheme: PulseKind::default(),
            matrix: matrix.into(),
            w,
            p,
            eta,
            t,
            w_chan: None,
            n_trials,
            seed,
            guard_factor: None,
            grid_oversample: 1.0,
            power_reference: PowerReference::default(),
            power_mode: PowerMode::default(),
        }
    }

    /// Every problem with the config, one message per offending field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let matrix = self.matrix.resolve();
        if let Err(e) = &matrix {
            out.push(format!("matrix: {e}"));
        }
        for (name, v) in [("W", self.w), ("P", self.p), ("T", self.t)] {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name}: must be finite and > 0, got {v}"));
            }
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            out.push(format!("eta: must be finite and ≥ 0, got {}", self.eta));
        }
        if self.w.is_finite() && self.w > 0.0 && self.t.is_finite() && self.t > 0.0 {
            if let Err(e) = symbol_count(self.w, self.t) {
                out.push(format!("T: {e}"));
            }
        }
        if self.n_trials < MIN_TRIALS {
            out.push(format!("n_trials: need at least {MIN_TRIALS}, got {}", self.n_trials));
        }
        if let Some(g) = self.guard_factor {
            if !(g.is_finite() && g >= 0.0) {
                out.push(format!("guard_factor: must be finite and ≥ 0, got {g}"));
            }
        }
        if !(self.grid_oversample.is_finite() && self.grid_oversample >= 1.0) {
            out.push(format!("grid_oversample: must be ≥ 1, got {}", self.grid_oversample));
        }
        if let Ok(m) = &matrix {
            match self.w_chan {
                Some(w) if !(w.is_finite() && w > 0.0) => out.push(format!("w_chan: must be finite and > 0, got {w}")),
                None if m.c() != 0.0 => {
                    out.push("w_chan: required when the matrix has c ≠ 0 (no nominal channel bandwidth)".into())
                }
                _ => {}
            }
            if self.power_reference == PowerReference::Channel && m.c() != 0.0 {
                out.push("power_reference: `channel` needs a matrix with c = 0; use `symbol`".into());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::param("config", problems.join("; ")))
        }
    }

    pub fn lct_matrix(&self) -> Result<LctMatrix> {
        self.matrix.resolve()
    }

    pub fn channel_bandwidth(&self) -> Result<f64> {
        let m = self.lct_matrix()?;
        self.w_chan
            .or_else(|| default_channel_bandwidth(self.w, &m))
            .ok_or_else(|| Error::param("w_chan", "required when the matrix has c ≠ 0"))
    }

    /// Per-symbol variance implied by the power reference.
    pub fn symbol_variance(&self) -> Result<f64> {
        match self.power_reference {
            PowerReference::Symbol => Ok(self.p),
            PowerReference::Channel => Ok(self.p * self.lct_matrix()?.a().abs()),
        }
    }

    fn options(&self) -> PipelineOptions {
        PipelineOptions { pulse: self.scheme, guard_factor: self.guard_factor, grid_oversample: self.grid_oversample }
    }
}

/// Per-trial statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub mse: f64,
    pub snr_est: f64,
}

/// Aggregate Monte Carlo result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Mean squared symbol error over all trials.
    pub mse: f64,
    /// Pooled symbol power over pooled error power.
    pub snr_est: f64,
    /// `(N/T)·½·log2(1 + snr_est)` in bits/s.
    pub rate_est: f64,
    /// Standard error of the per-trial rate estimates.
    pub rate_std_error: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub noise_free: bool,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl SimulationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("simulation result serializes")
    }
}

/// Independent stream for trial `index` under `seed`.
fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct TrialOutcome {
    signal: f64,
    error: f64,
    count: usize,
}

fn run_trial(cfg: &SimConfig, m: &LctMatrix, w_chan: f64, variance: f64, index: usize) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, index);
    let block = CodewordBlock::random(cfg.w, cfg.t, cfg.p, variance, cfg.power_mode, &mut rng)?;
    let noise = NoiseSpec::new(cfg.eta, rng.next_u64())?;
    let out = run_pipeline(&block, m, &noise, w_chan, &cfg.options())?;
    let signal = block.symbols().iter().map(|x| x * x).sum();
    let error = block.symbols().iter().zip(&out).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(TrialOutcome { signal, error, count: block.len() })
}

fn rate(n_symbols: usize, t: f64, snr: f64) -> f64 {
    n_symbols as f64 / t * 0.5 * snr.log2_1p()
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

/// Runs `n_trials` independent blocks with fresh Gaussian symbols and noise.
/// Trials run in parallel; each draws from its own seeded stream, so the
/// result depends only on the config.
pub fn estimate_achievable_rate(cfg: &SimConfig) -> Result<SimulationResult> {
    if cfg.n_trials < MIN_TRIALS {
        return Err(Error::param("n_trials", format!("need at least {MIN_TRIALS}, got {}", cfg.n_trials)));
    }
    cfg.validate()?;
    let m = cfg.lct_matrix()?;
    let w_chan = cfg.channel_bandwidth()?;
    let variance = cfg.symbol_variance()?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &m, w_chan, variance, i))
        .collect::<Result<_>>()?;
    let n_symbols = symbol_count(cfg.w, cfg.t)?;
    let trials: Vec<TrialRecord> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| TrialRecord { trial: i, mse: o.error / o.count as f64, snr_est: o.signal / o.error })
        .collect();
    let total_signal: f64 = outcomes.iter().map(|o| o.signal).sum();
    let total_error: f64 = outcomes.iter().map(|o| o.error).sum();
    let count: usize = outcomes.iter().map(|o| o.count).sum();
    let snr_est = total_signal / total_error;
    let rates: Vec<f64> = trials.iter().map(|r| rate(n_symbols, cfg.t, r.snr_est)).collect();
    let mean_rate = rates.iter().sum::<f64>() / rates.len() as f64;
    let var_rate = rates.iter().map(|r| (r - mean_rate).powi(2)).sum::<f64>() / (rates.len() - 1) as f64;
    Ok(SimulationResult {
        mse: total_error / count as f64,
        snr_est,
        rate_est: rate(n_symbols, cfg.t, snr_est),
        rate_std_error: (var_rate / rates.len() as f64).sqrt(),
        n_trials: cfg.n_trials,
        seed: cfg.seed,
        noise_free: cfg.eta == 0.0,
        trials,
    })
}
