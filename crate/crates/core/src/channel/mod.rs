//! Monte Carlo simulation of the LCT-modified time-continuous AWGN channel.

mod codeword;
mod copies;
mod pipeline;
mod sim;

pub use codeword::{
    symbol_count, synthesize_codeword, synthesize_codeword_from, CodewordBlock, PowerMode, Pulse,
    MIN_SAMPLES_PER_SYMBOL,
};
pub use copies::{lct_bandlimited_pulse, marker_symbols, spectrum_copy_analysis, CopyReport};
pub use pipeline::{
    default_channel_bandwidth, default_guard_factor, nominal_channel_bandwidth, pipeline_grid, run_pipeline,
    PipelineGrid, PipelineOptions, PulseKind, CHIRP_CHANNEL_MARGIN, CHIRP_GUARD, SCALING_GUARD,
};
pub use sim::{estimate_achievable_rate, PowerReference, SimConfig, SimulationResult, TrialRecord, MIN_TRIALS};
