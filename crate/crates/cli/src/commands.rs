use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use lctcap::capacity::{
    classic_capacity, classic_per_transmission, infinite_bandwidth_capacity, lct_domain_capacity, optimize_capacity,
    theorem1_capacity, theorem2_capacity, theorem3_capacity, wideband_capacity, CapacityReport, ChannelSpec,
    OptimizeTarget, Variant,
};
use lctcap::channel::{estimate_achievable_rate, SimConfig};
use lctcap::sampling::RateSweep;
use lctcap::signal::{fmt_f64, read_csv, write_csv, Axis};
use lctcap::transform::{lct_forward_with, lct_inverse, LctOptions};
use lctcap::{MatrixSpec, SampledSignal};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::schema::{check, opt, req, Field, Kind};

pub enum CliError {
    Config(Vec<String>),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(vec![msg.into()])
    }
}

impl From<lctcap::Error> for CliError {
    fn from(e: lctcap::Error) -> Self {
        match e {
            lctcap::Error::Io(_) | lctcap::Error::Format(_) => CliError::Io(e.to_string()),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::config(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a command produced. `trials` goes next to the main output.
pub struct Output {
    pub main: String,
    pub trials: Option<String>,
    pub summary: String,
}

impl Output {
    fn single(main: String, summary: String) -> Self {
        Output { main, trials: None, summary }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::config(e.to_string()))
}

fn fail_on(problems: Vec<String>) -> CliResult<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(problems))
    }
}

fn validated<T: for<'de> Deserialize<'de>>(v: Value, fields: &[Field]) -> CliResult<T> {
    let mut problems = Vec::new();
    check(&v, fields, "", &mut problems);
    fail_on(problems)?;
    parse(v)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

const DIRECTIONS: &[&str] = &["forward", "inverse"];

#[derive(Deserialize)]
struct TransformConfig {
    input: String,
    matrix: MatrixSpec,
    #[serde(default = "forward")]
    direction: String,
    #[serde(default = "one")]
    oversample: usize,
}

fn forward() -> String {
    "forward".into()
}

fn one() -> usize {
    1
}

fn signal_json(x: &SampledSignal, axis: &str) -> String {
    let re: Vec<f64> = x.samples().iter().map(|z| z.re).collect();
    let im: Vec<f64> = x.samples().iter().map(|z| z.im).collect();
    pretty(&json!({ "axis": axis, "start": x.t0(), "step": x.dt(), "re": re, "im": im }))
}

pub fn transform(v: Value, base: &Path, format: Format) -> CliResult<Output> {
    let cfg: TransformConfig = validated(
        v,
        &[
            req("input", Kind::String),
            req("matrix", Kind::Matrix),
            opt("direction", Kind::Choice(DIRECTIONS)),
            opt("oversample", Kind::Integer),
        ],
    )?;
    if cfg.oversample == 0 {
        return Err(CliError::config("oversample: must be ≥ 1"));
    }
    let m = cfg.matrix.resolve()?;
    let path = base.join(&cfg.input);
    let file = File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (x, _) = read_csv(BufReader::new(file))?;
    let (y, axis) = if cfg.direction == "forward" {
        let opts = LctOptions { oversample: cfg.oversample, ..LctOptions::default() };
        (lct_forward_with(&x, &m, &opts)?, Axis::Lct)
    } else {
        (lct_inverse(&x, &m)?, Axis::Time)
    };
    let main = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&y, axis, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => signal_json(&y, if axis == Axis::Lct { "u" } else { "t" }),
    };
    Ok(Output::single(main, format!("transform: {} samples ({})", y.len(), cfg.direction)))
}

const PARAM_NAMES: &[&str] = &["W", "P", "eta", "T", "B", "A", "alpha", "W_M"];

fn variant_params(v: Variant) -> Option<&'static [&'static str]> {
    Some(match v {
        Variant::Classic | Variant::ClassicPerUse => &["W", "P", "eta"],
        Variant::Theorem1SignalBand | Variant::Theorem1ChannelBand | Variant::WidebandInB => &["W", "P", "eta", "B"],
        Variant::Theorem2SignalBand | Variant::Theorem2ChannelBand => &["W", "P", "eta", "A"],
        Variant::Theorem3Symbols | Variant::Theorem3CopyBand => &["W", "P", "eta", "T"],
        Variant::InfiniteBandwidth => &["P", "eta"],
        Variant::LctDomain => &["W_M", "P", "eta", "A", "B", "alpha"],
        Variant::StationaryOptimum | Variant::Monotone => return None,
    })
}

fn evaluate(variant: Variant, p: &BTreeMap<String, f64>) -> lctcap::Result<CapacityReport> {
    let g = |k: &str| p[k];
    let ch = || ChannelSpec::new(g("W"), g("P"), g("eta"));
    match variant {
        Variant::Classic => classic_capacity(&ch()?),
        Variant::ClassicPerUse => classic_per_transmission(&ch()?),
        Variant::Theorem1SignalBand => Ok(theorem1_capacity(&ch()?, g("B"))?.signal_band),
        Variant::Theorem1ChannelBand => Ok(theorem1_capacity(&ch()?, g("B"))?.channel_band),
        Variant::Theorem2SignalBand => Ok(theorem2_capacity(&ch()?, g("A"))?.signal_band),
        Variant::Theorem2ChannelBand => Ok(theorem2_capacity(&ch()?, g("A"))?.channel_band),
        Variant::Theorem3Symbols => Ok(theorem3_capacity(&ch()?.with_block(g("T"))?)?.signal_band),
        Variant::Theorem3CopyBand => Ok(theorem3_capacity(&ch()?.with_block(g("T"))?)?.channel_band),
        Variant::WidebandInB => wideband_capacity(g("W"), g("P"), g("eta"), g("B")),
        Variant::InfiniteBandwidth => infinite_bandwidth_capacity(g("P"), g("eta")),
        Variant::LctDomain => lct_domain_capacity(g("W_M"), g("P"), g("eta"), g("A"), g("B"), g("alpha")),
        Variant::StationaryOptimum | Variant::Monotone => unreachable!("not sweepable"),
    }
}

#[derive(Deserialize)]
struct Sweep {
    param: String,
    from: f64,
    to: f64,
    #[serde(default = "fifty")]
    points: usize,
    spacing: Option<String>,
}

fn fifty() -> usize {
    50
}

#[derive(Deserialize)]
struct CapacityConfig {
    variant: Variant,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    sweep: Sweep,
}

const VARIANTS: &[&str] = &[
    "classic",
    "classic_per_use",
    "theorem1_signal_band",
    "theorem1_channel_band",
    "theorem2_signal_band",
    "theorem2_channel_band",
    "theorem3_symbols",
    "theorem3_copy_band",
    "wideband_in_b",
    "infinite_bandwidth",
    "lct_domain",
];

/// Scale parameters sweep on a log axis, angles on a linear one.
fn sweep_values(s: &Sweep, log: bool) -> Vec<f64> {
    let n = s.points;
    (0..n)
        .map(|k| {
            if k == 0 {
                return s.from;
            }
            if k == n - 1 {
                return s.to;
            }
            let f = k as f64 / (n - 1) as f64;
            if log {
                s.from * (s.to / s.from).powf(f)
            } else {
                s.from + (s.to - s.from) * f
            }
        })
        .collect()
}

const CAPACITY_HEADER: &str = "param,value,bits_per_second,variant\n";

fn variant_name(v: Variant) -> String {
    serde_json::to_value(v).expect("variant serializes").as_str().expect("unit variant").to_string()
}

fn capacity_row(out: &mut String, param: &str, value: f64, r: &CapacityReport) {
    writeln!(out, "{param},{},{},{}", fmt_f64(value), fmt_f64(r.bits_per_second), variant_name(r.variant))
        .expect("write to string");
}

pub fn capacity(v: Value, format: Format) -> CliResult<Output> {
    let mut problems = Vec::new();
    check(
        &v,
        &[req("variant", Kind::Choice(VARIANTS)), opt("params", Kind::Object), req("sweep", Kind::Object)],
        "",
        &mut problems,
    );
    if let Some(params) = v.get("params").and_then(Value::as_object) {
        for (k, x) in params {
            if !PARAM_NAMES.contains(&k.as_str()) {
                problems.push(format!("params.{k}: unknown parameter (expected one of {})", PARAM_NAMES.join(", ")));
            } else if !x.is_number() {
                problems.push(format!("params.{k}: expected a number, got {x}"));
            }
        }
    }
    if let Some(sweep) = v.get("sweep").filter(|s| s.is_object()) {
        check(
            sweep,
            &[
                req("param", Kind::Choice(PARAM_NAMES)),
                req("from", Kind::Number),
                req("to", Kind::Number),
                opt("points", Kind::Integer),
                opt("spacing", Kind::Choice(&["log", "linear"])),
            ],
            "sweep",
            &mut problems,
        );
    }
    fail_on(problems)?;
    let cfg: CapacityConfig = parse(v)?;

    let needed = variant_params(cfg.variant).expect("sweepable variant");
    let mut problems = Vec::new();
    for k in needed {
        if !cfg.params.contains_key(*k) && cfg.sweep.param != *k {
            problems.push(format!("params.{k}: required by variant {}", variant_name(cfg.variant)));
        }
    }
    for k in cfg.params.keys() {
        if !needed.contains(&k.as_str()) {
            problems.push(format!("params.{k}: not used by variant {}", variant_name(cfg.variant)));
        } else if *k == cfg.sweep.param {
            problems.push(format!("params.{k}: also swept; remove one"));
        }
    }
    if !needed.contains(&cfg.sweep.param.as_str()) {
        problems.push(format!("sweep.param: {} is not a parameter of {}", cfg.sweep.param, variant_name(cfg.variant)));
    }
    if cfg.sweep.points < 2 {
        problems.push(format!("sweep.points: need at least 2, got {}", cfg.sweep.points));
    }
    let log = match cfg.sweep.spacing.as_deref() {
        Some("log") => true,
        Some(_) => false,
        None => cfg.sweep.param != "alpha",
    };
    if log && !(cfg.sweep.from > 0.0 && cfg.sweep.to > 0.0) {
        problems.push("sweep: log spacing needs from > 0 and to > 0".into());
    }
    fail_on(problems)?;

    let mut reports = Vec::with_capacity(cfg.sweep.points);
    let values = sweep_values(&cfg.sweep, log);
    for &x in &values {
        let mut p = cfg.params.clone();
        p.insert(cfg.sweep.param.clone(), x);
        reports.push(evaluate(cfg.variant, &p)?);
    }
    let main = match format {
        Format::Csv => {
            let mut out = String::from(CAPACITY_HEADER);
            for (x, r) in values.iter().zip(&reports) {
                capacity_row(&mut out, &cfg.sweep.param, *x, r);
            }
            out
        }
        Format::Json => pretty(&reports),
    };
    Ok(Output::single(main, format!("capacity: {} points of {}", values.len(), variant_name(cfg.variant))))
}

pub fn optimize(v: Value, format: Format) -> CliResult<Output> {
    let mut problems = Vec::new();
    match v.get("target").and_then(Value::as_str) {
        Some("wideband_over_b") => check(
            &v,
            &[
                req("target", Kind::String),
                req("w", Kind::Number),
                req("p", Kind::Number),
                req("eta", Kind::Number),
                req("b_range", Kind::Range),
            ],
            "",
            &mut problems,
        ),
        Some("lct_domain_over_params") => check(
            &v,
            &[
                req("target", Kind::String),
                req("w_m", Kind::Number),
                req("p", Kind::Number),
                req("eta", Kind::Number),
                req("a_range", Kind::Range),
                req("b_range", Kind::Range),
                req("alpha_range", Kind::Range),
            ],
            "",
            &mut problems,
        ),
        _ => problems.push(format!(
            "target: expected one of wideband_over_b, lct_domain_over_params, got {}",
            v.get("target").unwrap_or(&Value::Null)
        )),
    }
    fail_on(problems)?;
    let target: OptimizeTarget = parse(v)?;
    let report = optimize_capacity(&target)?;
    let main = match format {
        Format::Json => pretty(&report),
        Format::Csv => {
            let mut out = String::from(CAPACITY_HEADER);
            for (k, x) in &report.params {
                capacity_row(&mut out, k, *x, &report);
            }
            out
        }
    };
    Ok(Output::single(main, format!("optimize: {} bits/s ({})", report.bits_per_second, variant_name(report.variant))))
}

const SIM_FIELDS: &[Field] = &[
    opt("scheme", Kind::Choice(&["sinc", "periodic_sinc"])),
    req("matrix", Kind::Matrix),
    req("W", Kind::Number),
    req("P", Kind::Number),
    req("eta", Kind::Number),
    req("T", Kind::Number),
    opt("w_chan", Kind::Number),
    req("n_trials", Kind::Integer),
    opt("seed", Kind::Integer),
    opt("guard_factor", Kind::Number),
    opt("grid_oversample", Kind::Number),
    opt("power_reference", Kind::Choice(&["channel", "symbol"])),
    opt("power_mode", Kind::Choice(&["expectation", "hard"])),
];

fn trials_csv(r: &lctcap::channel::SimulationResult) -> String {
    let mut out = String::from("trial,mse,snr_est\n");
    for t in &r.trials {
        writeln!(out, "{},{},{}", t.trial, fmt_f64(t.mse), fmt_f64(t.snr_est)).expect("write to string");
    }
    out
}

pub fn simulate(v: Value, seed: Option<u64>, format: Format) -> CliResult<Output> {
    let mut cfg: SimConfig = validated(v, SIM_FIELDS)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    fail_on(cfg.problems())?;
    let r = estimate_achievable_rate(&cfg)?;
    let summary = format!("simulate: rate_est {} bits/s over {} trials", r.rate_est, r.n_trials);
    Ok(match format {
        Format::Json => {
            let mut main = r.to_json();
            main.push('\n');
            Output { main, trials: Some(trials_csv(&r)), summary }
        }
        Format::Csv => Output::single(trials_csv(&r), summary),
    })
}

pub fn sample_demo(v: Value, format: Format) -> CliResult<Output> {
    let sweep: RateSweep = validated(
        v,
        &[
            req("matrix", Kind::Matrix),
            opt("alpha", Kind::Number),
            req("w_m", Kind::Number),
            req("multipliers", Kind::Numbers),
            opt("spectrum_points", Kind::Integer),
            opt("sample_span", Kind::Number),
            opt("eval_half_width", Kind::Number),
            opt("eval_step", Kind::Number),
        ],
    )?;
    let points = sweep.run()?;
    let main = match format {
        Format::Csv => {
            let mut out = String::from("rate_multiplier,reconstruction_error\n");
            for p in &points {
                writeln!(out, "{},{}", fmt_f64(p.rate_multiplier), fmt_f64(p.reconstruction_error))
                    .expect("write to string");
            }
            out
        }
        Format::Json => pretty(&points),
    };
    Ok(Output::single(main, format!("sample-demo: {} rates, minimum {} samples/s", points.len(), sweep.min_rate()?)))
}
