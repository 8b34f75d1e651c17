//! Closed-form AWGN capacities under LCT bandlimiting, Shannon limits and
//! the stationarity analysis of the wideband capacity.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::sin_cos_exact;

/// `log2(e)`, the exact value behind the familiar two-digit constant 1.44.
pub const LOG2_E: f64 = 1.0 / LN_2;

/// Channel parameters: bandwidth `w` (Hz), power `p` (W), noise scale `eta`
/// (W/Hz, two-sided PSD η/2), optional block length `t_block` (s) and
/// source rate `r_b` (bits/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub w: f64,
    pub p: f64,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_block: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_b: Option<f64>,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

impl ChannelSpec {
    pub fn new(w: f64, p: f64, eta: f64) -> Result<Self> {
        let ch = ChannelSpec { w, p, eta, t_block: None, r_b: None };
        ch.validate()?;
        Ok(ch)
    }

    pub fn with_block(mut self, t_block: f64) -> Result<Self> {
        self.t_block = Some(t_block);
        self.validate()?;
        Ok(self)
    }

    pub fn with_source_rate(mut self, r_b: f64) -> Result<Self> {
        self.r_b = Some(r_b);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("w", self.w)?;
        positive("p", self.p)?;
        positive("eta", self.eta)?;
        if let Some(t) = self.t_block {
            positive("t_block", t)?;
            if 2.0 * self.w * t < 1.0 {
                return Err(Error::param("t_block", "block must hold at least one symbol (2·W·T ≥ 1)"));
            }
        }
        if let Some(r) = self.r_b {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::param("r_b", format!("must be finite and ≥ 0, got {r}")));
            }
        }
        Ok(())
    }

    /// `N = 2·W·T`.
    pub fn n_symbols(&self) -> Option<f64> {
        self.t_block.map(|t| 2.0 * self.w * t)
    }

    /// `log2 K = R_b·T`; the message count itself overflows quickly.
    pub fn log2_messages(&self) -> Option<f64> {
        Some(self.r_b? * self.t_block?)
    }

    /// `K = 2^(R_b·T)`, possibly infinite.
    pub fn k_messages(&self) -> Option<f64> {
        self.log2_messages().map(f64::exp2)
    }

    /// `P/(ηW)`.
    pub fn snr(&self) -> f64 {
        self.p / (self.eta * self.w)
    }
}

/// Which closed form a report evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `W·log2(1 + P/(ηW))`.
    Classic,
    /// `½·log2(1 + P/(ηW))` bits per transmission.
    ClassicPerUse,
    /// `(W/B)·log2(1 + P/(ηW))`, signal band W.
    Theorem1SignalBand,
    /// `W·log2(1 + P/(ηWB))`, channel band WB.
    Theorem1ChannelBand,
    /// `A·W·log2(1 + P/(ηW))`, signal band W.
    Theorem2SignalBand,
    /// `W·log2(1 + A·P/(ηW))`, channel band W/A.
    Theorem2ChannelBand,
    /// `W·log2(1 + P(4WT − 1)/(ηW))`.
    Theorem3Symbols,
    /// `W·log2(1 + P/(ηW_M))` with `W_M = W/(4WT − 1)`.
    Theorem3CopyBand,
    /// `WB·log2(1 + P/(ηWB))`.
    WidebandInB,
    /// `P/(η·ln 2)`.
    InfiniteBandwidth,
    /// `(W_M/s)·log2(1 + P·s/(ηW_M))`, `s = A sin α + B cos α`.
    LctDomain,
    /// `log2(e)·W_c·P/(P + ηW_c)` at an interior stationary point.
    StationaryOptimum,
    /// No stationary point in range; boundary value reported.
    Monotone,
}

/// A capacity value in bits/s (bits/transmission for `ClassicPerUse`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub bits_per_second: f64,
    pub variant: Variant,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, Value>,
}

impl CapacityReport {
    fn new(bits_per_second: f64, variant: Variant) -> Self {
        CapacityReport { bits_per_second, variant, params: BTreeMap::new(), diagnostics: BTreeMap::new() }
    }

    fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    fn note(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.diagnostics.insert(name.to_string(), v.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("capacity report serializes")
    }
}

/// Both forms a theorem gives: in the signal's own band and in the band the
/// transformed signal occupies on the channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityForms {
    pub signal_band: CapacityReport,
    pub channel_band: CapacityReport,
}

/// `prefactor·log2(1 + snr)`; every closed form goes through here.
fn rate(prefactor: f64, snr: f64) -> f64 {
    prefactor * snr.ln_1p() / LN_2
}

fn nonzero(name: &'static str, v: f64) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::param(name, format!("must be finite and nonzero, got {v}")));
    }
    Ok(v.abs())
}

pub fn classic_capacity(ch: &ChannelSpec) -> Result<CapacityReport> {
    ch.validate()?;
    Ok(CapacityReport::new(rate(ch.w, ch.p / (ch.eta * ch.w)), Variant::Classic))
}

/// Bits per transmission; the bits/s capacity is `2W` times this.
pub fn classic_per_transmission(ch: &ChannelSpec) -> Result<CapacityReport> {
    ch.validate()?;
    Ok(CapacityReport::new(rate(0.5, ch.p / (ch.eta * ch.w)), Variant::ClassicPerUse))
}

/// `(W/B)·log2(1 + P/(ηW))` at bandwidth `w`.
fn theorem1_signal(w: f64, p: f64, eta: f64, b: f64) -> f64 {
    rate(w / b, p / (eta * w))
}

/// Theorem-1 capacity. The channel-band form is the signal-band form with
/// `W` replaced by `W·|B|`.
pub fn theorem1_capacity(ch: &ChannelSpec, b: f64) -> Result<CapacityForms> {
    ch.validate()?;
    let b = nonzero("b", b)?;
    let signal = theorem1_signal(ch.w, ch.p, ch.eta, b);
    let channel = theorem1_signal(ch.w * b, ch.p, ch.eta, b);
    Ok(CapacityForms {
        signal_band: CapacityReport::new(signal, Variant::Theorem1SignalBand).param("b", b),
        channel_band: CapacityReport::new(channel, Variant::Theorem1ChannelBand)
            .param("b", b)
            .note("channel_bandwidth", ch.w * b),
    })
}

/// `A·W·log2(1 + P/(ηW))` at bandwidth `w`.
fn theorem2_signal(w: f64, p: f64, eta: f64, a: f64) -> f64 {
    rate(a * w, p / (eta * w))
}

/// Theorem-2 capacity. The channel-band form is the signal-band form with
/// `W` replaced by `W/|A|`.
pub fn theorem2_capacity(ch: &ChannelSpec, a: f64) -> Result<CapacityForms> {
    ch.validate()?;
    let a = nonzero("a", a)?;
    let signal = theorem2_signal(ch.w, ch.p, ch.eta, a);
    let channel = theorem2_signal(ch.w / a, ch.p, ch.eta, a);
    Ok(CapacityForms {
        signal_band: CapacityReport::new(signal, Variant::Theorem2SignalBand).param("a", a),
        channel_band: CapacityReport::new(channel, Variant::Theorem2ChannelBand)
            .param("a", a)
            .note("channel_bandwidth", ch.w / a),
    })
}

/// Theorem-3 capacity from `N = 2WT` symbols whose copies each occupy
/// `W_M = W/(2N − 1)`.
pub fn theorem3_capacity(ch: &ChannelSpec) -> Result<CapacityForms> {
    ch.validate()?;
    let t = ch
        .t_block
        .ok_or_else(|| Error::param("t_block", "theorem-3 capacity needs a block duration"))?;
    let gain = 4.0 * ch.w * t - 1.0;
    if gain <= 0.0 {
        return Err(Error::param("t_block", "requires 4·W·T > 1"));
    }
    let w_m = ch.w / gain;
    let symbols = rate(ch.w, ch.p * gain / (ch.eta * ch.w));
    let copies = rate(ch.w, ch.p / (ch.eta * w_m));
    Ok(CapacityForms {
        signal_band: CapacityReport::new(symbols, Variant::Theorem3Symbols).note("n_symbols", 2.0 * ch.w * t),
        channel_band: CapacityReport::new(copies, Variant::Theorem3CopyBand).note("w_m", w_m),
    })
}

/// `WB·log2(1 + P/(ηWB))`: the classic capacity at bandwidth `W·B`.
pub fn wideband_capacity(w: f64, p: f64, eta: f64, b: f64) -> Result<CapacityReport> {
    let ch = ChannelSpec::new(positive("w", w)? * positive("b", b)?, p, eta)?;
    let mut r = classic_capacity(&ch)?;
    r.variant = Variant::WidebandInB;
    Ok(r.param("b", b))
}

/// `s = A sin α + B cos α`, exact at quarter turns.
pub fn lct_domain_scale(a: f64, b: f64, alpha: f64) -> f64 {
    let (sin, cos) = sin_cos_exact(alpha);
    a * sin + b * cos
}

fn lct_domain_rate(w_m: f64, p: f64, eta: f64, s: f64) -> f64 {
    rate(w_m / s, p * s / (eta * w_m))
}

/// Capacity for a signal of LCT-domain support `w_m`, transmitted at
/// `u_s = 2·W_M/s` after the combined LCT/FRFT.
pub fn lct_domain_capacity(w_m: f64, p: f64, eta: f64, a: f64, b: f64, alpha: f64) -> Result<CapacityReport> {
    positive("w_m", w_m)?;
    positive("p", p)?;
    positive("eta", eta)?;
    let s = lct_domain_scale(a, b, alpha);
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("alpha", format!("A·sin α + B·cos α must be > 0, got {s}")));
    }
    Ok(CapacityReport::new(lct_domain_rate(w_m, p, eta, s), Variant::LctDomain)
        .param("a", a)
        .param("b", b)
        .param("alpha", alpha)
        .param("s", s)
        .note("transmission_rate", 2.0 * w_m / s))
}

/// Which asymptotic limit to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitKind {
    /// Minimum `E_b/η` under a theorem-1 matrix: `ln 2/B`.
    Theorem1 { b: f64 },
    /// Minimum `E_b/η` under a theorem-2 matrix: `A·ln 2`.
    Theorem2 { a: f64 },
    /// Capacity as bandwidth grows without bound: `P/(η ln 2)` bits/s.
    InfiniteBandwidth { p: f64, eta: f64 },
}

pub fn shannon_limits(kind: LimitKind) -> Result<f64> {
    match kind {
        LimitKind::Theorem1 { b } => Ok(LN_2 / nonzero("b", b)?),
        LimitKind::Theorem2 { a } => Ok(nonzero("a", a)? * LN_2),
        LimitKind::InfiniteBandwidth { p, eta } => Ok(LOG2_E * positive("p", p)? / positive("eta", eta)?),
    }
}

/// `P/(η ln 2)` as a report.
pub fn infinite_bandwidth_capacity(p: f64, eta: f64) -> Result<CapacityReport> {
    let c = shannon_limits(LimitKind::InfiniteBandwidth { p, eta })?;
    Ok(CapacityReport::new(c, Variant::InfiniteBandwidth))
}

/// `g(x) = ln(1 + x) − x/(1 + x)`; positive for every `x > 0`, so the
/// wideband capacity has no interior stationary point.
pub fn stationarity_residual(x: f64) -> Result<f64> {
    if !(x > -1.0) || !x.is_finite() {
        return Err(Error::param("x", format!("must be finite and > −1, got {x}")));
    }
    Ok(x.ln_1p() - x / (1.0 + x))
}

pub const SCAN_POINTS: usize = 64;
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Result of a stationary-point search over `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stationary {
    /// A sign change of the residual was bracketed and refined.
    Interior(f64),
    /// The residual keeps one sign; `increasing` when it is positive.
    Monotone { increasing: bool },
    /// `lo == hi`.
    Degenerate,
}

/// Scans `residual` on a 64-point log grid over `[lo, hi]` and bisects the
/// first sign change to [`ROOT_TOLERANCE`].
pub fn find_stationary_point(residual: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Stationary> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(Error::param("range", format!("need 0 < lo ≤ hi, got [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Stationary::Degenerate);
    }
    let eval = |x: f64| {
        let r = residual(x);
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::NonFinite("stationarity residual"))
        }
    };
    let ratio = (hi / lo).ln();
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| if k + 1 == SCAN_POINTS { hi } else { lo * (ratio * k as f64 / (SCAN_POINTS - 1) as f64).exp() })
        .collect();
    let mut prev = (grid[0], eval(grid[0])?);
    if prev.1 == 0.0 {
        return Ok(Stationary::Interior(prev.0));
    }
    for &x in &grid[1..] {
        let r = eval(x)?;
        if r == 0.0 {
            return Ok(Stationary::Interior(x));
        }
        if r.signum() != prev.1.signum() {
            let (mut a, mut fa, mut b) = (prev.0, prev.1, x);
            while b - a > ROOT_TOLERANCE {
                let mid = 0.5 * (a + b);
                let fm = eval(mid)?;
                if fm == 0.0 {
                    return Ok(Stationary::Interior(mid));
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return Ok(Stationary::Interior(0.5 * (a + b)));
        }
        prev = (x, r);
    }
    Ok(Stationary::Monotone { increasing: prev.1 > 0.0 })
}

/// Closed interval of a search parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let r = Range { lo, hi };
        r.validate("range")?;
        Ok(r)
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::param(name, format!("need finite lo ≤ hi, got [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// What to optimize.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum OptimizeTarget {
    /// `WB·log2(1 + P/(ηWB))` over `B`.
    WidebandOverB { w: f64, p: f64, eta: f64, b_range: Range },
    /// The LCT-domain capacity over `A`, `B` and `α`.
    LctDomainOverParams { w_m: f64, p: f64, eta: f64, a_range: Range, b_range: Range, alpha_range: Range },
}

/// Locates the maximum of the chosen capacity. An interior answer is only
/// returned when the stationarity residual changes sign in range;
/// otherwise the boundary value is reported with variant `Monotone`.
pub fn optimize_capacity(target: &OptimizeTarget) -> Result<CapacityReport> {
    match *target {
        OptimizeTarget::WidebandOverB { w, p, eta, b_range } => {
            b_range.validate("b_range")?;
            positive("b_range.lo", b_range.lo)?;
            ChannelSpec::new(w, p, eta)?;
            let residual = |b: f64| stationarity_residual(p / (eta * w * b)).unwrap_or(f64::NAN);
            let limit = LOG2_E * p / eta;
            match find_stationary_point(residual, b_range.lo, b_range.hi)? {
                Stationary::Interior(b) => {
                    let wc = w * b;
                    Ok(CapacityReport::new(LOG2_E * wc * p / (p + eta * wc), Variant::StationaryOptimum)
                        .param("b", b)
                        .note("limit_bits_per_second", limit))
                }
                Stationary::Degenerate => {
                    let r = wideband_capacity(w, p, eta, b_range.lo)?;
                    Ok(r.note("note", "degenerate-range").note("limit_bits_per_second", limit))
                }
                Stationary::Monotone { increasing } => {
                    let b = if increasing { b_range.hi } else { b_range.lo };
                    let r = wideband_capacity(w, p, eta, b)?;
                    Ok(CapacityReport { variant: Variant::Monotone, ..r }
                        .note("note", "monotone in B")
                        .note("boundary_variant", "wideband_in_b")
                        .note("limit_bits_per_second", limit))
                }
            }
        }
        OptimizeTarget::LctDomainOverParams { w_m, p, eta, a_range, b_range, alpha_range } => {
            a_range.validate("a_range")?;
            b_range.validate("b_range")?;
            alpha_range.validate("alpha_range")?;
            positive("w_m", w_m)?;
            positive("p", p)?;
            positive("eta", eta)?;
            let ((s_lo, at_lo), (s_hi, _)) = scale_extremes(a_range, b_range, alpha_range);
            if s_lo <= 0.0 {
                return Err(Error::param(
                    "ranges",
                    format!("A·sin α + B·cos α reaches {s_lo} ≤ 0 inside the search box"),
                ));
            }
            // Capacity falls as s grows: dC/ds ∝ −g(P·s/(η·W_M)).
            let residual = |s: f64| -stationarity_residual(p * s / (eta * w_m)).unwrap_or(f64::NAN);
            let limit = LOG2_E * p / eta;
            let at = |(a, b, alpha): (f64, f64, f64)| lct_domain_capacity(w_m, p, eta, a, b, alpha);
            match find_stationary_point(residual, s_lo, s_hi)? {
                Stationary::Interior(s) => {
                    let wc = w_m / s;
                    Ok(CapacityReport::new(LOG2_E * wc * p / (p + eta * wc), Variant::StationaryOptimum)
                        .param("s", s)
                        .note("limit_bits_per_second", limit))
                }
                Stationary::Degenerate => Ok(at(at_lo)?.note("note", "degenerate-range")),
                Stationary::Monotone { increasing } => {
                    let best = if increasing {
                        // Never reached for positive s; kept for completeness of the search.
                        scale_extremes(a_range, b_range, alpha_range).1 .1
                    } else {
                        at_lo
                    };
                    let r = at(best)?;
                    Ok(CapacityReport { variant: Variant::Monotone, ..r }
                        .note("note", "monotone in s = A·sin α + B·cos α")
                        .note("boundary_variant", "lct_domain")
                        .note("limit_bits_per_second", limit))
                }
            }
        }
    }
}

type Point = (f64, f64, f64);

/// Minimum and maximum of `A sin α + B cos α` over the box, with the
/// parameters attaining them. The function is linear in `A` and `B`, so only
/// box corners matter there; along `α` the endpoints, a dense grid and the
/// analytic extrema `α = atan2(A, B) + kπ` are checked.
fn scale_extremes(a: Range, b: Range, alpha: Range) -> ((f64, Point), (f64, Point)) {
    let mut alphas: Vec<f64> = (0..=1024).map(|k| alpha.lo + (alpha.hi - alpha.lo) * k as f64 / 1024.0).collect();
    for &ca in &[a.lo, a.hi] {
        for &cb in &[b.lo, b.hi] {
            let base = ca.atan2(cb);
            for k in -4..=4 {
                let cand = base + k as f64 * PI;
                if cand >= alpha.lo && cand <= alpha.hi {
                    alphas.push(cand);
                }
            }
        }
    }
    let mut lo = (f64::INFINITY, (a.lo, b.lo, alpha.lo));
    let mut hi = (f64::NEG_INFINITY, (a.lo, b.lo, alpha.lo));
    for &al in &alphas {
        for &ca in &[a.lo, a.hi] {
            for &cb in &[b.lo, b.hi] {
                let s = lct_domain_scale(ca, cb, al);
                if s < lo.0 {
                    lo = (s, (ca, cb, al));
                }
                if s > hi.0 {
                    hi = (s, (ca, cb, al));
                }
            }
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> ChannelSpec {
        ChannelSpec::new(1.0, 1.0, 1.0).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn classic_values() {
        close(classic_capacity(&unit()).unwrap().bits_per_second, 1.0, 1e-15);
        let ch = ChannelSpec::new(3.0, 1.0, 1.0).unwrap();
        let c = classic_capacity(&ch).unwrap().bits_per_second;
        close(c, 1.2451124978365313, 1e-12);
        close(c, 2.0 * 3.0 * classic_per_transmission(&ch).unwrap().bits_per_second, 1e-12);
        let tiny = ChannelSpec::new(1.0, 1e-300, 1.0).unwrap();
        assert!(classic_capacity(&tiny).unwrap().bits_per_second < 1e-290);
    }

    #[test]
    fn theorem1_values() {
        let f = theorem1_capacity(&unit(), 1.0).unwrap();
        assert_eq!(f.signal_band.bits_per_second, classic_capacity(&unit()).unwrap().bits_per_second);
        close(theorem1_capacity(&unit(), 2.0).unwrap().signal_band.bits_per_second, 0.5, 1e-15);
        let f = theorem1_capacity(&unit(), 0.5).unwrap();
        close(f.channel_band.bits_per_second, 3f64.log2(), 1e-12);
        assert!(f.channel_band.bits_per_second > 1.0);
        assert!(theorem1_capacity(&unit(), 0.0).is_err());
    }

    #[test]
    fn theorem2_values() {
        let f = theorem2_capacity(&unit(), 1.0).unwrap();
        assert_eq!(f.signal_band.bits_per_second, classic_capacity(&unit()).unwrap().bits_per_second);
        close(theorem2_capacity(&unit(), 2.0).unwrap().signal_band.bits_per_second, 2.0, 1e-15);
        let f = theorem2_capacity(&unit(), 3.0).unwrap();
        close(f.channel_band.bits_per_second, 2.0, 1e-12);
        close(f.signal_band.bits_per_second, 3.0, 1e-12);
        assert!(theorem2_capacity(&unit(), 0.0).is_err());
    }

    #[test]
    fn theorem3_values() {
        let c = |w: f64, t: f64| theorem3_capacity(&ChannelSpec::new(w, 1.0, 1.0).unwrap().with_block(t).unwrap());
        close(c(1.0, 0.5).unwrap().signal_band.bits_per_second, 1.0, 1e-15);
        close(c(1.0, 1.0).unwrap().signal_band.bits_per_second, 2.0, 1e-15);
        for &w in &[1.0, 1.5, 2.5, 10.0] {
            for &t in &[0.5, 1.0, 3.7, 40.0] {
                let f = c(w, t).unwrap();
                let (x, y) = (f.signal_band.bits_per_second, f.channel_band.bits_per_second);
                assert!((x - y).abs() <= 1e-12 * x, "{w} {t}");
            }
        }
        assert!(theorem3_capacity(&unit()).is_err());
        assert!(ChannelSpec::new(1.0, 1.0, 1.0).unwrap().with_block(0.2).is_err());
    }

    #[test]
    fn lct_domain_values() {
        close(lct_domain_capacity(1.0, 1.0, 1.0, 7.0, 1.0, 0.0).unwrap().bits_per_second, 1.0, 1e-15);
        let r = lct_domain_capacity(1.0, 1.0, 1.0, 2.0, -5.0, PI / 2.0).unwrap();
        close(r.bits_per_second, 0.5 * 3f64.log2(), 1e-12);
        assert_eq!(r.diagnostics["transmission_rate"], 1.0);
        assert!(lct_domain_capacity(1.0, 1.0, 1.0, 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn lct_domain_large_s_tends_to_zero() {
        let mut prev = f64::INFINITY;
        for k in 0..12 {
            let s = 10f64.powi(k);
            let c = lct_domain_capacity(1.0, 1.0, 1.0, 0.0, s, 0.0).unwrap().bits_per_second;
            assert!(c < prev);
            prev = c;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn lct_domain_depends_only_on_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let big_a = rng.random_range(0.1..5.0);
            let other = rng.random_range(-5.0..5.0);
            let x = lct_domain_capacity(1.3, 2.0, 0.7, big_a, other, PI / 2.0).unwrap();
            let y = lct_domain_capacity(1.3, 2.0, 0.7, other, big_a, 0.0).unwrap();
            assert_eq!(x.bits_per_second, y.bits_per_second);
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn limits() {
        close(shannon_limits(LimitKind::Theorem1 { b: 1.0 }).unwrap(), 0.693147, 1e-6);
        close(shannon_limits(LimitKind::Theorem2 { a: 1.0 }).unwrap(), 0.693147, 1e-6);
        close(shannon_limits(LimitKind::InfiniteBandwidth { p: 1.0, eta: 1.0 }).unwrap(), 1.4427, 1e-4);
        assert!(shannon_limits(LimitKind::Theorem1 { b: 0.0 }).is_err());
        assert!(shannon_limits(LimitKind::Theorem2 { a: 0.0 }).is_err());
    }

    #[test]
    fn residual_values() {
        assert_eq!(stationarity_residual(0.0).unwrap(), 0.0);
        close(stationarity_residual(1.0).unwrap(), LN_2 - 0.5, 1e-15);
        close(stationarity_residual(1.0).unwrap(), 0.1931, 1e-4);
        for k in 0..=80 {
            let x = 10f64.powf(-4.0 + k as f64 * 0.1);
            assert!(stationarity_residual(x).unwrap() > 0.0, "{x}");
        }
        assert!(stationarity_residual(-1.0).is_err());
    }

    #[test]
    fn residual_derivative() {
        for k in 1..=10 {
            let x = k as f64 * 0.7;
            let h = 1e-5;
            let fd = (stationarity_residual(x + h).unwrap() - stationarity_residual(x - h).unwrap()) / (2.0 * h);
            let exact = x / ((1.0 + x) * (1.0 + x));
            assert!(fd > 0.0);
            close(fd, exact, 1e-8);
        }
    }

    #[test]
    fn optimizer_reports_monotone_wideband() {
        let t = OptimizeTarget::WidebandOverB { w: 1.0, p: 1.0, eta: 1.0, b_range: Range::new(0.01, 100.0).unwrap() };
        let r = optimize_capacity(&t).unwrap();
        assert_eq!(r.variant, Variant::Monotone);
        assert_eq!(r.diagnostics["note"], "monotone in B");
        let exact = 100.0 * (1.01f64).log2();
        assert!((r.bits_per_second - exact).abs() <= 0.01 * exact);
        close(r.bits_per_second, 1.4355, 1e-4);
        assert_eq!(r.params["b"], 100.0);
    }

    #[test]
    fn optimizer_degenerate_range() {
        let t = OptimizeTarget::WidebandOverB { w: 1.0, p: 1.0, eta: 1.0, b_range: Range::new(2.0, 2.0).unwrap() };
        let r = optimize_capacity(&t).unwrap();
        assert_eq!(r.diagnostics["note"], "degenerate-range");
        assert_eq!(r.bits_per_second, wideband_capacity(1.0, 1.0, 1.0, 2.0).unwrap().bits_per_second);
    }

    #[test]
    fn optimizer_lct_domain_picks_smallest_s() {
        let t = OptimizeTarget::LctDomainOverParams {
            w_m: 1.0,
            p: 1.0,
            eta: 1.0,
            a_range: Range::new(0.5, 2.0).unwrap(),
            b_range: Range::new(0.5, 2.0).unwrap(),
            alpha_range: Range::new(0.0, PI / 2.0).unwrap(),
        };
        let r = optimize_capacity(&t).unwrap();
        assert_eq!(r.variant, Variant::Monotone);
        close(r.params["s"], 0.5, 1e-12);
        let bad = OptimizeTarget::LctDomainOverParams {
            w_m: 1.0,
            p: 1.0,
            eta: 1.0,
            a_range: Range::new(-1.0, 1.0).unwrap(),
            b_range: Range::new(0.5, 2.0).unwrap(),
            alpha_range: Range::new(0.0, PI).unwrap(),
        };
        assert!(optimize_capacity(&bad).is_err());
    }

    #[test]
    fn solver_finds_planted_root() {
        // Objective x·e^{−x/3} peaks at x = 3; its derivative carries the sign.
        let residual = |x: f64| (1.0 - x / 3.0) * (-x / 3.0).exp();
        match find_stationary_point(residual, 0.01, 100.0).unwrap() {
            Stationary::Interior(x) => close(x, 3.0, 1e-8),
            other => panic!("{other:?}"),
        }
        let planted = std::f64::consts::E.powf(1.234);
        match find_stationary_point(|x: f64| (x / planted).ln(), 1e-3, 1e3).unwrap() {
            Stationary::Interior(x) => close(x, planted, 1e-8),
            other => panic!("{other:?}"),
        }
        assert_eq!(find_stationary_point(|_| 1.0, 1.0, 1.0).unwrap(), Stationary::Degenerate);
        assert_eq!(find_stationary_point(|_| -1.0, 1.0, 2.0).unwrap(), Stationary::Monotone { increasing: false });
        assert!(find_stationary_point(|_| f64::NAN, 1.0, 2.0).is_err());
        assert!(find_stationary_point(|_| 1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn capacity_monotone_in_bandwidth() {
        let mut prev = 0.0;
        for k in 1..=200 {
            let w = k as f64 * 0.05;
            let c = classic_capacity(&ChannelSpec::new(w, 1.0, 1.0).unwrap()).unwrap().bits_per_second;
            assert!(c > prev);
            prev = c;
        }
        let mut prev = 0.0;
        for k in 0..=120 {
            let b = 10f64.powf(-3.0 + k as f64 * 0.05);
            let c = wideband_capacity(1.0, 1.0, 1.0, b).unwrap().bits_per_second;
            assert!(c > prev, "{b}");
            prev = c;
        }
    }

    #[test]
    fn wideband_limit() {
        // ηWB/P = 10⁴.
        let c = wideband_capacity(1.0, 1.0, 1.0, 1e4).unwrap().bits_per_second;
        let limit = shannon_limits(LimitKind::InfiniteBandwidth { p: 1.0, eta: 1.0 }).unwrap();
        let corrected = limit * (1.0 - 0.5e-4);
        assert!((c - corrected).abs() <= 1e-4 * corrected);
        assert!((c - limit).abs() <= 1e-3 * limit);
    }

    #[test]
    fn report_json() {
        let r = lct_domain_capacity(1.0, 1.0, 1.0, 2.0, 0.0, PI / 2.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["variant"], "lct_domain");
        assert_eq!(v["params"]["s"], 2.0);
        let back: CapacityReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn spec_metadata() {
        let ch = unit().with_block(2.0).unwrap().with_source_rate(3.0).unwrap();
        assert_eq!(ch.n_symbols(), Some(4.0));
        assert_eq!(ch.k_messages(), Some(64.0));
        assert!(ChannelSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(ChannelSpec::new(1.0, -1.0, 1.0).is_err());
    }

    fn spec_strategy() -> impl Strategy<Value = ChannelSpec> {
        (0.01f64..100.0, 0.01f64..100.0, 0.01f64..10.0).prop_map(|(w, p, e)| ChannelSpec::new(w, p, e).unwrap())
    }

    proptest! {
        #[test]
        fn unit_parameters_reduce_to_classic(ch in spec_strategy()) {
            let c = classic_capacity(&ch).unwrap().bits_per_second;
            prop_assert_eq!(theorem1_capacity(&ch, 1.0).unwrap().signal_band.bits_per_second, c);
            prop_assert_eq!(theorem2_capacity(&ch, 1.0).unwrap().signal_band.bits_per_second, c);
        }

        #[test]
        fn channel_band_is_signal_band_at_new_width(ch in spec_strategy(), b in 0.05f64..20.0) {
            let t1 = theorem1_capacity(&ch, b).unwrap();
            let moved = ChannelSpec::new(ch.w * b, ch.p, ch.eta).unwrap();
            prop_assert_eq!(t1.channel_band.bits_per_second, theorem1_capacity(&moved, b).unwrap().signal_band.bits_per_second);
            prop_assert_eq!(
                wideband_capacity(ch.w, ch.p, ch.eta, b).unwrap().bits_per_second,
                classic_capacity(&moved).unwrap().bits_per_second
            );
        }

        #[test]
        fn capacities_are_finite_and_nonnegative(ch in spec_strategy(), x in 0.05f64..20.0, t in 1.0f64..50.0) {
            let ch3 = ch.with_block(t / ch.w).unwrap();
            for v in [
                classic_capacity(&ch).unwrap().bits_per_second,
                theorem1_capacity(&ch, x).unwrap().channel_band.bits_per_second,
                theorem2_capacity(&ch, x).unwrap().channel_band.bits_per_second,
                theorem3_capacity(&ch3).unwrap().signal_band.bits_per_second,
                lct_domain_capacity(ch.w, ch.p, ch.eta, x, 0.0, PI / 2.0).unwrap().bits_per_second,
            ] {
                prop_assert!(v.is_finite() && v >= 0.0);
            }
        }
    }
}
