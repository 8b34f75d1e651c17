//! Effective bandwidth and effective LCT-domain support.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::LctMatrix;
use crate::signal::{dft_spectrum, SampledSignal};
use crate::transform::{lct_forward, B_ZERO_THRESHOLD};

pub const DEFAULT_FRACTION: f64 = 0.99;

/// Which axis a support measurement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Time,
    Frequency,
    Lct(LctMatrix),
}

/// One-sided extent `w_eff` of the smallest symmetric interval `[−w, w]`
/// holding at least `fraction` of the energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub w_eff: f64,
    pub fraction: f64,
    pub domain_tag: DomainTag,
}

impl SupportReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("support report serializes")
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::param("fraction", format!("must lie in (0, 1), got {fraction}")));
    }
    Ok(())
}

/// Smallest `w` such that samples with `|position·scale| ≤ w` carry at least
/// `fraction` of the energy.
fn symmetric_extent(x: &SampledSignal, fraction: f64, scale: f64) -> Result<f64> {
    let mut cells: Vec<(f64, f64)> =
        x.samples().iter().enumerate().map(|(k, z)| ((x.time(k) * scale).abs(), z.norm_sqr())).collect();
    let total: f64 = cells.iter().map(|c| c.1).sum();
    if total == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    cells.sort_by(|p, q| p.0.total_cmp(&q.0));
    let target = fraction * total;
    let mut acc = 0.0;
    for (pos, e) in &cells {
        acc += e;
        if acc >= target {
            return Ok(*pos);
        }
    }
    Ok(cells.last().map_or(0.0, |c| c.0))
}

/// Time-domain effective support of `x`.
pub fn effective_time_support(x: &SampledSignal, fraction: f64) -> Result<SupportReport> {
    check_fraction(fraction)?;
    let w_eff = symmetric_extent(x, fraction, 1.0)?;
    Ok(SupportReport { w_eff, fraction, domain_tag: DomainTag::Time })
}

/// Effective bandwidth in Hz, measured on the centered DFT spectrum.
pub fn effective_bandwidth(x: &SampledSignal, fraction: f64) -> Result<SupportReport> {
    check_fraction(fraction)?;
    let spectrum = dft_spectrum(x)?;
    let w_eff = symmetric_extent(&spectrum, fraction, 1.0)?;
    Ok(SupportReport { w_eff, fraction, domain_tag: DomainTag::Frequency })
}

/// Effective support of the LCT of `f` under `m`.
///
/// For `b ≠ 0` the result is in cycles, `u/(2π)`, the unit in which an
/// A = 0 matrix maps a W-Hz band onto `[−W·B, W·B]`. For `b = 0` the output
/// axis is a rescaled time axis and is reported as is.
pub fn effective_lct_support(f: &SampledSignal, m: &LctMatrix, fraction: f64) -> Result<SupportReport> {
    check_fraction(fraction)?;
    let out = lct_forward(f, m)?;
    let scale = if m.b().abs() <= B_ZERO_THRESHOLD { 1.0 } else { 1.0 / (2.0 * PI) };
    let w_eff = symmetric_extent(&out, fraction, scale)?;
    Ok(SupportReport { w_eff, fraction, domain_tag: DomainTag::Lct(*m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::sinc;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn long_sinc() -> SampledSignal {
        SampledSignal::centered(16384, 1.0 / 8.0, |t| c(sinc(2.0 * t))).unwrap()
    }

    #[test]
    fn sinc_bandwidth() {
        let r = effective_bandwidth(&long_sinc(), DEFAULT_FRACTION).unwrap();
        assert!((0.95..=1.05).contains(&r.w_eff), "{}", r.w_eff);
        assert_eq!(r.domain_tag, DomainTag::Frequency);
    }

    #[test]
    fn gaussian_bandwidth() {
        // Energy density ∝ exp(−4π²f²): 99% band at σ·z₀.₉₉₅ with σ = 1/(2π√2).
        let x = SampledSignal::centered(8192, 1.0 / 16.0, |t| c((-t * t / 2.0).exp())).unwrap();
        let r = effective_bandwidth(&x, 0.99).unwrap();
        let df = 1.0 / (8192.0 / 16.0);
        assert!((r.w_eff - 0.2898826437025838).abs() <= df, "{}", r.w_eff);
    }

    #[test]
    fn tone_bandwidth() {
        let x = SampledSignal::centered(1024, 1.0 / 16.0, |t| c((2.0 * PI * t).cos())).unwrap();
        let r = effective_bandwidth(&x, 0.99).unwrap();
        assert!((r.w_eff - 1.0).abs() <= 1.0 / 64.0);
    }

    #[test]
    fn rejects_bad_input() {
        let x = long_sinc();
        assert!(effective_bandwidth(&x, 1.0).is_err());
        assert!(effective_bandwidth(&x, 0.0).is_err());
        let z = SampledSignal::zeros(0.0, 0.1, 64).unwrap();
        assert!(matches!(effective_bandwidth(&z, 0.5), Err(Error::ZeroEnergy)));
    }

    #[test]
    fn a_zero_support_is_wb() {
        let x = long_sinc();
        let m = LctMatrix::new(0.0, 2.0, -0.5, 1.3).unwrap();
        let r = effective_lct_support(&x, &m, 0.99).unwrap();
        assert!((r.w_eff - 2.0).abs() <= 0.1, "{}", r.w_eff);
    }

    #[test]
    fn theorem2_conventional_bandwidth() {
        let x = SampledSignal::centered(4096, 1.0 / 64.0, |t| c(sinc(2.0 * t) * (-t * t / 72.0).exp())).unwrap();
        let m = LctMatrix::theorem2(2.0, 0.4).unwrap();
        let out = lct_forward(&x, &m).unwrap();
        let r = effective_bandwidth(&out, 0.99).unwrap();
        assert!((r.w_eff - 0.5).abs() <= 0.025, "{}", r.w_eff);
    }

    #[test]
    fn identity_support_is_time_support() {
        let x = SampledSignal::centered(512, 0.05, |t| c((-t * t).exp())).unwrap();
        let a = effective_lct_support(&x, &LctMatrix::identity(), 0.9).unwrap();
        let b = effective_time_support(&x, 0.9).unwrap();
        assert_eq!(a.w_eff, b.w_eff);
    }

    #[test]
    fn json_shape() {
        let r = SupportReport { w_eff: 1.5, fraction: 0.99, domain_tag: DomainTag::Lct(LctMatrix::cft()) };
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["w_eff"], 1.5);
        assert_eq!(v["domain_tag"]["lct"][1], 1.0);
        let t = SupportReport { domain_tag: DomainTag::Time, ..r };
        assert_eq!(serde_json::from_str::<serde_json::Value>(&t.to_json()).unwrap()["domain_tag"], "time");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn support_monotone_in_fraction(p in 0.05f64..0.9, dq in 0.0f64..0.09, width in 0.2f64..2.0) {
            let x = SampledSignal::centered(512, 0.05, |t| c((-t * t / (width * width)).exp() * (1.0 + 0.5 * t))).unwrap();
            let lo = effective_bandwidth(&x, p).unwrap().w_eff;
            let hi = effective_bandwidth(&x, p + dq).unwrap().w_eff;
            prop_assert!(hi >= lo);
        }
    }
}
