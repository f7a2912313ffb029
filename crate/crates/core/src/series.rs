//! Sampled time series with phase bookkeeping.
//!
//! A [`TimeSeries`] is a regularly sampled real-valued sequence (one sample
//! per day for the target data). `origin_index` is the absolute index of the
//! first stored sample, so the phase of a sample with respect to any period
//! survives trimming: dropping `w` leading samples bumps `origin_index` by
//! `w` and every kept sample keeps its phase.

use crate::error::{Error, Result};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Phase of absolute sample index `t_abs` within a cycle of length `period`.
pub fn phase_of_abs(t_abs: usize, period: usize) -> Result<usize> {
    if period == 0 {
        return Err(Error::InvalidPeriod);
    }
    Ok(t_abs % period)
}

/// A validated, finite, regularly sampled series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    /// Absolute sample index of `values[0]`.
    pub origin_index: usize,
    /// Calendar date of `values[0]`, when known.
    pub origin_label: Option<NaiveDate>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    /// Build a series anchored at absolute index 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_origin(values, 0, None)
    }

    pub fn with_origin(
        values: Vec<f64>,
        origin_index: usize,
        origin_label: Option<NaiveDate>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index, value });
        }
        Ok(Self {
            origin_index,
            origin_label,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Phase of local sample `t` for the given period: `(origin_index + t) mod P`.
    pub fn phase_of(&self, t: usize, period: usize) -> Result<usize> {
        phase_of_abs(self.origin_index + t, period)
    }

    /// Subsequence `from..=to` with the origin advanced so phases are stable.
    pub fn trim(&self, from: usize, to: usize) -> Result<TimeSeries> {
        if from > to || to >= self.len() {
            return Err(Error::TrimOutOfBounds {
                from,
                to,
                len: self.len(),
            });
        }
        Ok(TimeSeries {
            origin_index: self.origin_index + from,
            origin_label: self.origin_label.map(|d| d + chrono::Days::new(from as u64)),
            values: self.values[from..=to].to_vec(),
        })
    }

    /// Calendar date of local sample `t`, when the series carries a label.
    pub fn label_of(&self, t: usize) -> Option<NaiveDate> {
        self.origin_label.map(|d| d + chrono::Days::new(t as u64))
    }

    /// Date of the first sample in this series whose phase is `phase`.
    ///
    /// Used to attach calendar labels to per-phase curves.
    pub fn label_of_phase(&self, phase: usize, period: usize) -> Option<NaiveDate> {
        let offset = (period + phase - self.origin_index % period) % period;
        self.label_of(offset)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: TimeSeries = serde_json::from_str(text)?;
        // Re-validate: hand-edited files may contain NaN or be empty.
        TimeSeries::with_origin(parsed.values, parsed.origin_index, parsed.origin_label)
    }
}

/// A periodic component: fundamental period `P` and harmonic index `j`,
/// i.e. frequency `j/P` cycles per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub fundamental_period: usize,
    pub harmonic: usize,
}

impl ComponentSpec {
    pub fn new(fundamental_period: usize, harmonic: usize) -> Result<Self> {
        if fundamental_period == 0 {
            return Err(Error::InvalidPeriod);
        }
        if harmonic == 0 {
            return Err(Error::InvalidParameter("harmonic index must be >= 1".into()));
        }
        let spec = Self {
            fundamental_period,
            harmonic,
        };
        if spec.frequency() > 0.5 {
            return Err(Error::InvalidParameter(format!(
                "frequency {}/{} exceeds the Nyquist bound 1/2",
                harmonic, fundamental_period
            )));
        }
        Ok(spec)
    }

    pub fn fundamental(period: usize) -> Result<Self> {
        Self::new(period, 1)
    }

    /// Frequency in cycles per sample.
    pub fn frequency(&self) -> f64 {
        self.harmonic as f64 / self.fundamental_period as f64
    }

    /// Frequency as an exact ratio (harmonic, fundamental_period).
    pub fn frequency_ratio(&self) -> (u64, u64) {
        (self.harmonic as u64, self.fundamental_period as u64)
    }

    /// Block length used when bootstrapping this component's filtered series.
    ///
    /// Fixed to the fundamental period: a P-long block preserves correlation
    /// at every harmonic lag, and P/j is not an integer when j does not
    /// divide P.
    pub fn block_period(&self) -> usize {
        self.fundamental_period
    }

    /// The component's own cycle length rounded to the nearest integer
    /// sample count: `round(P / j)`.
    ///
    /// This is the period at which the *unfiltered* series is folded and
    /// block-bootstrapped when the component is examined without bandpass
    /// filtering, so that the resulting band describes this component's
    /// cycle rather than the fundamental's.
    pub fn own_period(&self) -> usize {
        (2 * self.fundamental_period + self.harmonic) / (2 * self.harmonic)
    }

    /// `"j/P"` display form, e.g. `"2/365"`.
    pub fn frequency_label(&self) -> String {
        format!("{}/{}", self.harmonic, self.fundamental_period)
    }
}

impl std::fmt::Display for ComponentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.harmonic == 1 {
            write!(f, "period {}", self.fundamental_period)
        } else {
            write!(
                f,
                "harmonic {} of period {}",
                self.harmonic, self.fundamental_period
            )
        }
    }
}

/// Which resampling pipeline produced a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "PBB")]
    Pbb,
    #[serde(rename = "VBPBB")]
    Vbpbb,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Pbb => write!(f, "PBB"),
            Method::Vbpbb => write!(f, "VBPBB"),
        }
    }
}

/// Per-phase confidence envelope for a periodic mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CIBand {
    /// Cycle length of the band (number of phases).
    pub period: usize,
    /// Confidence complement: the band covers 1 - alpha.
    pub alpha: f64,
    pub lower: Vec<f64>,
    pub median: Vec<f64>,
    pub upper: Vec<f64>,
    pub component: ComponentSpec,
    pub method: Method,
}

impl CIBand {
    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.period
            || self.median.len() != self.period
            || self.upper.len() != self.period
        {
            return Err(Error::IncompatibleEnsembles(
                "band curves do not match the stated period".into(),
            ));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        for phase in 0..self.period {
            let (lo, md, up) = (self.lower[phase], self.median[phase], self.upper[phase]);
            if !(lo.is_finite() && md.is_finite() && up.is_finite()) || lo > md || md > up {
                return Err(Error::IncompatibleEnsembles(format!(
                    "band curves not ordered/finite at phase {phase}"
                )));
            }
        }
        Ok(())
    }

    /// Per-phase widths `upper - lower`.
    pub fn widths(&self) -> Vec<f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| u - l)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_of_identity_case() {
        let s = TimeSeries::new(vec![0.0; 10]).unwrap();
        assert_eq!(s.phase_of(0, 7).unwrap(), 0);
    }

    #[test]
    fn phase_of_modular() {
        let s = TimeSeries::new(vec![0.0; 10]).unwrap();
        assert_eq!(s.phase_of(9, 7).unwrap(), 2);
    }

    #[test]
    fn phase_of_full_cycle_offset() {
        let s = TimeSeries::with_origin(vec![0.0; 10], 365, None).unwrap();
        assert_eq!(s.phase_of(0, 365).unwrap(), 0);
    }

    #[test]
    fn phase_of_zero_period_rejected() {
        let s = TimeSeries::new(vec![0.0; 3]).unwrap();
        assert!(matches!(s.phase_of(0, 0), Err(Error::InvalidPeriod)));
    }

    #[test]
    fn trim_slicing() {
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = s.trim(1, 2).unwrap();
        assert_eq!(t.values, vec![2.0, 3.0]);
        assert_eq!(t.origin_index, 1);
    }

    #[test]
    fn trim_identity() {
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.trim(0, 2).unwrap(), s);
    }

    #[test]
    fn trim_preserves_phase() {
        let s = TimeSeries::new((0..20).map(|v| v as f64).collect()).unwrap();
        let t = s.trim(5, 19).unwrap();
        // First kept sample is local index 5 of the original.
        assert_eq!(t.phase_of(0, 7).unwrap(), s.phase_of(5, 7).unwrap());
    }

    #[test]
    fn trim_out_of_range() {
        let s = TimeSeries::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(s.trim(0, 2), Err(Error::TrimOutOfBounds { .. })));
        assert!(matches!(s.trim(1, 0), Err(Error::TrimOutOfBounds { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            TimeSeries::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteSample { index: 1, .. })
        ));
        assert!(TimeSeries::new(vec![]).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = TimeSeries::with_origin(
            vec![0.1, -2.5e-17, 3.0f64.sqrt(), 1.0 / 3.0],
            4,
            NaiveDate::from_ymd_opt(2020, 1, 22),
        )
        .unwrap();
        let text = s.to_json().unwrap();
        let back = TimeSeries::from_json(&text).unwrap();
        assert_eq!(back.origin_index, s.origin_index);
        assert_eq!(back.origin_label, s.origin_label);
        assert_eq!(back.values.len(), s.values.len());
        for (a, b) in back.values.iter().zip(&s.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn component_nyquist_bound() {
        assert!(ComponentSpec::new(7, 3).is_ok()); // 3/7 < 1/2
        assert!(ComponentSpec::new(7, 4).is_err()); // 4/7 > 1/2
        assert!(ComponentSpec::new(4, 2).is_ok()); // exactly 1/2
    }

    #[test]
    fn component_own_period_rounds_to_nearest() {
        let p = |j| ComponentSpec::new(365, j).unwrap().own_period();
        assert_eq!(p(1), 365);
        assert_eq!(p(2), 183); // 182.5 rounds up
        assert_eq!(p(3), 122); // 121.67
        assert_eq!(p(4), 91); // 91.25
        assert_eq!(p(5), 73); // exact
        assert_eq!(p(6), 61); // 60.83
        assert_eq!(ComponentSpec::new(7, 2).unwrap().own_period(), 4);
        assert_eq!(ComponentSpec::new(7, 3).unwrap().own_period(), 2);
    }

    #[test]
    fn label_of_phase_finds_first_occurrence() {
        let origin = NaiveDate::from_ymd_opt(2020, 1, 22).unwrap();
        let s = TimeSeries::with_origin(vec![0.0; 20], 3, Some(origin)).unwrap();
        // origin phase for P=7 is 3; phase 3 occurs at local t=0.
        assert_eq!(s.label_of_phase(3, 7), Some(origin));
        // phase 0 first occurs at local t=4.
        assert_eq!(
            s.label_of_phase(0, 7),
            Some(origin + chrono::Days::new(4))
        );
    }
}
