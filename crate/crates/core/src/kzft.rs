//! Iterated moving-average (KZ) low-pass and KZFT bandpass filters.
//!
//! The KZ filter of window `m` (odd) iterated `k` times is the convolution
//! with the coefficients of `(1 + z + ... + z^(m-1))^k`, normalized by `m^k`.
//! Shifting its passband to a center frequency `nu` by modulating the kernel
//! with `exp(-i 2 pi nu u)` gives the KZFT bandpass filter. Coefficients are
//! kept as exact integers; floating normalization happens only when a filter
//! is applied.
//!
//! The complex output stored here is the *demodulated* (baseband) envelope:
//! the windowed sum is multiplied by `exp(-i 2 pi nu t_abs)` at the window
//! center `t_abs`. Real-signal reconstruction therefore remodulates:
//! `2 * Re(exp(+i 2 pi nu t_abs) * z(t))` for `nu > 0`, and plain `Re(z(t))`
//! for the DC band, which has no conjugate twin to fold back.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// How to treat output positions whose window does not fully fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeMode {
    /// Emit output only where the full window fits (length `n - k(m-1)`).
    #[default]
    Valid,
    /// Emit full-length output; partial windows are renormalized by the
    /// in-range response at the center frequency, so passband gain stays 1
    /// at every position. At `nu = 0` this is exactly division by the sum
    /// of in-range coefficients. Edge values carry extra noise and stopband
    /// leakage relative to full windows.
    Renormalized,
}

/// Exact coefficients of `(1 + z + ... + z^(m-1))^k`, length `k(m-1)+1`.
///
/// Computed by iterated sliding-window sums (convolution with the all-ones
/// vector) in checked 128-bit arithmetic, so results are exact or the call
/// fails loudly.
pub fn kz_coefficients(m: usize, k: usize) -> Result<Vec<u128>> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "window length m must be a positive odd integer, got {m}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("iteration count k must be >= 1".into()));
    }
    let overflow = || Error::CoefficientOverflow { m, k };
    let mut coeffs: Vec<u128> = vec![1];
    for _ in 0..k {
        // Convolve with ones(m): out[i] = sum of coeffs[i-m+1 ..= i].
        let out_len = coeffs.len() + m - 1;
        let mut out = vec![0u128; out_len];
        let mut window: u128 = 0;
        for i in 0..out_len {
            if i < coeffs.len() {
                window = window.checked_add(coeffs[i]).ok_or_else(overflow)?;
            }
            if i >= m {
                window -= coeffs[i - m];
            }
            out[i] = window;
        }
        coeffs = out;
    }
    Ok(coeffs)
}

/// A bandpass filter plan: window `m`, iterations `k`, center frequency `nu`,
/// and the exact coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KZFTPlan {
    pub m: usize,
    pub k: usize,
    pub nu: f64,
    /// Coefficients `a_u` for `u = -k(m-1)/2 ..= k(m-1)/2`, exact.
    pub coefficients: Vec<u128>,
    /// `m^k`, the sum of the coefficients.
    pub normalizer: u128,
}

impl KZFTPlan {
    pub fn new(m: usize, k: usize, nu: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&nu) {
            return Err(Error::InvalidParameter(format!(
                "center frequency nu must lie in [0, 1/2], got {nu}"
            )));
        }
        let coefficients = kz_coefficients(m, k)?;
        let normalizer = (m as u128)
            .checked_pow(k as u32)
            .ok_or(Error::CoefficientOverflow { m, k })?;
        debug_assert_eq!(coefficients.iter().sum::<u128>(), normalizer);
        Ok(Self {
            m,
            k,
            nu,
            coefficients,
            normalizer,
        })
    }

    /// Half-width of the filter window: `k(m-1)/2`.
    pub fn half_width(&self) -> usize {
        self.k * (self.m - 1) / 2
    }

    /// Minimum series length this plan can be applied to in valid mode.
    pub fn min_input_len(&self) -> usize {
        self.k * (self.m - 1) + 1
    }
}

/// Output of [`kzft_apply`]: the baseband complex envelope over the valid
/// support plus the reconstructed real series.
#[derive(Debug, Clone)]
pub struct FilteredComponent {
    /// Demodulated complex values, one per supported output position.
    pub complex_series: Vec<Complex64>,
    /// Absolute sample index of the first output value.
    pub valid_from: usize,
    /// Absolute sample index of the last output value.
    pub valid_to: usize,
    pub plan: KZFTPlan,
    /// Real-valued reconstruction over the same support.
    pub real_series: TimeSeries,
}

/// Apply a KZFT plan to a series.
pub fn kzft_apply(series: &TimeSeries, plan: &KZFTPlan, edge: EdgeMode) -> Result<FilteredComponent> {
    let n = series.len();
    if n < plan.min_input_len() {
        return Err(Error::InsufficientData {
            required: plan.min_input_len(),
            actual: n,
        });
    }
    let h = plan.half_width();
    let width = 2 * h + 1;
    let norm = plan.normalizer as f64;

    // Complex kernel w[u+h] = a_u * exp(-i 2 pi nu u), unnormalized.
    let kernel: Vec<Complex64> = plan
        .coefficients
        .iter()
        .enumerate()
        .map(|(idx, &a)| {
            let u = idx as f64 - h as f64;
            Complex64::from_polar(a as f64, -TAU * plan.nu * u)
        })
        .collect();

    // Prefix sums of coefficients for per-edge renormalization. Dividing a
    // truncated window by its in-range coefficient sum keeps the passband
    // gain at 1: the modulation cancels against a center-frequency tone, so
    // the tone's response is exactly that sum.
    let prefix: Vec<u128> = {
        let mut acc = 0u128;
        let mut p = Vec::with_capacity(width + 1);
        p.push(0);
        for &a in &plan.coefficients {
            acc += a;
            p.push(acc);
        }
        p
    };

    let x = &series.values;
    let (first_center, last_center) = match edge {
        EdgeMode::Valid => (h, n - 1 - h),
        EdgeMode::Renormalized => (0, n - 1),
    };

    let mut complex_series = Vec::with_capacity(last_center - first_center + 1);
    for t in first_center..=last_center {
        let lo = t.saturating_sub(h); // input index of the first in-range tap
        let hi = (t + h).min(n - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in lo..=hi {
            acc += kernel[s + h - t] * x[s];
        }
        let scale = match edge {
            EdgeMode::Valid => norm,
            EdgeMode::Renormalized => {
                let k_lo = lo + h - t;
                let k_hi = hi + h - t;
                (prefix[k_hi + 1] - prefix[k_lo]) as f64
            }
        };
        let y = acc / scale;
        // Demodulate to baseband at the absolute center index.
        let t_abs = (series.origin_index + t) as f64;
        complex_series.push(y * Complex64::from_polar(1.0, -TAU * plan.nu * t_abs));
    }

    let valid_from = series.origin_index + first_center;
    let valid_to = series.origin_index + last_center;
    let origin_label = series.label_of(first_center);
    let real_series = reconstruct_real_parts(
        &complex_series,
        plan.nu,
        valid_from,
        origin_label,
    )?;

    Ok(FilteredComponent {
        complex_series,
        valid_from,
        valid_to,
        plan: plan.clone(),
        real_series,
    })
}

fn reconstruct_real_parts(
    complex_series: &[Complex64],
    nu: f64,
    valid_from: usize,
    origin_label: Option<chrono::NaiveDate>,
) -> Result<TimeSeries> {
    let values: Vec<f64> = complex_series
        .iter()
        .enumerate()
        .map(|(t, z)| {
            if nu > 0.0 {
                let t_abs = (valid_from + t) as f64;
                2.0 * (Complex64::from_polar(1.0, TAU * nu * t_abs) * z).re
            } else {
                z.re
            }
        })
        .collect();
    TimeSeries::with_origin(values, valid_from, origin_label)
}

/// Rebuild the real-valued series from a filtered component's baseband
/// envelope: `2 Re(exp(+i 2 pi nu t_abs) z(t))` for `nu > 0`, `Re(z)` at DC.
pub fn reconstruct_real(fc: &FilteredComponent) -> TimeSeries {
    fc.real_series.clone()
}

/// KZ low-pass: the `nu = 0` case of the KZFT filter.
pub fn kz_lowpass(series: &TimeSeries, m: usize, k: usize, edge: EdgeMode) -> Result<TimeSeries> {
    let plan = KZFTPlan::new(m, k, 0.0)?;
    Ok(kzft_apply(series, &plan, edge)?.real_series)
}

/// An exact frequency `num/den` in cycles per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub num: u64,
    pub den: u64,
}

impl Frequency {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("frequency denominator must be nonzero".into()));
        }
        Ok(Self { num, den })
    }

    pub const ZERO: Frequency = Frequency { num: 0, den: 1 };

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn equals(&self, other: &Frequency) -> bool {
        (self.num as u128) * (other.den as u128) == (other.num as u128) * (self.den as u128)
    }

    /// |self - other| as an exact ratio.
    fn abs_diff(&self, other: &Frequency) -> (u128, u128) {
        let a = (self.num as u128) * (other.den as u128);
        let b = (other.num as u128) * (self.den as u128);
        (a.abs_diff(b), (self.den as u128) * (other.den as u128))
    }
}

impl std::fmt::Display for Frequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Choose the filter window for isolating `target` from `others`.
///
/// The gap `delta` is the smallest exact distance from `target` to any
/// frequency in `others` plus frequency zero (so trend/DC content is always
/// excluded from the passband). The window is the smallest odd integer
/// strictly greater than `2 / delta`; with `k = 1` this requires at least
/// `m` observations.
pub fn select_bandwidth(target: Frequency, others: &[Frequency], n: usize) -> Result<usize> {
    let mut min_diff: Option<(u128, u128)> = None;
    for other in others.iter().chain(std::iter::once(&Frequency::ZERO)) {
        if other.equals(&target) {
            return Err(Error::DuplicateFrequency {
                frequency: target.to_string(),
            });
        }
        let d = target.abs_diff(other);
        let smaller = match min_diff {
            None => true,
            Some(best) => d.0 * best.1 < best.0 * d.1,
        };
        if smaller {
            min_diff = Some(d);
        }
    }
    let (dn, dd) = min_diff.expect("exclusion set always contains frequency zero");
    // 2/delta = 2*dd/dn; smallest odd integer strictly greater than it.
    let floor = (2 * dd) / dn;
    let next = floor + 1;
    let m = if next % 2 == 1 { next } else { next + 1 };
    let m = usize::try_from(m).map_err(|_| Error::InvalidParameter("window length overflow".into()))?;
    if m > n {
        return Err(Error::InfeasibleBandwidth {
            frequency: target.to_string(),
            required_m: m,
            min_n: m,
            n,
        });
    }
    Ok(m)
}
