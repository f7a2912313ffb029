//! Periodic block bootstrap resampling, bootstrap ensembles of periodic
//! means, confidence bands, and the PBB / VBPBB pipelines.

use crate::error::{Error, Result};
use crate::kzft::{kzft_apply, select_bandwidth, EdgeMode, Frequency, KZFTPlan};
use crate::rng::{derive_seed, stream_rng};
use crate::series::{CIBand, ComponentSpec, Method, TimeSeries};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How resamples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleMode {
    /// Draw whole period-aligned blocks with replacement (preserves
    /// within-cycle correlation).
    #[default]
    Block,
    /// Draw each position independently from the samples sharing its phase.
    Phasewise,
}

/// Bootstrap parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of resamples.
    pub b: usize,
    /// Confidence complement; bands cover 1 - alpha.
    pub alpha: f64,
    /// Master seed; every stream in a run derives from it.
    pub seed: u64,
    pub resample_mode: ResampleMode,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            b: 10_000,
            alpha: 0.05,
            seed: 0,
            resample_mode: ResampleMode::Block,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidParameter("B must be >= 1".into()));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }
}

/// Per-phase sample counts for a series folded at `period`.
pub fn phase_counts(series: &TimeSeries, period: usize) -> Result<Vec<usize>> {
    if period == 0 {
        return Err(Error::InvalidPeriod);
    }
    let mut counts = vec![0usize; period];
    for t in 0..series.len() {
        counts[(series.origin_index + t) % period] += 1;
    }
    Ok(counts)
}

/// Phase-wise mean curve: `curve[phase]` is the mean of all samples whose
/// phase is `phase`. Every phase must be observed at least once.
pub fn periodic_mean(series: &TimeSeries, period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::InvalidPeriod);
    }
    let mut sums = vec![0.0f64; period];
    let mut counts = vec![0usize; period];
    for (t, &v) in series.values.iter().enumerate() {
        let phase = (series.origin_index + t) % period;
        sums[phase] += v;
        counts[phase] += 1;
    }
    for (phase, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::IncompleteCycle { phase, period });
        }
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect())
}

/// Precomputed resampling geometry for one (series, period) pair.
struct ResamplePool<'a> {
    x: &'a [f64],
    origin: usize,
    period: usize,
    /// Start of the first phase-0-aligned full block.
    lead: usize,
    /// Number of full blocks available.
    n_blocks: usize,
    /// Start of the fixed trailing partial block.
    tail_start: usize,
    /// Sample indices per phase (for phasewise draws).
    by_phase: Vec<Vec<usize>>,
}

impl<'a> ResamplePool<'a> {
    fn new(series: &'a TimeSeries, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidPeriod);
        }
        let n = series.len();
        let origin = series.origin_index;
        let lead = (period - origin % period) % period;
        if n < lead + period {
            return Err(Error::InsufficientCycles { period, n });
        }
        let n_blocks = (n - lead) / period;
        let tail_start = lead + n_blocks * period;
        let mut by_phase = vec![Vec::new(); period];
        for t in 0..n {
            by_phase[(origin + t) % period].push(t);
        }
        if let Some(phase) = by_phase.iter().position(|v| v.is_empty()) {
            return Err(Error::IncompleteCycle { phase, period });
        }
        Ok(Self {
            x: &series.values,
            origin,
            period,
            lead,
            n_blocks,
            tail_start,
            by_phase,
        })
    }

    fn draw_into(&self, mode: ResampleMode, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        out.clear();
        match mode {
            ResampleMode::Block => {
                out.extend_from_slice(&self.x[..self.lead]);
                for _ in 0..self.n_blocks {
                    let b = rng.gen_range(0..self.n_blocks as u64) as usize;
                    let start = self.lead + b * self.period;
                    out.extend_from_slice(&self.x[start..start + self.period]);
                }
                out.extend_from_slice(&self.x[self.tail_start..]);
            }
            ResampleMode::Phasewise => {
                for t in 0..self.x.len() {
                    let phase = (self.origin + t) % self.period;
                    let pool = &self.by_phase[phase];
                    let pick = rng.gen_range(0..pool.len() as u64) as usize;
                    out.push(self.x[pool[pick]]);
                }
            }
        }
    }
}

/// One bootstrap resample of the series with blocks of length `period`.
///
/// Block mode partitions the series into consecutive full blocks aligned to
/// phase 0; a leading partial segment and the trailing partial block are
/// kept fixed in every resample, so output length and phase alignment match
/// the input exactly.
pub fn pbb_resample(
    series: &TimeSeries,
    period: usize,
    mode: ResampleMode,
    rng: &mut ChaCha8Rng,
) -> Result<TimeSeries> {
    let pool = ResamplePool::new(series, period)?;
    let mut values = Vec::with_capacity(series.len());
    pool.draw_into(mode, rng, &mut values);
    Ok(TimeSeries {
        origin_index: series.origin_index,
        origin_label: series.origin_label,
        values,
    })
}

/// `B` bootstrapped periodic-mean curves over one cycle.
#[derive(Debug, Clone)]
pub struct PhaseMeanEnsemble {
    pub component: ComponentSpec,
    /// Fold/block period of the curves (usually the component's block
    /// period; the component's own rounded period for unfiltered folds).
    pub period: usize,
    /// Row-major `b x period` matrix of bootstrapped periodic means.
    pub curves: Vec<f64>,
    pub b: usize,
    /// Per-phase sample counts of the source series.
    pub phase_counts: Vec<usize>,
}

impl PhaseMeanEnsemble {
    pub fn row(&self, b: usize) -> &[f64] {
        &self.curves[b * self.period..(b + 1) * self.period]
    }

    /// Column of values at one phase across all resamples.
    pub fn phase_column(&self, phase: usize) -> Vec<f64> {
        (0..self.b)
            .map(|b| self.curves[b * self.period + phase])
            .collect()
    }
}

/// Stream tag for an ensemble, mixing the component identity and fold
/// period into the master seed. Deliberately independent of the method
/// (PBB vs VBPBB) so that the trivial `m = 1` bandpass reproduces PBB
/// draws exactly.
fn ensemble_seed(cfg: &BootstrapConfig, component: ComponentSpec, period: usize) -> u64 {
    let tag = (component.fundamental_period as u64)
        .wrapping_mul(0x0001_0000_0001)
        .wrapping_add((component.harmonic as u64) << 20)
        .wrapping_add(period as u64);
    derive_seed(cfg.seed, tag)
}

/// Generate the bootstrap ensemble of periodic means for `series` folded and
/// blocked at `period`.
///
/// Row `b` is the periodic mean of an independent resample whose stream is
/// derived deterministically from `(seed, component, period, b)`; results do
/// not depend on evaluation order or worker count.
pub fn bootstrap_ensemble_at_period(
    series: &TimeSeries,
    component: ComponentSpec,
    period: usize,
    cfg: &BootstrapConfig,
) -> Result<PhaseMeanEnsemble> {
    cfg.validate()?;
    let pool = ResamplePool::new(series, period)?;
    let counts = phase_counts(series, period)?;
    let stream_seed = ensemble_seed(cfg, component, period);
    let mode = cfg.resample_mode;

    let rows: Vec<Vec<f64>> = (0..cfg.b)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(stream_seed, b as u64);
            let mut scratch = Vec::with_capacity(series.len());
            pool.draw_into(mode, &mut rng, &mut scratch);
            let mut sums = vec![0.0f64; period];
            for (t, &v) in scratch.iter().enumerate() {
                sums[(pool.origin + t) % period] += v;
            }
            sums.iter()
                .zip(&counts)
                .map(|(s, &c)| s / c as f64)
                .collect()
        })
        .collect();

    let mut curves = Vec::with_capacity(cfg.b * period);
    for row in rows {
        curves.extend_from_slice(&row);
    }
    Ok(PhaseMeanEnsemble {
        component,
        period,
        curves,
        b: cfg.b,
        phase_counts: counts,
    })
}

/// Ensemble at the component's bootstrap block period (the fundamental).
pub fn bootstrap_ensemble(
    series: &TimeSeries,
    component: ComponentSpec,
    cfg: &BootstrapConfig,
) -> Result<PhaseMeanEnsemble> {
    bootstrap_ensemble_at_period(series, component, component.block_period(), cfg)
}

/// Interpolated order-statistic quantile at position `(len-1)*q + 1`
/// (1-indexed) of pre-sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (sorted.len() as f64 - 1.0) * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Interpolated quantile of unsorted data (sorts a copy).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    quantile_sorted(&v, q)
}

fn band_from_curves(
    ens: &PhaseMeanEnsemble,
    alpha: f64,
    method: Method,
) -> Result<CIBand> {
    if ens.b == 0 || ens.curves.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let period = ens.period;
    let bands: Vec<(f64, f64, f64)> = (0..period)
        .into_par_iter()
        .map(|phase| {
            let mut col = ens.phase_column(phase);
            col.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
            (
                quantile_sorted(&col, alpha / 2.0),
                quantile_sorted(&col, 0.5),
                quantile_sorted(&col, 1.0 - alpha / 2.0),
            )
        })
        .collect();
    let band = CIBand {
        period,
        alpha,
        lower: bands.iter().map(|t| t.0).collect(),
        median: bands.iter().map(|t| t.1).collect(),
        upper: bands.iter().map(|t| t.2).collect(),
        component: ens.component,
        method,
    };
    band.validate()?;
    Ok(band)
}

/// Per-phase empirical quantile envelope of an ensemble.
pub fn ci_band(ens: &PhaseMeanEnsemble, alpha: f64, method: Method) -> Result<CIBand> {
    band_from_curves(ens, alpha, method)
}

/// Element-wise sum of ensembles paired by resample index, then quantiles.
///
/// All ensembles must share `B` and the fold period and be phase-aligned to
/// the same origin.
pub fn combine_components(ensembles: &[&PhaseMeanEnsemble], alpha: f64) -> Result<CIBand> {
    let first = *ensembles
        .first()
        .ok_or(Error::EmptyEnsemble)?;
    for e in ensembles {
        if e.b != first.b {
            return Err(Error::IncompatibleEnsembles(format!(
                "resample counts differ: {} vs {}",
                e.b, first.b
            )));
        }
        if e.period != first.period {
            return Err(Error::IncompatibleEnsembles(format!(
                "fold periods differ: {} vs {}",
                e.period, first.period
            )));
        }
    }
    let mut combined = PhaseMeanEnsemble {
        component: ComponentSpec::new(first.period, 1)
            .unwrap_or(first.component),
        period: first.period,
        curves: vec![0.0; first.b * first.period],
        b: first.b,
        phase_counts: first.phase_counts.clone(),
    };
    for e in ensembles {
        for (acc, v) in combined.curves.iter_mut().zip(&e.curves) {
            *acc += v;
        }
    }
    band_from_curves(&combined, alpha, Method::Vbpbb)
}

/// Manual overrides for the VBPBB filtering stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct FilterOverrides {
    /// Force the window length instead of deriving it from the component
    /// set. `Some(1)` disables filtering entirely (the trivial case that
    /// reproduces PBB).
    pub m: Option<usize>,
    pub edge: EdgeMode,
}

/// Result of the plain periodic block bootstrap on the raw series.
#[derive(Debug, Clone)]
pub struct PbbOutcome {
    pub band: CIBand,
    pub ensemble: PhaseMeanEnsemble,
}

/// Result of the bandpass pipeline: filter plan, filtered series, ensemble,
/// and band.
#[derive(Debug, Clone)]
pub struct VbpbbOutcome {
    pub band: CIBand,
    pub ensemble: PhaseMeanEnsemble,
    pub plan: KZFTPlan,
    pub filtered: TimeSeries,
}

impl VbpbbOutcome {
    pub fn median_curve(&self) -> &[f64] {
        &self.band.median
    }
}

/// PBB: block-bootstrap the raw series at the component's own cycle length
/// and band the periodic means.
///
/// For a fundamental this is the component period itself. For a harmonic
/// `j > 1` the series is folded at `round(P/j)` so the band describes the
/// harmonic's own cycle; folding a harmonic at the fundamental period would
/// reproduce the fundamental's band instead.
pub fn pbb_pipeline(
    series: &TimeSeries,
    component: ComponentSpec,
    cfg: &BootstrapConfig,
) -> Result<PbbOutcome> {
    let period = component.own_period();
    let ensemble = bootstrap_ensemble_at_period(series, component, period, cfg)?;
    let band = ci_band(&ensemble, cfg.alpha, Method::Pbb)?;
    Ok(PbbOutcome { band, ensemble })
}

/// VBPBB: bandpass-filter the series around the component frequency, then
/// block-bootstrap the filtered series at the component's block period.
///
/// The window is the narrowest odd length that excludes every other
/// component frequency and DC, unless overridden. `m = 1` passes all
/// frequencies, so the pipeline skips filtering and degenerates to PBB on
/// the raw series.
pub fn vbpbb_pipeline(
    series: &TimeSeries,
    component: ComponentSpec,
    all_components: &[ComponentSpec],
    cfg: &BootstrapConfig,
    overrides: FilterOverrides,
) -> Result<VbpbbOutcome> {
    let (num, den) = component.frequency_ratio();
    let target = Frequency::new(num, den)?;
    let others: Vec<Frequency> = all_components
        .iter()
        .filter(|c| **c != component)
        .map(|c| {
            let (n, d) = c.frequency_ratio();
            Frequency::new(n, d)
        })
        .collect::<Result<_>>()?;

    let m = match overrides.m {
        Some(m) => {
            if m == 0 || m % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "window override must be a positive odd integer, got {m}"
                )));
            }
            if m > series.len() {
                return Err(Error::InfeasibleBandwidth {
                    frequency: target.to_string(),
                    required_m: m,
                    min_n: m,
                    n: series.len(),
                });
            }
            m
        }
        None => select_bandwidth(target, &others, series.len())?,
    };

    let (plan, filtered) = if m == 1 {
        // Trivial bandpass: all frequencies pass, nothing to reconstruct.
        (KZFTPlan::new(1, 1, target.as_f64())?, series.clone())
    } else {
        let plan = KZFTPlan::new(m, 1, target.as_f64())?;
        let fc = kzft_apply(series, &plan, overrides.edge)?;
        (plan, fc.real_series)
    };

    let ensemble =
        bootstrap_ensemble_at_period(&filtered, component, component.block_period(), cfg)?;
    let band = ci_band(&ensemble, cfg.alpha, Method::Vbpbb)?;
    Ok(VbpbbOutcome {
        band,
        ensemble,
        plan,
        filtered,
    })
}
