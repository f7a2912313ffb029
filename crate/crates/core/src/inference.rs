//! Significance testing, band-width comparison, harmonic scanning, and
//! variance-explained reporting.

use crate::bootstrap::{
    combine_components, pbb_pipeline, quantile, vbpbb_pipeline, BootstrapConfig, FilterOverrides,
    PhaseMeanEnsemble,
};
use crate::error::{Error, Result};
use crate::kzft::EdgeMode;
use crate::series::{CIBand, ComponentSpec, Method, TimeSeries};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Outcome of the horizontal-line test on a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalLineTest {
    pub significant: bool,
    pub max_lower: f64,
    pub min_upper: f64,
}

/// A component is significant when no constant fits inside its band: the
/// largest lower-curve value exceeds the smallest upper-curve value.
pub fn horizontal_line_test(band: &CIBand) -> HorizontalLineTest {
    let max_lower = band.lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_upper = band.upper.iter().cloned().fold(f64::INFINITY, f64::min);
    HorizontalLineTest {
        significant: max_lower > min_upper,
        max_lower,
        min_upper,
    }
}

/// Median across phases of the per-phase band widths, using the same
/// interpolated-rank convention as the band quantiles.
pub fn median_band_width(band: &CIBand) -> f64 {
    quantile(&band.widths(), 0.5)
}

/// Ratio of median band widths, PBB over VBPBB, for the same component.
///
/// Defined as 1 when both widths are 0 and infinite when only the VBPBB
/// width is 0. The two bands may be folded at different cycle lengths (a
/// harmonic's PBB band uses the harmonic's own period).
pub fn width_ratio(pbb_band: &CIBand, vbpbb_band: &CIBand) -> Result<f64> {
    if pbb_band.component != vbpbb_band.component {
        return Err(Error::MismatchedComponents(format!(
            "{} vs {}",
            pbb_band.component, vbpbb_band.component
        )));
    }
    let num = median_band_width(pbb_band);
    let den = median_band_width(vbpbb_band);
    Ok(if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    })
}

/// Significance verdict for one component under one method.
#[derive(Debug, Clone)]
pub struct SignificanceReport {
    pub component: ComponentSpec,
    pub method: Method,
    /// Filter window (1 when no filtering was applied).
    pub m: usize,
    pub k: usize,
    pub significant: bool,
    pub max_lower: f64,
    pub min_upper: f64,
    pub median_width: f64,
    pub band: CIBand,
}

impl SignificanceReport {
    pub fn from_band(band: CIBand, m: usize, k: usize) -> Self {
        let test = horizontal_line_test(&band);
        SignificanceReport {
            component: band.component,
            method: band.method,
            m,
            k,
            significant: test.significant,
            max_lower: test.max_lower,
            min_upper: test.min_upper,
            median_width: median_band_width(&band),
            band,
        }
    }
}

/// One scanned harmonic: either a tested verdict or a record that the
/// passband needed more data than the series provides.
#[derive(Debug, Clone)]
pub enum ScanEntry {
    Tested(Box<SignificanceReport>),
    Untestable {
        component: ComponentSpec,
        required_n: usize,
    },
}

/// Test harmonics `j = 1..=max_j` of `fundamental` under VBPBB.
///
/// Each harmonic's passband excludes the other scanned harmonics, every
/// declared foreign component, and DC. `max_j` is capped at the Nyquist
/// bound `P/2`. Harmonics whose window exceeds the series length are
/// reported as untestable rather than dropped.
pub fn harmonic_scan(
    series: &TimeSeries,
    fundamental: usize,
    max_j: usize,
    declared_others: &[ComponentSpec],
    cfg: &BootstrapConfig,
    edge: EdgeMode,
) -> Result<Vec<ScanEntry>> {
    let capped = max_j.min(fundamental / 2).max(1);
    let scanned: Vec<ComponentSpec> = (1..=capped)
        .map(|j| ComponentSpec::new(fundamental, j))
        .collect::<Result<_>>()?;
    let mut all = scanned.clone();
    all.extend_from_slice(declared_others);

    let mut entries = Vec::with_capacity(scanned.len());
    for component in scanned {
        let overrides = FilterOverrides { m: None, edge };
        match vbpbb_pipeline(series, component, &all, cfg, overrides) {
            Ok(out) => {
                entries.push(ScanEntry::Tested(Box::new(SignificanceReport::from_band(
                    out.band, out.plan.m, out.plan.k,
                ))));
            }
            Err(Error::InfeasibleBandwidth { min_n, .. }) => {
                entries.push(ScanEntry::Untestable {
                    component,
                    required_n: min_n,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(entries)
}

fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let const_x = sxx / n <= (1e-12 * mx.abs().max(1.0)).powi(2);
    let const_y = syy / n <= (1e-12 * my.abs().max(1.0)).powi(2);
    if const_x {
        return Err(Error::ConstantSeries("first"));
    }
    if const_y {
        return Err(Error::ConstantSeries("second"));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Squared Pearson correlation over the common absolute support of the two
/// series.
pub fn r_squared(original: &TimeSeries, reconstruction: &TimeSeries) -> Result<f64> {
    let from = original.origin_index.max(reconstruction.origin_index);
    let to = (original.origin_index + original.len())
        .min(reconstruction.origin_index + reconstruction.len());
    if from >= to {
        return Err(Error::NoCommonSupport);
    }
    let x = &original.values[from - original.origin_index..to - original.origin_index];
    let y = &reconstruction.values
        [from - reconstruction.origin_index..to - reconstruction.origin_index];
    let r = pearson_r(x, y)?;
    Ok(r * r)
}

/// Extend a per-phase curve periodically over `len` samples starting at
/// absolute index `origin`.
pub fn extend_periodic(curve: &[f64], origin: usize, len: usize) -> TimeSeries {
    let period = curve.len();
    TimeSeries {
        origin_index: origin,
        origin_label: None,
        values: (0..len).map(|t| curve[(origin + t) % period]).collect(),
    }
}

/// Which pipelines an analysis should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Pbb,
    Vbpbb,
    Both,
}

impl MethodSelection {
    pub fn runs_pbb(&self) -> bool {
        matches!(self, MethodSelection::Pbb | MethodSelection::Both)
    }
    pub fn runs_vbpbb(&self) -> bool {
        matches!(self, MethodSelection::Vbpbb | MethodSelection::Both)
    }
}

/// A fundamental period to analyze along with how many harmonics to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodRequest {
    pub period: usize,
    pub max_harmonics: usize,
}

/// Full analysis request.
#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    pub periods: Vec<PeriodRequest>,
    pub cfg: BootstrapConfig,
    pub methods: MethodSelection,
    /// Per-component window overrides.
    pub m_overrides: BTreeMap<(usize, usize), usize>,
    pub edge: EdgeMode,
}

/// One component row of the serialized report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub period: String,
    pub harmonic: usize,
    pub frequency: String,
    pub method: Method,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub significant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<CIBand>,
}

impl ComponentEntry {
    fn from_report(report: &SignificanceReport) -> Self {
        ComponentEntry {
            period: report.component.fundamental_period.to_string(),
            harmonic: report.component.harmonic,
            frequency: report.component.frequency_label(),
            method: report.method,
            status: "ok".into(),
            required_n: None,
            m: Some(report.m),
            k: Some(report.k),
            significant: Some(report.significant),
            max_lower: Some(report.max_lower),
            min_upper: Some(report.min_upper),
            median_width: Some(report.median_width),
            band: Some(report.band.clone()),
        }
    }

    fn untestable(component: ComponentSpec, method: Method, required_n: usize) -> Self {
        ComponentEntry {
            period: component.fundamental_period.to_string(),
            harmonic: component.harmonic,
            frequency: component.frequency_label(),
            method,
            status: "untestable".into(),
            required_n: Some(required_n),
            m: None,
            k: None,
            significant: None,
            max_lower: None,
            min_upper: None,
            median_width: None,
            band: None,
        }
    }
}

/// Complete analysis output: verdicts per component and method, PBB/VBPBB
/// width ratios, variance-explained entries, and provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dataset_digest: String,
    pub seed: u64,
    #[serde(rename = "B")]
    pub b: usize,
    pub alpha: f64,
    pub components: Vec<ComponentEntry>,
    /// Keyed by `"j/P"`; PBB median width over VBPBB median width.
    pub width_ratios: BTreeMap<String, f64>,
    /// Keyed by `"j/P"` for single significant fundamentals plus
    /// `"combined"` for the sum of all significant VBPBB components.
    pub r_squared: BTreeMap<String, f64>,
    /// Per fundamental period: band of the summed significant VBPBB
    /// components (resamples paired by index).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub combined_vbpbb: BTreeMap<String, CIBand>,
}

impl AnalysisReport {
    pub fn entry(&self, period: usize, harmonic: usize, method: Method) -> Option<&ComponentEntry> {
        self.components.iter().find(|e| {
            e.period == period.to_string() && e.harmonic == harmonic && e.method == method
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Run the full analysis: per-component PBB and/or VBPBB pipelines,
/// significance verdicts, width ratios, combined bands, and R-squared
/// entries.
pub fn run_analysis(
    series: &TimeSeries,
    request: &AnalysisRequest,
    dataset_digest: &str,
) -> Result<AnalysisReport> {
    request.cfg.validate()?;
    if request.periods.is_empty() {
        return Err(Error::InvalidParameter("no periods requested".into()));
    }

    // Full component set; every passband excludes every other tested
    // frequency (plus DC).
    let mut components: Vec<ComponentSpec> = Vec::new();
    for pr in &request.periods {
        if pr.period < 2 {
            return Err(Error::InvalidParameter(format!(
                "period must be >= 2, got {}",
                pr.period
            )));
        }
        let capped = pr.max_harmonics.min(pr.period / 2).max(1);
        for j in 1..=capped {
            components.push(ComponentSpec::new(pr.period, j)?);
        }
    }
    components.sort();
    for pair in components.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.frequency_ratio().0 as u128 * b.frequency_ratio().1 as u128
            == b.frequency_ratio().0 as u128 * a.frequency_ratio().1 as u128
        {
            return Err(Error::DuplicateFrequency {
                frequency: a.frequency_label(),
            });
        }
    }

    let mut entries: Vec<ComponentEntry> = Vec::new();
    let mut vbpbb_reports: Vec<SignificanceReport> = Vec::new();
    let mut vbpbb_ensembles: BTreeMap<(usize, usize), PhaseMeanEnsemble> = BTreeMap::new();
    let mut pbb_bands: BTreeMap<(usize, usize), CIBand> = BTreeMap::new();
    let mut vbpbb_bands: BTreeMap<(usize, usize), CIBand> = BTreeMap::new();

    for &component in &components {
        let key = (component.fundamental_period, component.harmonic);
        if request.methods.runs_vbpbb() {
            let overrides = FilterOverrides {
                m: request.m_overrides.get(&key).copied(),
                edge: request.edge,
            };
            match vbpbb_pipeline(series, component, &components, &request.cfg, overrides) {
                Ok(out) => {
                    let report = SignificanceReport::from_band(out.band, out.plan.m, out.plan.k);
                    entries.push(ComponentEntry::from_report(&report));
                    vbpbb_bands.insert(key, report.band.clone());
                    vbpbb_ensembles.insert(key, out.ensemble);
                    vbpbb_reports.push(report);
                }
                Err(Error::InfeasibleBandwidth { min_n, .. }) if component.harmonic > 1 => {
                    entries.push(ComponentEntry::untestable(component, Method::Vbpbb, min_n));
                }
                Err(e) => return Err(e),
            }
        }
        if request.methods.runs_pbb() {
            let out = pbb_pipeline(series, component, &request.cfg)?;
            let report = SignificanceReport::from_band(out.band, 1, 1);
            entries.push(ComponentEntry::from_report(&report));
            pbb_bands.insert(key, report.band.clone());
        }
    }

    let mut width_ratios = BTreeMap::new();
    for (key, pbb_band) in &pbb_bands {
        if let Some(vbpbb_band) = vbpbb_bands.get(key) {
            width_ratios.insert(
                format!("{}/{}", key.1, key.0),
                width_ratio(pbb_band, vbpbb_band)?,
            );
        }
    }

    // Combined band per fundamental from the significant VBPBB components.
    let mut combined_vbpbb = BTreeMap::new();
    for pr in &request.periods {
        let significant: Vec<&PhaseMeanEnsemble> = vbpbb_reports
            .iter()
            .filter(|r| {
                r.component.fundamental_period == pr.period && r.significant
            })
            .filter_map(|r| {
                vbpbb_ensembles.get(&(r.component.fundamental_period, r.component.harmonic))
            })
            .collect();
        if significant.len() > 1 {
            combined_vbpbb.insert(
                pr.period.to_string(),
                combine_components(&significant, request.cfg.alpha)?,
            );
        }
    }

    // Variance explained: each significant VBPBB fundamental alone, plus
    // the sum of every significant VBPBB component.
    let mut r_squared_entries = BTreeMap::new();
    let significant_vbpbb: Vec<&SignificanceReport> = vbpbb_reports
        .iter()
        .filter(|r| r.significant)
        .collect();
    for report in &significant_vbpbb {
        if report.component.harmonic == 1 {
            let extended = extend_periodic(
                &report.band.median,
                series.origin_index,
                series.len(),
            );
            if let Ok(r2) = r_squared(series, &extended) {
                r_squared_entries.insert(report.component.frequency_label(), r2);
            }
        }
    }
    if !significant_vbpbb.is_empty() {
        let mut summed = vec![0.0f64; series.len()];
        for report in &significant_vbpbb {
            let extended = extend_periodic(
                &report.band.median,
                series.origin_index,
                series.len(),
            );
            for (acc, v) in summed.iter_mut().zip(&extended.values) {
                *acc += v;
            }
        }
        let reconstruction = TimeSeries {
            origin_index: series.origin_index,
            origin_label: None,
            values: summed,
        };
        if let Ok(r2) = r_squared(series, &reconstruction) {
            r_squared_entries.insert("combined".into(), r2);
        }
    }

    Ok(AnalysisReport {
        dataset_digest: dataset_digest.to_string(),
        seed: request.cfg.seed,
        b: request.cfg.b,
        alpha: request.cfg.alpha,
        components: entries,
        width_ratios,
        r_squared: r_squared_entries,
        combined_vbpbb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn band(lower: Vec<f64>, upper: Vec<f64>) -> CIBand {
        let median: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| (l + u) / 2.0).collect();
        CIBand {
            period: lower.len(),
            alpha: 0.05,
            lower,
            median,
            upper,
            component: ComponentSpec::new(365, 1).unwrap(),
            method: Method::Pbb,
        }
    }

    #[test]
    fn horizontal_line_overlap_not_significant() {
        let b = band(vec![-1.0, 0.0], vec![1.0, 2.0]);
        let t = horizontal_line_test(&b);
        assert!(!t.significant);
        assert_eq!(t.max_lower, 0.0);
        assert_eq!(t.min_upper, 1.0);
    }

    #[test]
    fn horizontal_line_disjoint_significant() {
        let b = band(vec![0.1, -1.0], vec![0.5, -0.2]);
        let t = horizontal_line_test(&b);
        assert!(t.significant);
        assert_eq!(t.max_lower, 0.1);
        assert_eq!(t.min_upper, -0.2);
    }

    #[test]
    fn horizontal_line_invariant_under_shift() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let p = 2 + rng.gen_range(0..8u64) as usize;
            let lower: Vec<f64> = (0..p).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let width: Vec<f64> = (0..p).map(|_| rng.gen::<f64>()).collect();
            let upper: Vec<f64> = lower.iter().zip(&width).map(|(l, w)| l + w).collect();
            let b0 = band(lower.clone(), upper.clone());
            let shift = rng.gen::<f64>() * 10.0 - 5.0;
            let b1 = band(
                lower.iter().map(|v| v + shift).collect(),
                upper.iter().map(|v| v + shift).collect(),
            );
            assert_eq!(
                horizontal_line_test(&b0).significant,
                horizontal_line_test(&b1).significant
            );
        }
    }

    #[test]
    fn horizontal_line_matches_constant_scan() {
        // Brute force: a band is non-significant iff some constant fits
        // inside it at every phase.
        let mut rng = stream_rng(17, 1);
        for _ in 0..1000 {
            let p = 2 + rng.gen_range(0..6u64) as usize;
            let lower: Vec<f64> = (0..p).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let upper: Vec<f64> = lower
                .iter()
                .map(|l| l + rng.gen::<f64>() * 0.8)
                .collect();
            let b = band(lower.clone(), upper.clone());
            let verdict = horizontal_line_test(&b).significant;

            let max_lower = lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min_upper = upper.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut candidates: Vec<f64> = (0..=1000)
                .map(|i| max_lower + (min_upper - max_lower) * i as f64 / 1000.0)
                .collect();
            candidates.push(max_lower);
            candidates.push(min_upper);
            let fits = candidates.iter().any(|&c| {
                lower
                    .iter()
                    .zip(&upper)
                    .all(|(l, u)| *l <= c && c <= *u)
            });
            assert_eq!(verdict, !fits);
        }
    }

    #[test]
    fn median_width_examples() {
        let zero = band(vec![1.0, 2.0], vec![1.0, 2.0]);
        assert_eq!(median_band_width(&zero), 0.0);
        let b = band(vec![0.0, 0.0, 0.0], vec![1.0, 3.0, 5.0]);
        assert_eq!(median_band_width(&b), 3.0);
    }

    #[test]
    fn width_ratio_rules() {
        let a = band(vec![0.0, 0.0], vec![2.0, 2.0]);
        assert_eq!(width_ratio(&a, &a).unwrap(), 1.0);
        let zero = band(vec![1.0, 1.0], vec![1.0, 1.0]);
        assert_eq!(width_ratio(&zero, &zero).unwrap(), 1.0);
        assert!(width_ratio(&a, &zero).unwrap().is_infinite());
        let mut other = a.clone();
        other.component = ComponentSpec::new(7, 1).unwrap();
        assert!(matches!(
            width_ratio(&a, &other),
            Err(Error::MismatchedComponents(_))
        ));
    }

    #[test]
    fn r_squared_perfect_and_orthogonal() {
        let x = TimeSeries::new((0..50).map(|t| (0.3 * t as f64).sin() + 0.1).collect()).unwrap();
        assert!((r_squared(&x, &x).unwrap() - 1.0).abs() < 1e-12);

        // cos and sin over full periods have zero sample covariance.
        let n = 40;
        let c = TimeSeries::new(
            (0..n)
                .map(|t| (std::f64::consts::TAU * t as f64 / 8.0).cos())
                .collect(),
        )
        .unwrap();
        let s = TimeSeries::new(
            (0..n)
                .map(|t| (std::f64::consts::TAU * t as f64 / 8.0).sin())
                .collect(),
        )
        .unwrap();
        assert!(r_squared(&c, &s).unwrap() < 1e-20);
    }

    #[test]
    fn r_squared_affine_invariance() {
        let x = TimeSeries::new((0..64).map(|t| ((t * 29) % 13) as f64).collect()).unwrap();
        let y = TimeSeries::new((0..64).map(|t| ((t * 7) % 11) as f64 * 0.5).collect()).unwrap();
        let base = r_squared(&x, &y).unwrap();
        let y2 = TimeSeries::new(y.values.iter().map(|v| -3.0 * v + 11.0).collect()).unwrap();
        assert!((r_squared(&x, &y2).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn r_squared_constant_rejected() {
        let x = TimeSeries::new(vec![1.0; 20]).unwrap();
        let y = TimeSeries::new((0..20).map(|t| t as f64).collect()).unwrap();
        assert!(matches!(r_squared(&x, &y), Err(Error::ConstantSeries(_))));
    }

    #[test]
    fn r_squared_uses_common_support() {
        let x = TimeSeries::with_origin((0..30).map(|t| t as f64).collect(), 0, None).unwrap();
        let y = TimeSeries::with_origin((0..20).map(|t| (t as f64) * 2.0).collect(), 10, None).unwrap();
        // Over the overlap both are affine in t, so correlation is perfect.
        assert!((r_squared(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let z = TimeSeries::with_origin(vec![1.0, 2.0], 100, None).unwrap();
        assert!(matches!(r_squared(&x, &z), Err(Error::NoCommonSupport)));
    }

    #[test]
    fn extend_periodic_aligns_phases() {
        let curve = [10.0, 20.0, 30.0];
        let ext = extend_periodic(&curve, 4, 5);
        // phases of absolute 4..9 at period 3: 1, 2, 0, 1, 2
        assert_eq!(ext.values, vec![20.0, 30.0, 10.0, 20.0, 30.0]);
    }

    #[test]
    fn scan_with_single_harmonic_matches_pipeline() {
        let n = 96;
        let p = 8;
        let mut rng = stream_rng(3, 3);
        let s = TimeSeries::new(
            (0..n)
                .map(|t| {
                    (std::f64::consts::TAU * t as f64 / p as f64).sin()
                        + 0.3 * rng.gen::<f64>()
                })
                .collect(),
        )
        .unwrap();
        let cfg = BootstrapConfig {
            b: 200,
            seed: 10,
            ..Default::default()
        };
        let entries = harmonic_scan(&s, p, 1, &[], &cfg, EdgeMode::Valid).unwrap();
        assert_eq!(entries.len(), 1);
        let scanned = match &entries[0] {
            ScanEntry::Tested(r) => r,
            other => panic!("expected tested entry, got {other:?}"),
        };
        let comp = ComponentSpec::fundamental(p).unwrap();
        let direct = vbpbb_pipeline(&s, comp, &[comp], &cfg, FilterOverrides::default()).unwrap();
        assert_eq!(scanned.band.lower, direct.band.lower);
        assert_eq!(scanned.band.upper, direct.band.upper);
        assert_eq!(
            scanned.significant,
            horizontal_line_test(&direct.band).significant
        );
    }

    #[test]
    fn scan_reports_untestable_harmonics() {
        // A declared component at 2/15 sits 1/120 away from harmonic 2/16,
        // forcing a window of 241 samples that n = 80 cannot supply; the
        // fundamental's window (33) still fits.
        let s = TimeSeries::new(
            (0..80)
                .map(|t| (std::f64::consts::TAU * t as f64 / 16.0).sin())
                .collect(),
        )
        .unwrap();
        let cfg = BootstrapConfig {
            b: 50,
            seed: 4,
            ..Default::default()
        };
        let declared = [ComponentSpec::new(15, 2).unwrap()];
        let entries = harmonic_scan(&s, 16, 2, &declared, &cfg, EdgeMode::Valid).unwrap();
        assert_eq!(entries.len(), 2);
        assert!(matches!(entries[0], ScanEntry::Tested(_)));
        match &entries[1] {
            ScanEntry::Untestable { required_n, .. } => assert_eq!(*required_n, 241),
            other => panic!("expected untestable, got {other:?}"),
        }
    }

    #[test]
    fn analysis_report_round_trips_and_orders_components() {
        let n = 240;
        let mut rng = stream_rng(8, 0);
        let s = TimeSeries::new(
            (0..n)
                .map(|t| {
                    2.0 * (std::f64::consts::TAU * t as f64 / 12.0).sin()
                        + 0.5 * rng.gen::<f64>()
                })
                .collect(),
        )
        .unwrap();
        let request = AnalysisRequest {
            periods: vec![PeriodRequest {
                period: 12,
                max_harmonics: 2,
            }],
            cfg: BootstrapConfig {
                b: 200,
                seed: 99,
                ..Default::default()
            },
            methods: MethodSelection::Both,
            m_overrides: BTreeMap::new(),
            edge: EdgeMode::Valid,
        };
        let report = run_analysis(&s, &request, "digest123").unwrap();
        assert_eq!(report.dataset_digest, "digest123");
        assert_eq!(report.components.len(), 4); // 2 harmonics x 2 methods
        assert!(report.entry(12, 1, Method::Vbpbb).is_some());
        assert!(report.entry(12, 1, Method::Pbb).is_some());
        assert!(report.width_ratios.contains_key("1/12"));

        let json = report.to_json().unwrap();
        let back = AnalysisReport::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn analysis_rejects_duplicate_frequencies() {
        let s = TimeSeries::new((0..64).map(|t| (t as f64 * 0.3).sin()).collect()).unwrap();
        let request = AnalysisRequest {
            periods: vec![
                PeriodRequest {
                    period: 14,
                    max_harmonics: 2,
                },
                PeriodRequest {
                    period: 7,
                    max_harmonics: 1,
                },
            ],
            cfg: BootstrapConfig {
                b: 10,
                seed: 0,
                ..Default::default()
            },
            methods: MethodSelection::Both,
            m_overrides: BTreeMap::new(),
            edge: EdgeMode::Valid,
        };
        assert!(matches!(
            run_analysis(&s, &request, "d"),
            Err(Error::DuplicateFrequency { .. })
        ));
    }
}
