//! CSV ingestion: date-keyed daily values, cumulative-to-incident
//! differencing, and per-capita normalization.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    /// Missing dates abort ingestion, naming the first missing date.
    #[default]
    Reject,
    /// Missing dates are filled with zero.
    ZeroFill,
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub input_path: PathBuf,
    pub date_column: String,
    pub value_column: String,
    /// Input is a running total; difference it to per-day increments.
    pub cumulative: bool,
    /// Population used for rate normalization; `None` skips normalization.
    pub population: Option<f64>,
    /// Rate base (values become per-`per` persons). Default 100 000.
    pub per: f64,
    pub gap_policy: GapPolicy,
}

impl IngestConfig {
    pub fn new(input_path: impl AsRef<Path>) -> Self {
        Self {
            input_path: input_path.as_ref().to_path_buf(),
            date_column: "date".into(),
            value_column: "value".into(),
            cumulative: false,
            population: None,
            per: 100_000.0,
            gap_policy: GapPolicy::Reject,
        }
    }
}

/// Notes accumulated while ingesting.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub zero_filled: usize,
    /// Negative day-over-day increments preserved during differencing
    /// (reporting corrections).
    pub negative_increments: usize,
}

/// Parse a date-keyed CSV into one sample per day.
///
/// Rows may be unsorted; duplicates and (under [`GapPolicy::Reject`]) gaps
/// are errors naming the offending row or date. The first date becomes the
/// series origin label.
pub fn load_csv(cfg: &IngestConfig) -> Result<(TimeSeries, IngestSummary)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(&cfg.input_path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { name: name.into() })
    };
    let date_idx = find(&cfg.date_column)?;
    let value_idx = find(&cfg.value_column)?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header line
        let record = record?;
        let date_text = record.get(date_idx).ok_or_else(|| Error::MalformedRow {
            row,
            message: "missing date field".into(),
        })?;
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d").map_err(|e| {
            Error::MalformedRow {
                row,
                message: format!("cannot parse date {date_text:?}: {e}"),
            }
        })?;
        let value_text = record.get(value_idx).ok_or_else(|| Error::MalformedRow {
            row,
            message: "missing value field".into(),
        })?;
        let value: f64 = value_text.parse().map_err(|e| Error::MalformedRow {
            row,
            message: format!("cannot parse value {value_text:?}: {e}"),
        })?;
        if !value.is_finite() {
            return Err(Error::MalformedRow {
                row,
                message: format!("non-finite value {value_text:?}"),
            });
        }
        rows.push((date, value));
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }

    rows.sort_by_key(|(d, _)| *d);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateDate {
                date: pair[0].0.to_string(),
            });
        }
    }

    let origin = rows[0].0;
    let mut values = Vec::with_capacity(rows.len());
    let mut summary = IngestSummary {
        rows: rows.len(),
        ..Default::default()
    };
    let mut expected = origin;
    for (date, value) in rows {
        while expected < date {
            match cfg.gap_policy {
                GapPolicy::Reject => {
                    return Err(Error::DateGap {
                        date: expected.to_string(),
                    })
                }
                GapPolicy::ZeroFill => {
                    values.push(0.0);
                    summary.zero_filled += 1;
                    expected = expected + chrono::Days::new(1);
                }
            }
        }
        values.push(value);
        expected = expected + chrono::Days::new(1);
    }

    let series = TimeSeries::with_origin(values, 0, Some(origin))?;
    Ok((series, summary))
}

/// First differences with `out(0) = in(0)`.
///
/// Negative increments are preserved (they are reporting corrections, not
/// errors) and counted for the caller's warning summary.
pub fn cumulative_to_incident(series: &TimeSeries) -> (TimeSeries, usize) {
    let mut values = Vec::with_capacity(series.len());
    let mut negatives = 0;
    let mut prev: Option<f64> = None;
    for &v in &series.values {
        let inc = match prev {
            None => v,
            Some(p) => v - p,
        };
        if inc < 0.0 {
            negatives += 1;
        }
        values.push(inc);
        prev = Some(v);
    }
    (
        TimeSeries {
            origin_index: series.origin_index,
            origin_label: series.origin_label,
            values,
        },
        negatives,
    )
}

/// Scale every value by `per / population`.
pub fn normalize_per_capita(series: &TimeSeries, population: f64, per: f64) -> Result<TimeSeries> {
    if population <= 0.0 || !population.is_finite() {
        return Err(Error::NonPositivePopulation(population));
    }
    if per <= 0.0 || !per.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rate base must be positive, got {per}"
        )));
    }
    let scale = per / population;
    Ok(TimeSeries {
        origin_index: series.origin_index,
        origin_label: series.origin_label,
        values: series.values.iter().map(|v| v * scale).collect(),
    })
}

/// Full ingestion: parse, optionally difference, optionally normalize.
pub fn ingest(cfg: &IngestConfig) -> Result<(TimeSeries, IngestSummary)> {
    let (mut series, mut summary) = load_csv(cfg)?;
    if cfg.cumulative {
        let (diffed, negatives) = cumulative_to_incident(&series);
        series = diffed;
        summary.negative_increments = negatives;
    }
    if let Some(population) = cfg.population {
        series = normalize_per_capita(&series, population, cfg.per)?;
    }
    Ok((series, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempdir::TempCsv {
        tempdir::TempCsv::new(contents)
    }

    // Minimal scoped temp-file helper so tests need no extra dependency.
    mod tempdir {
        use std::io::Write;
        use std::path::PathBuf;

        pub struct TempCsv {
            pub path: PathBuf,
        }

        impl TempCsv {
            pub fn new(contents: &str) -> Self {
                let mut path = std::env::temp_dir();
                let unique = format!(
                    "vbpbb-ingest-{}-{:?}.csv",
                    std::process::id(),
                    std::thread::current().id()
                );
                path.push(unique);
                let mut f = std::fs::File::create(&path).unwrap();
                f.write_all(contents.as_bytes()).unwrap();
                Self { path }
            }
        }

        impl Drop for TempCsv {
            fn drop(&mut self) {
                let _ = std::fs::remove_file(&self.path);
            }
        }
    }

    fn base_cfg(path: &std::path::Path) -> IngestConfig {
        IngestConfig {
            date_column: "date".into(),
            value_column: "deaths".into(),
            ..IngestConfig::new(path)
        }
    }

    #[test]
    fn load_two_rows() {
        let f = write_csv("date,deaths\n2020-01-22,1\n2020-01-23,3\n");
        let (s, summary) = load_csv(&base_cfg(&f.path)).unwrap();
        assert_eq!(s.values, vec![1.0, 3.0]);
        assert_eq!(s.origin_label, NaiveDate::from_ymd_opt(2020, 1, 22));
        assert_eq!(s.origin_index, 0);
        assert_eq!(summary.rows, 2);
    }

    #[test]
    fn load_unsorted_rows_sorts_by_date() {
        let f = write_csv("date,deaths\n2020-01-24,5\n2020-01-22,1\n2020-01-23,3\n");
        let (s, _) = load_csv(&base_cfg(&f.path)).unwrap();
        assert_eq!(s.values, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn load_gap_rejected_names_date() {
        let f = write_csv("date,deaths\n2020-01-22,1\n2020-01-23,3\n2020-01-25,4\n");
        match load_csv(&base_cfg(&f.path)) {
            Err(Error::DateGap { date }) => assert_eq!(date, "2020-01-24"),
            other => panic!("expected DateGap, got {other:?}"),
        }
    }

    #[test]
    fn load_gap_zero_fill() {
        let f = write_csv("date,deaths\n2020-01-22,1\n2020-01-25,4\n");
        let cfg = IngestConfig {
            gap_policy: GapPolicy::ZeroFill,
            ..base_cfg(&f.path)
        };
        let (s, summary) = load_csv(&cfg).unwrap();
        assert_eq!(s.values, vec![1.0, 0.0, 0.0, 4.0]);
        assert_eq!(summary.zero_filled, 2);
    }

    #[test]
    fn load_duplicate_date_rejected() {
        let f = write_csv("date,deaths\n2020-01-22,1\n2020-01-22,2\n");
        assert!(matches!(
            load_csv(&base_cfg(&f.path)),
            Err(Error::DuplicateDate { .. })
        ));
    }

    #[test]
    fn load_bad_date_names_row() {
        let f = write_csv("date,deaths\n2020-01-22,1\nnot-a-date,2\n");
        match load_csv(&base_cfg(&f.path)) {
            Err(Error::MalformedRow { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn load_missing_column() {
        let f = write_csv("day,deaths\n2020-01-22,1\n");
        assert!(matches!(
            load_csv(&base_cfg(&f.path)),
            Err(Error::MissingColumn { .. })
        ));
    }

    #[test]
    fn differencing_examples() {
        let diff = |v: Vec<f64>| cumulative_to_incident(&TimeSeries::new(v).unwrap());
        let (d, neg) = diff(vec![0.0, 3.0, 5.0, 5.0]);
        assert_eq!(d.values, vec![0.0, 3.0, 2.0, 0.0]);
        assert_eq!(neg, 0);

        let (d, neg) = diff(vec![7.0, 7.0, 7.0]);
        assert_eq!(d.values, vec![7.0, 0.0, 0.0]);
        assert_eq!(neg, 0);

        let (d, neg) = diff(vec![2.0, 1.0]);
        assert_eq!(d.values, vec![2.0, -1.0]);
        assert_eq!(neg, 1);
    }

    #[test]
    fn normalize_examples() {
        let s = TimeSeries::new(vec![3320.0]).unwrap();
        let out = normalize_per_capita(&s, 332_000_000.0, 100_000.0).unwrap();
        assert!((out.values[0] - 1.0).abs() < 1e-12);

        let zero = TimeSeries::new(vec![0.0, 0.0]).unwrap();
        let out = normalize_per_capita(&zero, 1000.0, 100_000.0).unwrap();
        assert_eq!(out.values, vec![0.0, 0.0]);

        let s2 = TimeSeries::new(vec![5.0]).unwrap();
        let out = normalize_per_capita(&s2, 10.0, 1.0).unwrap();
        assert!((out.values[0] - 0.5).abs() < 1e-12);

        assert!(matches!(
            normalize_per_capita(&s2, 0.0, 100_000.0),
            Err(Error::NonPositivePopulation(_))
        ));
    }

    #[test]
    fn full_ingest_composition() {
        let f = write_csv("date,deaths\n2020-01-22,10\n2020-01-23,30\n2020-01-24,30\n");
        let cfg = IngestConfig {
            cumulative: true,
            population: Some(1_000_000.0),
            per: 100_000.0,
            ..base_cfg(&f.path)
        };
        let (s, summary) = ingest(&cfg).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 0.0]);
        assert_eq!(summary.negative_increments, 0);
    }
}
