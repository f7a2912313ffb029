//! `vbpbb` command line: ingest a daily CSV, bandpass-filter and bootstrap
//! periodic components, scan harmonics, and emit reports and band CSVs.
//!
//! Exit codes: 0 success, 2 input/data errors, 3 configuration errors.

mod io_util;

use clap::{Args, Parser, Subcommand, ValueEnum};
use io_util::{write_atomic, CliError};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use vbpbb_core::{
    coverage_experiment, generate, ingest, kzft_apply, run_analysis, AnalysisReport,
    AnalysisRequest, BootstrapConfig, CIBand, ComponentSpec, EdgeMode, Frequency, GapPolicy,
    IngestConfig, KZFTPlan, Method, MethodSelection, PeriodRequest, ResampleMode, SynthSpec,
    TimeSeries,
};

#[derive(Parser)]
#[command(
    name = "vbpbb",
    version,
    about = "Periodic block bootstrap (plain and variable-bandpass) for daily time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a date/value CSV into the series JSON format.
    Ingest(IngestArgs),
    /// Run PBB/VBPBB pipelines, significance tests, and ratio/R2 summaries.
    Analyze(AnalyzeArgs),
    /// Bandpass-filter a series with an explicit KZFT plan.
    Filter(FilterArgs),
    /// Generate a synthetic series from a spec JSON.
    Synth(SynthArgs),
    /// Monte-Carlo coverage/width experiment on a synthetic spec.
    Coverage(CoverageArgs),
    /// Render a report JSON as a summary table.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GapPolicyArg {
    Reject,
    ZeroFill,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "date")]
    date_col: String,
    #[arg(long, default_value = "value")]
    value_col: String,
    /// Input holds running totals; difference to per-day increments.
    #[arg(long)]
    cumulative: bool,
    /// Population divisor for rate normalization.
    #[arg(long)]
    population: Option<f64>,
    /// Rate base: values become per-<PER> persons.
    #[arg(long, default_value_t = 100_000.0)]
    per: f64,
    #[arg(long, value_enum, default_value = "reject")]
    gap_policy: GapPolicyArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pbb,
    Vbpbb,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResampleModeArg {
    Block,
    Phasewise,
}

#[derive(Clone, Copy, ValueEnum)]
enum EdgeArg {
    /// Output only where the filter window fully fits.
    Valid,
    /// Full-length output with renormalized partial windows at the edges.
    Renormalized,
}

impl From<EdgeArg> for EdgeMode {
    fn from(e: EdgeArg) -> Self {
        match e {
            EdgeArg::Valid => EdgeMode::Valid,
            EdgeArg::Renormalized => EdgeMode::Renormalized,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Series JSON produced by `ingest` or `synth`.
    #[arg(long)]
    series: PathBuf,
    /// Fundamental period in samples; repeatable (e.g. --period 365 --period 7).
    #[arg(long, required = true)]
    period: Vec<usize>,
    /// Harmonics to scan per period (capped at the Nyquist bound).
    #[arg(long, default_value_t = 1)]
    harmonics: usize,
    #[arg(long = "B", default_value_t = 10_000)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "block")]
    resample_mode: ResampleModeArg,
    /// Filter window override, PERIOD:HARMONIC=M; repeatable.
    #[arg(long = "m-override")]
    m_override: Vec<String>,
    /// Edge handling for the bandpass stage.
    #[arg(long, value_enum, default_value = "valid")]
    edge: EdgeArg,
    #[arg(long)]
    out: PathBuf,
    /// Directory for per-component band CSVs.
    #[arg(long)]
    bands_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    series: PathBuf,
    /// Center frequency as NUM/DEN cycles per sample, e.g. 1/365.
    #[arg(long)]
    nu: String,
    /// Window length (positive odd integer).
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "valid")]
    edge: EdgeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthetic spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Component as PERIOD or PERIOD:HARMONIC, e.g. 365 or 365:2.
    #[arg(long)]
    component: String,
    #[arg(long, default_value_t = 100)]
    replications: usize,
    #[arg(long = "B", default_value_t = 2_000)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the VBPBB pipeline per replication.
    #[arg(long, value_enum, default_value = "both")]
    method: CoverageMethodArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverageMethodArg {
    Pbb,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: ReportFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Filter(args) => cmd_filter(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vbpbb: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load_series(path: &PathBuf) -> Result<TimeSeries, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    TimeSeries::from_json(&text).map_err(CliError::from)
}

fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let cfg = IngestConfig {
        input_path: args.input,
        date_column: args.date_col,
        value_column: args.value_col,
        cumulative: args.cumulative,
        population: args.population,
        per: args.per,
        gap_policy: match args.gap_policy {
            GapPolicyArg::Reject => GapPolicy::Reject,
            GapPolicyArg::ZeroFill => GapPolicy::ZeroFill,
        },
    };
    let (series, summary) = ingest(&cfg)?;
    if summary.negative_increments > 0 {
        eprintln!(
            "warning: {} negative day-over-day increment(s) preserved (reporting corrections)",
            summary.negative_increments
        );
    }
    if summary.zero_filled > 0 {
        eprintln!("warning: {} missing day(s) zero-filled", summary.zero_filled);
    }
    write_atomic(&args.out, series.to_json()?.as_bytes())?;
    eprintln!(
        "ingested {} samples starting {} -> {}",
        series.len(),
        series
            .origin_label
            .map(|d| d.to_string())
            .unwrap_or_else(|| "index 0".into()),
        args.out.display()
    );
    Ok(())
}

fn parse_m_overrides(specs: &[String]) -> Result<BTreeMap<(usize, usize), usize>, CliError> {
    let mut map = BTreeMap::new();
    for text in specs {
        let bad = || {
            CliError::config(format!(
                "cannot parse m-override {text:?}; expected PERIOD:HARMONIC=M"
            ))
        };
        let (key, m) = text.split_once('=').ok_or_else(bad)?;
        let (period, harmonic) = key.split_once(':').ok_or_else(bad)?;
        let period: usize = period.trim().parse().map_err(|_| bad())?;
        let harmonic: usize = harmonic.trim().parse().map_err(|_| bad())?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        if m == 0 || m % 2 == 0 {
            return Err(CliError::config(format!(
                "m-override {text:?}: window must be a positive odd integer"
            )));
        }
        map.insert((period, harmonic), m);
    }
    Ok(map)
}

fn band_csv(band: &CIBand, series: &TimeSeries) -> String {
    let mut out = String::from("phase,calendar_label,lower,median,upper\n");
    for phase in 0..band.period {
        let label = series
            .label_of_phase(phase, band.period)
            .map(|d| d.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            phase, label, band.lower[phase], band.median[phase], band.upper[phase]
        ));
    }
    out
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let series_bytes = std::fs::read(&args.series)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", args.series.display())))?;
    let series = TimeSeries::from_json(
        std::str::from_utf8(&series_bytes)
            .map_err(|e| CliError::data(format!("series file is not UTF-8: {e}")))?,
    )?;
    let digest = io_util::sha256_hex(&series_bytes);

    let request = AnalysisRequest {
        periods: args
            .period
            .iter()
            .map(|&p| PeriodRequest {
                period: p,
                max_harmonics: args.harmonics,
            })
            .collect(),
        cfg: BootstrapConfig {
            b: args.b,
            alpha: args.alpha,
            seed: args.seed,
            resample_mode: match args.resample_mode {
                ResampleModeArg::Block => ResampleMode::Block,
                ResampleModeArg::Phasewise => ResampleMode::Phasewise,
            },
        },
        methods: match args.method {
            MethodArg::Pbb => MethodSelection::Pbb,
            MethodArg::Vbpbb => MethodSelection::Vbpbb,
            MethodArg::Both => MethodSelection::Both,
        },
        m_overrides: parse_m_overrides(&args.m_override)?,
        edge: args.edge.into(),
    };

    let report = run_analysis(&series, &request, &digest)?;
    write_atomic(&args.out, report.to_json()?.as_bytes())?;

    if let Some(dir) = &args.bands_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
        for entry in &report.components {
            if let Some(band) = &entry.band {
                let name = format!(
                    "band_{}_{}_{}.csv",
                    entry.period,
                    entry.harmonic,
                    entry.method.to_string().to_lowercase()
                );
                write_atomic(&dir.join(name), band_csv(band, &series).as_bytes())?;
            }
        }
        for (period, band) in &report.combined_vbpbb {
            let name = format!("band_{period}_combined_vbpbb.csv");
            write_atomic(&dir.join(name), band_csv(band, &series).as_bytes())?;
        }
    }
    eprintln!("report written to {}", args.out.display());
    Ok(())
}

fn parse_frequency(text: &str) -> Result<Frequency, CliError> {
    let bad = || CliError::config(format!("cannot parse frequency {text:?}; expected NUM/DEN"));
    let (num, den) = text.split_once('/').ok_or_else(bad)?;
    let num: u64 = num.trim().parse().map_err(|_| bad())?;
    let den: u64 = den.trim().parse().map_err(|_| bad())?;
    Frequency::new(num, den).map_err(CliError::from)
}

fn cmd_filter(args: FilterArgs) -> Result<(), CliError> {
    let series = load_series(&args.series)?;
    let nu = parse_frequency(&args.nu)?;
    let plan = KZFTPlan::new(args.m, args.k, nu.as_f64())?;
    let fc = kzft_apply(&series, &plan, args.edge.into())?;
    write_atomic(&args.out, fc.real_series.to_json()?.as_bytes())?;
    eprintln!(
        "filtered {} samples (support {}..={}) -> {}",
        fc.real_series.len(),
        fc.valid_from,
        fc.valid_to,
        args.out.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = SynthSpec::from_json(&text)?;
    let series = generate(&spec)?;
    write_atomic(&args.out, series.to_json()?.as_bytes())?;
    eprintln!("generated {} samples -> {}", series.len(), args.out.display());
    Ok(())
}

fn parse_component(text: &str) -> Result<ComponentSpec, CliError> {
    let bad = || {
        CliError::config(format!(
            "cannot parse component {text:?}; expected PERIOD or PERIOD:HARMONIC"
        ))
    };
    let (period, harmonic) = match text.split_once(':') {
        Some((p, j)) => (
            p.trim().parse().map_err(|_| bad())?,
            j.trim().parse().map_err(|_| bad())?,
        ),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    ComponentSpec::new(period, harmonic).map_err(CliError::from)
}

fn cmd_coverage(args: CoverageArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = SynthSpec::from_json(&text)?;
    let component = parse_component(&args.component)?;
    let cfg = BootstrapConfig {
        b: args.b,
        alpha: args.alpha,
        seed: args.seed,
        resample_mode: ResampleMode::Block,
    };
    let include_vbpbb = matches!(args.method, CoverageMethodArg::Both);
    let report = coverage_experiment(&spec, component, &cfg, args.replications, include_vbpbb)?;
    write_atomic(
        &args.out,
        serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::data(e.to_string()))?
            .as_bytes(),
    )?;
    eprintln!(
        "coverage (PBB) {:.4} over {} replications -> {}",
        report.coverage_pbb,
        report.replications,
        args.out.display()
    );
    Ok(())
}

fn format_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", args.input.display())))?;
    let report = AnalysisReport::from_json(&text)?;
    match args.format {
        ReportFormat::Json => {
            println!("{}", report.to_json()?);
        }
        ReportFormat::Csv => {
            println!("period,harmonic,frequency,method,status,m,significant,median_width,width_ratio");
            for e in &report.components {
                let ratio = if e.method == Method::Vbpbb {
                    report
                        .width_ratios
                        .get(&e.frequency)
                        .map(|r| r.to_string())
                        .unwrap_or_default()
                } else {
                    String::new()
                };
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    e.period,
                    e.harmonic,
                    e.frequency,
                    e.method,
                    e.status,
                    format_opt(&e.m),
                    format_opt(&e.significant),
                    format_opt(&e.median_width),
                    ratio
                );
            }
            for (key, value) in &report.r_squared {
                println!("r_squared,{key},,,,,,{value},");
            }
        }
        ReportFormat::Markdown => {
            println!(
                "# Analysis report\n\nseed {} | B {} | alpha {} | dataset {}\n",
                report.seed, report.b, report.alpha, report.dataset_digest
            );
            println!("| component | method | status | m | significant | median width |");
            println!("|-----------|--------|--------|---|-------------|--------------|");
            for e in &report.components {
                println!(
                    "| {} | {} | {} | {} | {} | {} |",
                    e.frequency,
                    e.method,
                    e.status,
                    format_opt(&e.m),
                    format_opt(&e.significant),
                    format_opt(&e.median_width),
                );
            }
            if !report.width_ratios.is_empty() {
                println!("\n| component | PBB/VBPBB width ratio |");
                println!("|-----------|----------------------|");
                for (key, ratio) in &report.width_ratios {
                    println!("| {key} | {ratio:.3} |");
                }
            }
            if !report.r_squared.is_empty() {
                println!("\n| reconstruction | R^2 |");
                println!("|----------------|-----|");
                for (key, value) in &report.r_squared {
                    println!("| {key} | {value:.4} |");
                }
            }
        }
    }
    Ok(())
}
