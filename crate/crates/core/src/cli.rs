//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 ingestion error,
//! 4 numeric failure, 1 when an output file cannot be written.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, Days, NaiveDate, Weekday};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{analyze_series, DaySummary};
use crate::bootstrap::{batch_summary, bootstrap_days, BootstrapConfig, BootstrapReport};
use crate::error::Error;
use crate::export::{
    write_atomic, write_scatter_csv, write_series_csv, write_spectrum_csv, write_surface_csv,
    write_tau_csv,
};
use crate::ingest::{
    parse_intraday_csv, parse_intraday_reader, segment_by_day, BoxScheme, ColumnSpec, DroppedDay,
    PriceSeries,
};
use crate::partition::MomentGrid;
use crate::rng::stream_seed;
use crate::synth::{
    binomial_cascade, constant_series, random_positive_series, CascadeSpec, RandomKind,
};

#[derive(Debug, Parser)]
#[command(
    name = "boxmf",
    version,
    about = "Box-counting multifractal analysis with shuffle tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-day τ(q), spectrum and summary statistics.
    Analyze(AnalyzeArgs),
    /// Shuffle test for every day, with a batch summary.
    ShuffleTest(ShuffleArgs),
    /// Analysis plus shuffle test for every day, written as one table.
    Batch(ShuffleArgs),
    /// Generate synthetic days in the ingestion CSV format.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input CSV, or `-` for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub outdir: PathBuf,
    #[arg(long, default_value = "date")]
    pub date_col: String,
    /// Empty string: the date column holds full timestamps.
    #[arg(long, default_value = "time")]
    pub time_col: String,
    #[arg(long, default_value = "price")]
    pub price_col: String,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = -120.0, allow_negative_numbers = true)]
    pub q_min: f64,
    #[arg(long, default_value_t = 120.0, allow_negative_numbers = true)]
    pub q_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q_step: f64,
    /// Comma-separated box sizes overriding the automatic scheme.
    #[arg(long, value_delimiter = ',')]
    pub boxes: Option<Vec<usize>>,
    /// Worker threads (default: one per CPU).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Export {
    Surface,
    Tau,
    Spectrum,
    Scatter,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Tables to write per day; tau and spectrum are always written.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub export: Vec<Export>,
}

#[derive(Debug, Clone, Args)]
pub struct ShuffleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of shuffled replicates per day.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long, value_delimiter = ',', value_enum)]
    pub export: Vec<Export>,
    /// Include every replicate's (Δα, F) in the report JSON.
    #[arg(long)]
    pub replicates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Constant,
    Iid,
    Walk,
    Cascade,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Output CSV (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub days: usize,
    /// Points per day (ignored for cascades, which have 2^levels).
    #[arg(long, default_value_t = 240)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Constant value, iid level, or walk start.
    #[arg(long)]
    pub value: Option<f64>,
    /// iid log-sd or walk step log-sd.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0.6)]
    pub p: f64,
    #[arg(long, default_value_t = 12)]
    pub levels: u32,
    /// Flip each cascade node's orientation at random.
    #[arg(long)]
    pub random_orientation: bool,
    /// First calendar day (weekends are skipped).
    #[arg(long, default_value = "2001-01-02")]
    pub start_date: String,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Ingest(String),
    Numeric(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Ingest(_) => 3,
            Failure::Numeric(_) => 4,
            Failure::Output(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Ingest(m) | Failure::Numeric(m) | Failure::Output(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io { .. }
            | Error::MissingColumn { .. }
            | Error::MalformedRow { .. }
            | Error::InvalidSeries(_) => Failure::Ingest(msg),
            Error::InvalidScheme(_)
            | Error::InvalidGrid(_)
            | Error::InvalidParameter(_)
            | Error::NonDivisor { .. } => Failure::Config(msg),
            Error::Numeric(_) | Error::DegenerateScatter(_) => Failure::Numeric(msg),
        }
    }
}

fn output_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Output(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("boxmf: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => with_workers(a.grid.workers, || run_analyze(&a)),
        Command::ShuffleTest(a) => with_workers(a.grid.workers, || run_shuffle_test(&a, false)),
        Command::Batch(a) => with_workers(a.grid.workers, || run_shuffle_test(&a, true)),
        Command::Synth(a) => run_synth(&a),
    }
}

fn with_workers<F>(workers: Option<usize>, f: F) -> Result<(), Failure>
where
    F: FnOnce() -> Result<(), Failure> + Send,
{
    match workers {
        None => f(),
        Some(0) => Err(Failure::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Config(format!("cannot start {n} workers: {e}")))?
            .install(f),
    }
}

struct Prepared {
    days: Vec<PriceSeries>,
    dropped: Vec<DroppedDay>,
    scheme: Option<BoxScheme>,
    grid: MomentGrid,
}

fn prepare(input: &InputArgs, grid_args: &GridArgs) -> Result<Prepared, Failure> {
    let grid = MomentGrid::range(grid_args.q_min, grid_args.q_max, grid_args.q_step)?;
    let columns = ColumnSpec {
        date: input.date_col.clone(),
        time: (!input.time_col.is_empty()).then(|| input.time_col.clone()),
        price: input.price_col.clone(),
    };
    let records = if input.input.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::Ingest(format!("cannot read standard input: {e}")))?;
        parse_intraday_reader(&buf[..], Path::new("<stdin>"), &columns)?
    } else {
        parse_intraday_csv(&input.input, &columns)?
    };
    let seg = segment_by_day(&records);
    for d in &seg.dropped {
        eprintln!("boxmf: dropped day {}: {:?}", d.day, d.reason);
    }
    let scheme = match (seg.modal_length, &grid_args.boxes) {
        (None, _) => None,
        (Some(len), Some(sizes)) => Some(BoxScheme::with_sizes(len, sizes)?),
        (Some(len), None) => Some(BoxScheme::derive(len)?),
    };
    Ok(Prepared {
        days: seg.days,
        dropped: seg.dropped,
        scheme,
        grid,
    })
}

fn day_dir(outdir: &Path, day: &str) -> PathBuf {
    let safe: String = day
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    outdir.join(safe)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn table<F>(f: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn put(path: PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(&path, bytes).map_err(|e| output_failure(&path, e))
}

#[derive(Serialize)]
struct AnalyzeIndex<'a> {
    days: &'a [DaySummary],
    dropped: &'a [DroppedDay],
}

fn run_analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    use rayon::prelude::*;

    let prep = prepare(&a.input, &a.grid)?;
    let outdir = &a.input.outdir;
    let mut summaries = Vec::new();
    if let Some(scheme) = &prep.scheme {
        let analyses = prep
            .days
            .par_iter()
            .map(|d| analyze_series(d, scheme, &prep.grid))
            .collect::<crate::error::Result<Vec<_>>>()?;
        for an in &analyses {
            let dir = day_dir(outdir, &an.day);
            put(
                dir.join("tau.csv"),
                &table(|w| write_tau_csv(&an.exponents, w)),
            )?;
            put(
                dir.join("spectrum.csv"),
                &table(|w| write_spectrum_csv(&an.spectrum, w)),
            )?;
            if a.export.contains(&Export::Surface) {
                put(
                    dir.join("surface.csv"),
                    &table(|w| write_surface_csv(&an.surface, w)),
                )?;
            }
            let summary = an.summary();
            put(dir.join("summary.json"), &json_bytes(&summary))?;
            summaries.push(summary);
        }
    }
    put(
        outdir.join("analysis.json"),
        &json_bytes(&AnalyzeIndex {
            days: &summaries,
            dropped: &prep.dropped,
        }),
    )?;
    eprintln!(
        "boxmf: analyzed {} day(s) into {}",
        summaries.len(),
        outdir.display()
    );
    Ok(())
}

fn run_shuffle_test(a: &ShuffleArgs, batch_table: bool) -> Result<(), Failure> {
    let cfg = BootstrapConfig {
        replicates: a.bootstrap,
        master_seed: a.seed,
        significance_level: a.level,
    };
    cfg.validate()?;
    let prep = prepare(&a.input, &a.grid)?;
    let outdir = &a.input.outdir;

    let Some(scheme) = &prep.scheme else {
        eprintln!("boxmf: no usable days in input");
        return Ok(());
    };
    let reports = bootstrap_days(&prep.days, scheme, &prep.grid, &cfg)?;
    for r in &reports {
        for w in r.consistency_warnings() {
            eprintln!("boxmf: note: {w}");
        }
    }

    if batch_table {
        let analyses = prep
            .days
            .iter()
            .map(|d| analyze_series(d, scheme, &prep.grid).map(|an| an.summary()))
            .collect::<crate::error::Result<Vec<_>>>()?;
        let summary = batch_summary(&reports, cfg.significance_level)?;
        put(
            outdir.join("per_day.csv"),
            batch_csv(&analyses, &reports).as_bytes(),
        )?;
        put(
            outdir.join("batch_summary.json"),
            &json_bytes(&BatchJson {
                summary: &summary,
                days: &analyses,
                dropped: &prep.dropped,
            }),
        )?;
    } else {
        for r in &reports {
            let dir = day_dir(outdir, &r.day);
            put(
                dir.join("bootstrap.json"),
                &json_bytes(&r.to_json(a.replicates)),
            )?;
            if a.export.contains(&Export::Scatter) {
                put(dir.join("scatter.csv"), &table(|w| write_scatter_csv(r, w)))?;
            }
        }
        if reports.len() > 1 {
            let summary = batch_summary(&reports, cfg.significance_level)?;
            put(outdir.join("batch_summary.json"), &json_bytes(&summary))?;
        }
    }
    eprintln!(
        "boxmf: tested {} day(s) into {}",
        reports.len(),
        outdir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct BatchJson<'a> {
    summary: &'a crate::bootstrap::BatchSummary,
    days: &'a [DaySummary],
    dropped: &'a [DroppedDay],
}

fn batch_csv(analyses: &[DaySummary], reports: &[BootstrapReport]) -> String {
    let mut out = String::from("day,alpha_bar,alpha_bar_stderr,delta_alpha,F,k,b,p1,p2\n");
    for (an, r) in analyses.iter().zip(reports) {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            an.day,
            an.alpha_bar,
            an.alpha_bar_stderr,
            r.original.delta_alpha,
            r.original.big_f,
            opt(r.line.map(|l| l.k)),
            opt(r.line.map(|l| l.b)),
            r.p1,
            r.p2
        );
    }
    out
}

fn trading_days(start: &str, count: usize) -> Result<Vec<String>, Failure> {
    let mut d = NaiveDate::parse_from_str(start, "%Y-%m-%d")
        .map_err(|e| Failure::Config(format!("bad --start-date `{start}`: {e}")))?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d.format("%Y-%m-%d").to_string());
        }
        d = d
            .checked_add_days(Days::new(1))
            .ok_or_else(|| Failure::Config("date overflow".into()))?;
    }
    Ok(out)
}

fn run_synth(a: &SynthArgs) -> Result<(), Failure> {
    if a.days == 0 {
        return Err(Failure::Config("--days must be at least 1".into()));
    }
    let ids = trading_days(&a.start_date, a.days)?;
    let mut days = Vec::with_capacity(a.days);
    for (i, id) in ids.iter().enumerate() {
        let seed = stream_seed(a.seed, i as u64);
        let day = match a.kind {
            SynthKind::Constant => constant_series(id, a.length, a.value.unwrap_or(1.0))?,
            SynthKind::Iid => random_positive_series(
                id,
                a.length,
                RandomKind::IidLognormal {
                    level: a.value.unwrap_or(1.0),
                    sigma: a.sigma.unwrap_or(0.01),
                },
                seed,
            )?,
            SynthKind::Walk => random_positive_series(
                id,
                a.length,
                RandomKind::IntradayWalk {
                    start: a.value.unwrap_or(15000.0),
                    step_sigma: a.sigma.unwrap_or(0.0005),
                },
                seed,
            )?,
            SynthKind::Cascade => {
                let spec = CascadeSpec::new(a.p, a.levels, a.value.unwrap_or(1.0))?;
                binomial_cascade(id, &spec, a.random_orientation.then_some(seed))?
            }
        };
        days.push(day);
    }
    let bytes = table(|w| write_series_csv(&days, w));
    match &a.output {
        Some(path) => put(path.clone(), &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Output(format!("cannot write standard output: {e}"))),
    }
}
