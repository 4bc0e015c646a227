//! Subcommands. Exit status: 0 success, 1 data or validation failure,
//! 2 usage error. Diagnostics go to stderr, data to files or stdout.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use vfr_ladder_core::bd::{selection_points, Aggregate, Axis};
use vfr_ladder_core::ladder::{validate_completeness, Ladder, MeasurementTable};
use vfr_ladder_core::plan::{average_energy, build_plan, merge_energy, RunPolicy, Stage};
use vfr_ladder_core::report::{build_report_with, rung_deltas, BdAggregation, ReportOptions};
use vfr_ladder_core::select::{sweep, Selector};
use vfr_ladder_core::synth::generate;

use crate::formats::{self, MeasurementFormat, ThresholdRungDeltas};

#[derive(Debug, Parser)]
#[command(
    name = "vfr-ladder",
    version,
    about = "Variable-framerate bitrate ladder selection and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectorArg {
    Decodra,
    Default,
    Hq,
}

impl From<SelectorArg> for Selector {
    fn from(s: SelectorArg) -> Self {
        match s {
            SelectorArg::Decodra => Selector::Decodra,
            SelectorArg::Default => Selector::Default,
            SelectorArg::Hq => Selector::Hq,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Bitrate,
    Energy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregationArg {
    PerSequence,
    MeanCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlanFormat {
    Json,
    Ndjson,
}

#[derive(Debug, clap::Args)]
struct Inputs {
    /// Measurements file (.csv or .json).
    #[arg(long)]
    measurements: PathBuf,
    /// Ladder config JSON.
    #[arg(long)]
    ladder: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report grid cells missing from a measurements file.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run a selector over every sequence and rung.
    Select {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        selector: SelectorArg,
        /// Comma-separated thresholds; defaults to the ladder's list.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate HQ and every threshold against the 60 fps baseline.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        /// Output path; `-` writes to stdout.
        #[arg(long)]
        out: PathBuf,
        /// Output format; inferred from the --out extension when omitted.
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "per-sequence")]
        aggregation: AggregationArg,
        /// Also write per-rung deltas as CSV.
        #[arg(long)]
        rung_deltas: Option<PathBuf>,
    },
    /// Write rate-quality or energy-quality plot data.
    Curves {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        selector: SelectorArg,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Threshold for the decodra selector; defaults to the ladder's first.
        #[arg(long)]
        threshold: Option<f64>,
        /// Restrict to one sequence; otherwise points are averaged over sequences.
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the measurement pipeline as a job plan.
    Plan {
        #[arg(long)]
        ladder: PathBuf,
        /// Comma-separated sequence ids or source paths.
        #[arg(long, value_delimiter = ',', required = true)]
        sequences: Vec<String>,
        /// JSON map of stage name to command template.
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Output format; `.ndjson`/`.jsonl` extensions select ndjson.
        #[arg(long, value_enum)]
        format: Option<PlanFormat>,
    },
    /// Generate a synthetic measurements table.
    Synth {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        ladder: PathBuf,
        #[arg(long)]
        sequences: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Average an energy log and write it into the decode energy column.
    MergeEnergy {
        #[command(flatten)]
        inputs: Inputs,
        /// Energy log CSV.
        #[arg(long)]
        log: PathBuf,
        /// Accept any number of runs per job instead of exactly three.
        #[arg(long)]
        any_run_count: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<formats::FormatError> for Failure {
    fn from(e: formats::FormatError) -> Self {
        Failure::Data(e.into())
    }
}

impl From<vfr_ladder_core::Error> for Failure {
    fn from(e: vfr_ladder_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> anyhow::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn load_ladder(path: &Path) -> anyhow::Result<Ladder> {
    formats::read_ladder(open(path)?).with_context(|| format!("reading ladder {}", path.display()))
}

fn load(inputs: &Inputs) -> anyhow::Result<MeasurementTable> {
    let ladder = load_ladder(&inputs.ladder)?;
    let format = MeasurementFormat::from_path(&inputs.measurements);
    formats::parse_measurements(open(&inputs.measurements)?, format, &ladder)
        .with_context(|| format!("reading measurements {}", inputs.measurements.display()))
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Validate { inputs } => {
            let table = load(&inputs)?;
            let missing = validate_completeness(&table);
            let mut out = io::stdout().lock();
            writeln!(out, "{} missing", missing.len()).map_err(anyhow::Error::from)?;
            for key in &missing {
                writeln!(
                    out,
                    "{},{},{},{}",
                    key.sequence_id, key.bitrate_kbps, key.height_px, key.framerate_fps
                )
                .map_err(anyhow::Error::from)?;
            }
            Ok(if missing.is_empty() { 0 } else { 1 })
        }
        Command::Select {
            inputs,
            selector,
            thresholds,
            out,
        } => {
            let table = load(&inputs)?;
            let thresholds = thresholds.unwrap_or_else(|| table.ladder().thresholds().to_vec());
            let results = sweep(&table, selector.into(), &thresholds)?;
            formats::write_selections_csv(&results, create(&out)?)?;
            Ok(0)
        }
        Command::Report {
            inputs,
            out,
            format,
            thresholds,
            aggregation,
            rung_deltas: deltas_path,
        } => {
            let format = match format {
                Some(f) => f,
                None => match extension(&out).as_deref() {
                    Some("json") => ReportFormat::Json,
                    Some("csv") => ReportFormat::Csv,
                    Some("md") => ReportFormat::Md,
                    _ if out.as_os_str() == "-" => ReportFormat::Json,
                    _ => {
                        return Err(Failure::Usage(format!(
                            "cannot infer report format from {}; pass --format",
                            out.display()
                        )))
                    }
                },
            };
            let table = load(&inputs)?;
            let options = ReportOptions {
                thresholds,
                aggregation: match aggregation {
                    AggregationArg::PerSequence => BdAggregation::PerSequence,
                    AggregationArg::MeanCurve => BdAggregation::MeanCurve,
                },
            };
            let report = build_report_with(&table, &options)?;
            let deltas = report
                .rows
                .iter()
                .filter_map(|r| r.threshold)
                .map(|t| {
                    Ok(ThresholdRungDeltas {
                        threshold: t,
                        rungs: rung_deltas(&table, t)?,
                    })
                })
                .collect::<Result<Vec<_>, vfr_ladder_core::Error>>()?;
            let mut w = create(&out)?;
            match format {
                ReportFormat::Json => formats::write_report_json(&report, &deltas, &mut w)?,
                ReportFormat::Csv => formats::write_report_csv(&report, &mut w)?,
                ReportFormat::Md => w
                    .write_all(formats::render_report_markdown(&report, &deltas).as_bytes())
                    .map_err(anyhow::Error::from)?,
            }
            w.flush().map_err(anyhow::Error::from)?;
            if let Some(path) = deltas_path {
                formats::write_rung_deltas_csv(&deltas, create(&path)?)?;
            }
            Ok(0)
        }
        Command::Curves {
            inputs,
            selector,
            axis,
            threshold,
            sequence,
            out,
        } => {
            let table = load(&inputs)?;
            let selector = Selector::from(selector);
            let threshold = match (selector, threshold) {
                (Selector::Decodra, Some(t)) => t,
                (Selector::Decodra, None) => {
                    *table.ladder().thresholds().first().ok_or_else(|| {
                        Failure::Usage("no threshold given and the ladder lists none".into())
                    })?
                }
                (_, _) => 0.0,
            };
            let mut results = sweep(&table, selector, &[threshold])?;
            let aggregate = match &sequence {
                Some(seq) => {
                    results.retain(|r| &r.sequence_id == seq);
                    if results.is_empty() {
                        return Err(Failure::Data(anyhow!(
                            "sequence `{seq}` not in measurements"
                        )));
                    }
                    Aggregate::PerSequence
                }
                None => Aggregate::MeanOverSequences,
            };
            let axis = match axis {
                AxisArg::Bitrate => Axis::Bitrate,
                AxisArg::Energy => Axis::Energy,
            };
            let points = selection_points(&results, table.ladder().rungs(), axis, aggregate)?;
            formats::write_curve_csv(axis.x_kind(), &points, create(&out)?)?;
            Ok(0)
        }
        Command::Plan {
            ladder,
            sequences,
            templates,
            out,
            format,
        } => {
            let ladder = load_ladder(&ladder)?;
            let templates = formats::read_templates(open(&templates)?)?;
            let plan = build_plan(&sequences, &ladder, &templates)?;
            let format = format.unwrap_or(match extension(&out).as_deref() {
                Some("ndjson" | "jsonl") => PlanFormat::Ndjson,
                _ => PlanFormat::Json,
            });
            let mut w = create(&out)?;
            match format {
                PlanFormat::Json => formats::write_plan_json(&plan, &mut w)?,
                PlanFormat::Ndjson => formats::write_plan_ndjson(&plan, &mut w)?,
            }
            w.flush().map_err(anyhow::Error::from)?;
            Ok(0)
        }
        Command::Synth {
            model,
            ladder,
            sequences,
            out,
        } => {
            if sequences == 0 {
                return Err(Failure::Usage("--sequences must be positive".into()));
            }
            let ladder = load_ladder(&ladder)?;
            let model = formats::read_model(open(&model)?)?;
            let table = generate(&model, &ladder, sequences)?;
            let w = create(&out)?;
            match MeasurementFormat::from_path(&out) {
                MeasurementFormat::Csv => formats::write_measurements_csv(&table, w)?,
                MeasurementFormat::Json => formats::write_measurements_json(&table, w)?,
            }
            Ok(0)
        }
        Command::MergeEnergy {
            inputs,
            log,
            any_run_count,
            out,
        } => {
            let table = load(&inputs)?;
            let log = formats::read_energy_log(open(&log)?)?;
            let policy = if any_run_count {
                RunPolicy::AnyCount
            } else {
                RunPolicy::ExactlyThree
            };
            let mut averaged = average_energy(&log, policy)?;
            // other stages are averaged too but only decode energy has a column
            averaged.retain(|k, _| k.stage == Stage::Decode);
            let merged = merge_energy(&table, &averaged)?;
            let w = create(&out)?;
            match MeasurementFormat::from_path(&out) {
                MeasurementFormat::Csv => formats::write_measurements_csv(&merged, w)?,
                MeasurementFormat::Json => formats::write_measurements_json(&merged, w)?,
            }
            Ok(0)
        }
    }
}
