//! Readers and writers for every on-disk format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use vfr_ladder_core::bd::XKind;
use vfr_ladder_core::ladder::{
    FramerateSet, Ladder, MeasurementRecord, MeasurementTable, Representation,
};
use vfr_ladder_core::plan::{EnergyEntry, EnergyLog, JobKey, JobPlan, Stage, Templates};
use vfr_ladder_core::report::{EvaluationReport, RungDelta};
use vfr_ladder_core::select::SelectionResult;
use vfr_ladder_core::synth::SyntheticModel;
use vfr_ladder_core::CellKey;

/// Header of the measurements CSV.
pub const MEASUREMENTS_HEADER: [&str; 9] = [
    "sequence",
    "bitrate_kbps",
    "height_px",
    "framerate_fps",
    "vmaf",
    "psnr_db",
    "ssim",
    "decode_energy_j",
    "encode_energy_j",
];

/// Header of the selection CSV.
pub const SELECTION_HEADER: [&str; 8] = [
    "sequence",
    "bitrate_kbps",
    "height_px",
    "threshold",
    "selector",
    "framerate_fps",
    "achieved_quality",
    "decode_energy_j",
];

/// Header of the energy log CSV.
pub const ENERGY_LOG_HEADER: [&str; 7] = [
    "sequence",
    "bitrate_kbps",
    "height_px",
    "framerate_fps",
    "stage",
    "run_index",
    "energy_j",
];

/// A problem with one input row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    /// 1-based line (CSV) or element index (JSON).
    pub line: u64,
    /// What went wrong.
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Errors reading or writing files.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// CSV structure error (bad header, unequal row lengths, ...).
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// JSON syntax or schema error.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// One or more rows are invalid; every problem is listed.
    #[error("{} invalid row(s): {}", .0.len(), join_rows(.0))]
    Rows(Vec<RowError>),
    /// Header does not contain the expected columns.
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header {
        /// Expected header line.
        expected: String,
        /// Header as read.
        found: String,
    },
    /// Core validation failure.
    #[error(transparent)]
    Core(#[from] vfr_ladder_core::Error),
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Measurement file encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementFormat {
    /// Comma-separated with the fixed header.
    Csv,
    /// Array of objects.
    Json,
}

impl MeasurementFormat {
    /// `.json` means JSON; anything else is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => MeasurementFormat::Json,
            _ => MeasurementFormat::Csv,
        }
    }
}

#[derive(Debug, Deserialize)]
struct MeasurementRow {
    sequence: String,
    bitrate_kbps: u32,
    height_px: u32,
    framerate_fps: u32,
    vmaf: f64,
    psnr_db: f64,
    ssim: Option<f64>,
    decode_energy_j: f64,
    encode_energy_j: Option<f64>,
}

impl From<MeasurementRow> for MeasurementRecord {
    fn from(r: MeasurementRow) -> Self {
        MeasurementRecord {
            sequence_id: r.sequence,
            bitrate_kbps: r.bitrate_kbps,
            height_px: r.height_px,
            framerate_fps: r.framerate_fps,
            vmaf: r.vmaf,
            psnr_db: r.psnr_db,
            ssim: r.ssim,
            decode_energy_j: r.decode_energy_j,
            encode_energy_j: r.encode_energy_j,
        }
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), FormatError> {
    let ok =
        found.len() == expected.len() && found.iter().zip(expected).all(|(a, b)| a.trim() == *b);
    if ok {
        Ok(())
    } else {
        Err(FormatError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        })
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source)
}

/// Parses measurements against `ladder`, collecting every bad row.
pub fn parse_measurements<R: Read>(
    source: R,
    format: MeasurementFormat,
    ladder: &Ladder,
) -> Result<MeasurementTable, FormatError> {
    let rows: Vec<(u64, Result<MeasurementRecord, String>)> = match format {
        MeasurementFormat::Csv => {
            let mut rdr = csv_reader(source);
            let headers = rdr.headers()?.clone();
            check_header(&headers, &MEASUREMENTS_HEADER)?;
            let mut rows = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let line = rec.position().map_or(0, |p| p.line());
                let parsed = rec
                    .deserialize::<MeasurementRow>(Some(&headers))
                    .map(MeasurementRecord::from)
                    .map_err(|e| e.to_string());
                rows.push((line, parsed));
            }
            rows
        }
        MeasurementFormat::Json => {
            let values: Vec<serde_json::Value> = serde_json::from_reader(source)?;
            values
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    let parsed = serde_json::from_value::<MeasurementRow>(v)
                        .map(MeasurementRecord::from)
                        .map_err(|e| e.to_string());
                    (i as u64 + 1, parsed)
                })
                .collect()
        }
    };
    let mut table = MeasurementTable::new(ladder.clone());
    let mut errors = Vec::new();
    for (line, row) in rows {
        let result = row.and_then(|rec| table.insert(rec).map_err(|e| e.to_string()));
        if let Err(message) = result {
            errors.push(RowError { line, message });
        }
    }
    if errors.is_empty() {
        Ok(table)
    } else {
        Err(FormatError::Rows(errors))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes measurements as CSV in key order. Floats use shortest round-trip
/// formatting, so parsing the output reproduces the table exactly.
pub fn write_measurements_csv<W: Write>(
    table: &MeasurementTable,
    out: W,
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEASUREMENTS_HEADER)?;
    for r in table.records() {
        w.write_record([
            r.sequence_id.clone(),
            r.bitrate_kbps.to_string(),
            r.height_px.to_string(),
            r.framerate_fps.to_string(),
            r.vmaf.to_string(),
            r.psnr_db.to_string(),
            opt(r.ssim),
            r.decode_energy_j.to_string(),
            opt(r.encode_energy_j),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes measurements as a JSON array.
pub fn write_measurements_json<W: Write>(
    table: &MeasurementTable,
    out: W,
) -> Result<(), FormatError> {
    let records: Vec<&MeasurementRecord> = table.records().collect();
    serde_json::to_writer_pretty(out, &records)?;
    Ok(())
}

/// Ladder configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    /// Rungs ordered by bitrate.
    pub rungs: Vec<Representation>,
    /// Candidate framerates.
    pub framerates_fps: Vec<u32>,
    /// Quality-degradation thresholds.
    pub thresholds: Vec<f64>,
}

impl LadderConfig {
    /// Validates into a [`Ladder`].
    pub fn into_ladder(self) -> Result<Ladder, FormatError> {
        Ok(Ladder::new(
            self.rungs,
            FramerateSet::new(self.framerates_fps)?,
            self.thresholds,
        )?)
    }
}

impl From<&Ladder> for LadderConfig {
    fn from(l: &Ladder) -> Self {
        LadderConfig {
            rungs: l.rungs().to_vec(),
            framerates_fps: l.framerates().as_slice().to_vec(),
            thresholds: l.thresholds().to_vec(),
        }
    }
}

/// Reads a ladder config.
pub fn read_ladder<R: Read>(source: R) -> Result<Ladder, FormatError> {
    let cfg: LadderConfig = serde_json::from_reader(source)?;
    cfg.into_ladder()
}

/// Writes a ladder config.
pub fn write_ladder<W: Write>(ladder: &Ladder, out: W) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(out, &LadderConfig::from(ladder))?;
    Ok(())
}

/// Writes selection results.
pub fn write_selections_csv<W: Write>(
    results: &[SelectionResult],
    out: W,
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SELECTION_HEADER)?;
    for r in results {
        w.write_record([
            r.sequence_id.clone(),
            r.rung.bitrate_kbps.to_string(),
            r.rung.height_px.to_string(),
            r.threshold.to_string(),
            r.selector.to_string(),
            r.framerate_fps.to_string(),
            r.achieved_quality.to_string(),
            r.decode_energy_j.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads selection results back.
pub fn read_selections_csv<R: Read>(source: R) -> Result<Vec<SelectionResult>, FormatError> {
    let mut rdr = csv_reader(source);
    let headers = rdr.headers()?.clone();
    check_header(&headers, &SELECTION_HEADER)?;
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parsed = (|| -> Result<SelectionResult, String> {
            let field = |i: usize| rec.get(i).unwrap_or_default();
            let num = |i: usize| {
                field(i)
                    .parse::<f64>()
                    .map_err(|e| format!("{}: {e}", SELECTION_HEADER[i]))
            };
            let int = |i: usize| {
                field(i)
                    .parse::<u32>()
                    .map_err(|e| format!("{}: {e}", SELECTION_HEADER[i]))
            };
            Ok(SelectionResult {
                sequence_id: field(0).to_string(),
                rung: Representation::new(int(1)?, int(2)?).map_err(|e| e.to_string())?,
                threshold: num(3)?,
                selector: field(4)
                    .parse()
                    .map_err(|e: vfr_ladder_core::Error| e.to_string())?,
                framerate_fps: int(5)?,
                achieved_quality: num(6)?,
                decode_energy_j: num(7)?,
            })
        })();
        match parsed {
            Ok(r) => out.push(r),
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(FormatError::Rows(errors))
    }
}

/// Writes plot data: a `# x_kind=` comment, the `x,quality` header, points.
pub fn write_curve_csv<W: Write>(
    kind: XKind,
    points: &[(f64, f64)],
    mut out: W,
) -> Result<(), FormatError> {
    writeln!(out, "# x_kind={}", kind.as_str())?;
    writeln!(out, "x,quality")?;
    for (x, q) in points {
        writeln!(out, "{x},{q}")?;
    }
    Ok(())
}

/// Reads plot data written by [`write_curve_csv`].
pub fn read_curve_csv<R: Read>(source: R) -> Result<(XKind, Vec<(f64, f64)>), FormatError> {
    let mut text = String::new();
    let mut source = source;
    source.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate();
    let kind = match lines.next() {
        Some((_, "# x_kind=bitrate_kbps")) => XKind::BitrateKbps,
        Some((_, "# x_kind=decode_energy_j")) => XKind::DecodeEnergyJ,
        other => {
            return Err(FormatError::Header {
                expected: "# x_kind=<bitrate_kbps|decode_energy_j>".into(),
                found: other.map(|(_, l)| l.to_string()).unwrap_or_default(),
            })
        }
    };
    match lines.next() {
        Some((_, "x,quality")) => {}
        other => {
            return Err(FormatError::Header {
                expected: "x,quality".into(),
                found: other.map(|(_, l)| l.to_string()).unwrap_or_default(),
            })
        }
    }
    let mut points = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let parsed = line
            .split_once(',')
            .and_then(|(x, q)| Some((x.trim().parse().ok()?, q.trim().parse().ok()?)));
        match parsed {
            Some(p) => points.push(p),
            None => errors.push(RowError {
                line: i as u64 + 1,
                message: format!("expected `x,quality`, got `{line}`"),
            }),
        }
    }
    if errors.is_empty() {
        Ok((kind, points))
    } else {
        Err(FormatError::Rows(errors))
    }
}

#[derive(Serialize)]
struct JobJson<'a> {
    stage: Stage,
    sequence: &'a str,
    bitrate_kbps: u32,
    height_px: u32,
    framerate_fps: u32,
    args: &'a [String],
}

fn job_json(plan: &JobPlan) -> impl Iterator<Item = JobJson<'_>> {
    plan.jobs.iter().map(|j| JobJson {
        stage: j.stage,
        sequence: &j.sequence_id,
        bitrate_kbps: j.rung.bitrate_kbps,
        height_px: j.rung.height_px,
        framerate_fps: j.framerate_fps,
        args: &j.substituted_args,
    })
}

/// Writes `{ "jobs": [...] }`.
pub fn write_plan_json<W: Write>(plan: &JobPlan, mut out: W) -> Result<(), FormatError> {
    #[derive(Serialize)]
    struct PlanJson<'a> {
        jobs: Vec<JobJson<'a>>,
    }
    serde_json::to_writer_pretty(
        &mut out,
        &PlanJson {
            jobs: job_json(plan).collect(),
        },
    )?;
    writeln!(out)?;
    Ok(())
}

/// Writes one job object per line.
pub fn write_plan_ndjson<W: Write>(plan: &JobPlan, mut out: W) -> Result<(), FormatError> {
    for job in job_json(plan) {
        serde_json::to_writer(&mut out, &job)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a `{"stage name": "template", ...}` map; every key must be a stage.
pub fn read_templates<R: Read>(source: R) -> Result<Templates, FormatError> {
    let raw: BTreeMap<String, String> = serde_json::from_reader(source)?;
    raw.into_iter()
        .map(|(k, v)| Ok((k.parse::<Stage>()?, v)))
        .collect()
}

/// Reads an energy log CSV.
pub fn read_energy_log<R: Read>(source: R) -> Result<EnergyLog, FormatError> {
    #[derive(Deserialize)]
    struct Row {
        sequence: String,
        bitrate_kbps: u32,
        height_px: u32,
        framerate_fps: u32,
        stage: String,
        run_index: u32,
        energy_j: f64,
    }
    let mut rdr = csv_reader(source);
    let headers = rdr.headers()?.clone();
    check_header(&headers, &ENERGY_LOG_HEADER)?;
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parsed = rec
            .deserialize::<Row>(Some(&headers))
            .map_err(|e| e.to_string())
            .and_then(|r| {
                let stage = r.stage.parse::<Stage>().map_err(|e| e.to_string())?;
                Ok(EnergyEntry {
                    key: JobKey {
                        cell: CellKey {
                            sequence_id: r.sequence,
                            bitrate_kbps: r.bitrate_kbps,
                            height_px: r.height_px,
                            framerate_fps: r.framerate_fps,
                        },
                        stage,
                    },
                    run_index: r.run_index,
                    energy_j: r.energy_j,
                })
            });
        match parsed {
            Ok(e) => entries.push(e),
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    if errors.is_empty() {
        Ok(EnergyLog { entries })
    } else {
        Err(FormatError::Rows(errors))
    }
}

/// Writes an energy log CSV.
pub fn write_energy_log<W: Write>(log: &EnergyLog, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENERGY_LOG_HEADER)?;
    for e in &log.entries {
        w.write_record([
            e.key.cell.sequence_id.clone(),
            e.key.cell.bitrate_kbps.to_string(),
            e.key.cell.height_px.to_string(),
            e.key.cell.framerate_fps.to_string(),
            e.key.stage.to_string(),
            e.run_index.to_string(),
            e.energy_j.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a synthetic model.
pub fn read_model<R: Read>(source: R) -> Result<SyntheticModel, FormatError> {
    Ok(serde_json::from_reader(source)?)
}

/// Writes a synthetic model.
pub fn write_model<W: Write>(model: &SyntheticModel, out: W) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(out, model)?;
    Ok(())
}

/// Formats to exactly four decimals; `-0.0000` becomes `0.0000`.
pub fn fixed4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn raw4(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        fixed4(x)
    } else {
        "null".into()
    };
    RawValue::from_string(text).expect("fixed-point number is valid JSON")
}

fn raw4_opt(x: Option<f64>) -> Box<RawValue> {
    x.map_or_else(
        || RawValue::from_string("null".into()).expect("null is JSON"),
        raw4,
    )
}

/// Rung deltas for one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRungDeltas {
    /// Threshold the deltas were computed at.
    pub threshold: f64,
    /// One entry per rung.
    pub rungs: Vec<RungDelta>,
}

/// Writes the evaluation report as JSON with four-decimal numbers.
pub fn write_report_json<W: Write>(
    report: &EvaluationReport,
    deltas: &[ThresholdRungDeltas],
    mut out: W,
) -> Result<(), FormatError> {
    #[derive(Serialize)]
    struct Row {
        method: &'static str,
        threshold: Box<RawValue>,
        bd_psnr_db: Box<RawValue>,
        bd_vmaf: Box<RawValue>,
        delta_e_enc_pct: Box<RawValue>,
        delta_e_dec_pct: Box<RawValue>,
        bdde_psnr_pct: Box<RawValue>,
        bdde_vmaf_pct: Box<RawValue>,
    }
    #[derive(Serialize)]
    struct Delta {
        bitrate_kbps: u32,
        height_px: u32,
        vmaf_decrease: Box<RawValue>,
        decode_energy_reduction_pct: Box<RawValue>,
    }
    #[derive(Serialize)]
    struct DeltaSet {
        threshold: Box<RawValue>,
        rungs: Vec<Delta>,
    }
    #[derive(Serialize)]
    struct Report {
        reference: &'static str,
        aggregation: &'static str,
        rows: Vec<Row>,
        rung_deltas: Vec<DeltaSet>,
    }
    let doc = Report {
        reference: "default",
        aggregation: report.aggregation.as_str(),
        rows: report
            .rows
            .iter()
            .map(|r| Row {
                method: r.method.as_str(),
                threshold: raw4_opt(r.threshold),
                bd_psnr_db: raw4(r.bd_psnr_db),
                bd_vmaf: raw4(r.bd_vmaf),
                delta_e_enc_pct: raw4_opt(r.delta_e_enc_pct),
                delta_e_dec_pct: raw4(r.delta_e_dec_pct),
                bdde_psnr_pct: raw4(r.bdde_psnr_pct),
                bdde_vmaf_pct: raw4(r.bdde_vmaf_pct),
            })
            .collect(),
        rung_deltas: deltas
            .iter()
            .map(|d| DeltaSet {
                threshold: raw4(d.threshold),
                rungs: d
                    .rungs
                    .iter()
                    .map(|r| Delta {
                        bitrate_kbps: r.rung.bitrate_kbps,
                        height_px: r.rung.height_px,
                        vmaf_decrease: raw4(r.vmaf_decrease),
                        decode_energy_reduction_pct: raw4(r.decode_energy_reduction_pct),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn opt4(x: Option<f64>) -> String {
    x.map(fixed4).unwrap_or_default()
}

/// Writes the report rows as CSV.
pub fn write_report_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "threshold",
        "bd_psnr_db",
        "bd_vmaf",
        "delta_e_enc_pct",
        "delta_e_dec_pct",
        "bdde_psnr_pct",
        "bdde_vmaf_pct",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.method.as_str().to_string(),
            opt4(r.threshold),
            fixed4(r.bd_psnr_db),
            fixed4(r.bd_vmaf),
            opt4(r.delta_e_enc_pct),
            fixed4(r.delta_e_dec_pct),
            fixed4(r.bdde_psnr_pct),
            fixed4(r.bdde_vmaf_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rung deltas as CSV, one line per (threshold, rung).
pub fn write_rung_deltas_csv<W: Write>(
    deltas: &[ThresholdRungDeltas],
    out: W,
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "threshold",
        "bitrate_kbps",
        "height_px",
        "vmaf_decrease",
        "decode_energy_reduction_pct",
    ])?;
    for d in deltas {
        for r in &d.rungs {
            w.write_record([
                fixed4(d.threshold),
                r.rung.bitrate_kbps.to_string(),
                r.rung.height_px.to_string(),
                fixed4(r.vmaf_decrease),
                fixed4(r.decode_energy_reduction_pct),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Markdown tables: the evaluation rows in the usual column order, then the
/// per-rung deltas.
pub fn render_report_markdown(report: &EvaluationReport, deltas: &[ThresholdRungDeltas]) -> String {
    let mut s = String::new();
    let method_name = |r: &vfr_ladder_core::report::ReportRow| match r.method {
        vfr_ladder_core::Selector::Hq => "HQ",
        vfr_ladder_core::Selector::Decodra => "DECODRA",
        vfr_ladder_core::Selector::Default => "Default",
    };
    let _ = writeln!(
        s,
        "Reference: Default (60 fps), BD aggregation: {}",
        report.aggregation.as_str()
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "| Method | v_J | BD-PSNR | BD-VMAF | ΔE_enc | ΔE_dec | BDDE (PSNR) | BDDE (VMAF) |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            method_name(r),
            r.threshold.map(fixed4).unwrap_or_else(|| "-".into()),
            fixed4(r.bd_psnr_db),
            fixed4(r.bd_vmaf),
            r.delta_e_enc_pct.map(fixed4).unwrap_or_else(|| "-".into()),
            fixed4(r.delta_e_dec_pct),
            fixed4(r.bdde_psnr_pct),
            fixed4(r.bdde_vmaf_pct),
        );
    }
    for d in deltas {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "Per-rung deltas versus HQ at v_J = {}",
            fixed4(d.threshold)
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "| Bitrate [kbps] | Height [px] | VMAF decrease | Decoding energy reduction [%] |"
        );
        let _ = writeln!(s, "|---|---|---|---|");
        for r in &d.rungs {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                r.rung.bitrate_kbps,
                r.rung.height_px,
                fixed4(r.vmaf_decrease),
                fixed4(r.decode_energy_reduction_pct)
            );
        }
    }
    s
}
