//! Aggregate evaluation against the fixed-60-fps baseline and per-rung
//! deltas against the max-quality baseline.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bd::{
    aggregate_points, bd_quality, bdde, delta_energy, label, Aggregate, Axis, RdCurve, RungSample,
};
use crate::error::{Error, Result};
use crate::ladder::{validate_completeness, validate_thresholds, MeasurementTable, Representation};
use crate::select::{sweep, SelectionResult, Selector, DEFAULT_FRAMERATE_FPS};

/// How per-sequence results are combined into one BD value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BdAggregation {
    /// BD per sequence, then the arithmetic mean.
    #[default]
    PerSequence,
    /// BD once, on curves whose points are averaged over sequences.
    MeanCurve,
}

impl BdAggregation {
    /// Name used in report output.
    pub fn as_str(self) -> &'static str {
        match self {
            BdAggregation::PerSequence => "per_sequence",
            BdAggregation::MeanCurve => "mean_curve",
        }
    }
}

/// Options for [`build_report_with`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportOptions {
    /// Thresholds to evaluate; `None` uses the ladder's list.
    pub thresholds: Option<Vec<f64>>,
    /// BD aggregation mode.
    pub aggregation: BdAggregation,
}

/// One row of the evaluation table. Default is the implicit reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// `Hq` or `Decodra`.
    pub method: Selector,
    /// Threshold for `Decodra` rows.
    pub threshold: Option<f64>,
    /// BD-PSNR in dB.
    pub bd_psnr_db: f64,
    /// BD-VMAF in points.
    pub bd_vmaf: f64,
    /// Encoding-energy change in percent; absent without encode energies.
    pub delta_e_enc_pct: Option<f64>,
    /// Decoding-energy change in percent.
    pub delta_e_dec_pct: f64,
    /// BDDE on PSNR curves, percent.
    pub bdde_psnr_pct: f64,
    /// BDDE on VMAF curves, percent.
    pub bdde_vmaf_pct: f64,
}

/// HQ row followed by one row per threshold, thresholds ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// How BD values were aggregated.
    pub aggregation: BdAggregation,
    /// Evaluation rows.
    pub rows: Vec<ReportRow>,
}

/// Quality loss and energy saving of the threshold selector relative to the
/// max-quality selector on one rung, averaged over sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RungDelta {
    /// The rung.
    pub rung: Representation,
    /// Mean `VMAF_hq - VMAF_decodra`.
    pub vmaf_decrease: f64,
    /// Mean `100 * (E_hq - E_decodra) / E_hq`.
    pub decode_energy_reduction_pct: f64,
}

#[derive(Clone, Copy)]
enum Metric {
    Vmaf,
    Psnr,
}

fn samples<'a>(
    table: &MeasurementTable,
    results: &'a [SelectionResult],
    metric: Metric,
) -> Vec<RungSample<'a>> {
    results
        .iter()
        .map(|r| {
            let quality = match metric {
                Metric::Vmaf => r.achieved_quality,
                Metric::Psnr => table
                    .get_cell(&r.sequence_id, r.rung, r.framerate_fps)
                    .map(|rec| rec.psnr_db)
                    .unwrap_or(f64::NAN),
            };
            RungSample {
                sequence_id: &r.sequence_id,
                rung: r.rung,
                energy_j: r.decode_energy_j,
                quality,
            }
        })
        .collect()
}

/// The four BD values of one (reference, test) pair of selection sets.
struct BdSet {
    psnr: f64,
    vmaf: f64,
    bdde_psnr: f64,
    bdde_vmaf: f64,
}

fn bd_set(
    table: &MeasurementTable,
    reference: &[SelectionResult],
    test: &[SelectionResult],
    aggregate: Aggregate,
) -> Result<BdSet> {
    let rungs = table.ladder().rungs();
    let curve = |results: &[SelectionResult], metric, axis: Axis| -> Result<RdCurve> {
        let pts = aggregate_points(&samples(table, results, metric), rungs, axis, aggregate)?;
        RdCurve::pareto_front(axis.x_kind(), &pts)
    };
    let quality = |metric| -> Result<f64> {
        Ok(bd_quality(
            &curve(reference, metric, Axis::Bitrate)?,
            &curve(test, metric, Axis::Bitrate)?,
        )?
        .value)
    };
    let energy = |metric| -> Result<f64> {
        Ok(bdde(
            &curve(reference, metric, Axis::Energy)?,
            &curve(test, metric, Axis::Energy)?,
        )?
        .value)
    };
    Ok(BdSet {
        psnr: quality(Metric::Psnr)?,
        vmaf: quality(Metric::Vmaf)?,
        bdde_psnr: energy(Metric::Psnr)?,
        bdde_vmaf: energy(Metric::Vmaf)?,
    })
}

fn mean_bd(
    table: &MeasurementTable,
    reference: &[SelectionResult],
    test: &[SelectionResult],
    aggregation: BdAggregation,
) -> Result<BdSet> {
    if aggregation == BdAggregation::MeanCurve {
        return bd_set(table, reference, test, Aggregate::MeanOverSequences);
    }
    let sequences = table.sequences();
    let mut acc = BdSet {
        psnr: 0.0,
        vmaf: 0.0,
        bdde_psnr: 0.0,
        bdde_vmaf: 0.0,
    };
    for seq in &sequences {
        let pick = |v: &[SelectionResult]| -> Vec<SelectionResult> {
            v.iter()
                .filter(|r| &r.sequence_id == seq)
                .cloned()
                .collect()
        };
        let s = bd_set(table, &pick(reference), &pick(test), Aggregate::PerSequence)
            .map_err(|e| e.context(format!("sequence {seq}")))?;
        acc.psnr += s.psnr;
        acc.vmaf += s.vmaf;
        acc.bdde_psnr += s.bdde_psnr;
        acc.bdde_vmaf += s.bdde_vmaf;
    }
    let n = sequences.len() as f64;
    Ok(BdSet {
        psnr: acc.psnr / n,
        vmaf: acc.vmaf / n,
        bdde_psnr: acc.bdde_psnr / n,
        bdde_vmaf: acc.bdde_vmaf / n,
    })
}

fn decode_energies(results: &[SelectionResult]) -> Vec<((&str, Representation), f64)> {
    results
        .iter()
        .map(|r| ((r.sequence_id.as_str(), r.rung), r.decode_energy_j))
        .collect()
}

/// Encoding cost of encoding every framerate versus 60 fps only, shared by
/// all methods. `None` when any record lacks encode energy.
fn encode_delta(table: &MeasurementTable) -> Result<Option<f64>> {
    if table.records().any(|r| r.encode_energy_j.is_none()) {
        return Ok(None);
    }
    let mut reference = Vec::new();
    let mut all = Vec::new();
    for seq in table.sequences() {
        for &rung in table.ladder().rungs() {
            let mut total = 0.0;
            let mut at_default = 0.0;
            for &fps in table.ladder().framerates().as_slice() {
                let e = table
                    .get_cell(&seq, rung, fps)
                    .and_then(|r| r.encode_energy_j)
                    .ok_or(Error::MissingColumn("encode_energy_j"))?;
                total += e;
                if fps == DEFAULT_FRAMERATE_FPS {
                    at_default = e;
                }
            }
            reference.push(((seq.clone(), rung), at_default));
            all.push(((seq.clone(), rung), total));
        }
    }
    delta_energy(&reference, &all).map(Some)
}

/// Evaluates HQ and every ladder threshold against the 60 fps baseline.
pub fn build_report(table: &MeasurementTable) -> Result<EvaluationReport> {
    build_report_with(table, &ReportOptions::default())
}

/// [`build_report`] with explicit thresholds and aggregation.
///
/// Curves are reduced to their Pareto front (lower x, higher quality) before
/// the BD integrals, since equal-energy renditions on different rungs would
/// otherwise make the energy axis non-invertible.
pub fn build_report_with(
    table: &MeasurementTable,
    options: &ReportOptions,
) -> Result<EvaluationReport> {
    let missing = validate_completeness(table);
    if !missing.is_empty() {
        return Err(Error::Incomplete(missing));
    }
    if table.is_empty() {
        return Err(Error::Empty("measurement table"));
    }
    let mut thresholds = options
        .thresholds
        .clone()
        .unwrap_or_else(|| table.ladder().thresholds().to_vec());
    validate_thresholds(&thresholds)?;
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let default = sweep(table, Selector::Default, &[])?;
    let delta_e_enc_pct = encode_delta(table)?;

    let mut methods: Vec<(Selector, Option<f64>, Vec<SelectionResult>)> =
        alloc::vec![(Selector::Hq, None, sweep(table, Selector::Hq, &[])?)];
    let decodra = sweep(table, Selector::Decodra, &thresholds)?;
    for &t in &thresholds {
        let subset = decodra
            .iter()
            .filter(|r| r.threshold == t)
            .cloned()
            .collect();
        methods.push((Selector::Decodra, Some(t), subset));
    }

    let mut rows = Vec::with_capacity(methods.len());
    for (method, threshold, results) in methods {
        let ctx = || label(method, threshold);
        let bd = mean_bd(table, &default, &results, options.aggregation)
            .map_err(|e| e.context(ctx()))?;
        let delta_e_dec_pct = delta_energy(&decode_energies(&default), &decode_energies(&results))
            .map_err(|e| e.context(ctx()))?;
        rows.push(ReportRow {
            method,
            threshold,
            bd_psnr_db: bd.psnr,
            bd_vmaf: bd.vmaf,
            delta_e_enc_pct,
            delta_e_dec_pct,
            bdde_psnr_pct: bd.bdde_psnr,
            bdde_vmaf_pct: bd.bdde_vmaf,
        });
    }
    Ok(EvaluationReport {
        aggregation: options.aggregation,
        rows,
    })
}

/// Per-rung VMAF loss and decoding-energy saving of the threshold selector
/// at `threshold` relative to the max-quality selector.
pub fn rung_deltas(table: &MeasurementTable, threshold: f64) -> Result<Vec<RungDelta>> {
    let hq = sweep(table, Selector::Hq, &[])?;
    let dec = sweep(table, Selector::Decodra, &[threshold])?;
    let n = table.sequences().len();
    if n == 0 {
        return Err(Error::Empty("measurement table"));
    }
    let mut out = Vec::with_capacity(table.ladder().rungs().len());
    for &rung in table.ladder().rungs() {
        let mut vmaf = 0.0;
        let mut energy = 0.0;
        // sweep output is aligned: same (sequence, rung) order on both sides
        for (h, d) in hq.iter().zip(&dec).filter(|(h, _)| h.rung == rung) {
            if h.decode_energy_j <= 0.0 {
                return Err(
                    Error::ZeroEnergy.context(format!("hq energy of {} at {rung}", h.sequence_id))
                );
            }
            vmaf += h.achieved_quality - d.achieved_quality;
            energy += 100.0 * (h.decode_energy_j - d.decode_energy_j) / h.decode_energy_j;
        }
        out.push(RungDelta {
            rung,
            vmaf_decrease: vmaf / n as f64,
            decode_energy_reduction_pct: energy / n as f64,
        });
    }
    Ok(out)
}

/// Renders a threshold for labels, e.g. `2` or `0.5`.
pub fn threshold_label(t: f64) -> String {
    format!("{t}")
}
