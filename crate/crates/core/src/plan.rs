//! Job plans for the external measurement pipeline and energy-log averaging.
//!
//! Nothing here runs a process. A plan lists, for every (sequence, rung,
//! framerate), the seven pipeline stages with their command templates
//! expanded; callers hand the plan to whatever executor they use.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::ladder::{CellKey, Ladder, MeasurementTable, Representation};

/// Pipeline stage, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stage {
    /// Resize to the rung height.
    SpatialDown,
    /// Drop frames down to the target framerate.
    TemporalDown,
    /// Encode at the rung bitrate.
    Encode,
    /// Interpolate frames back to the source framerate.
    TemporalUp,
    /// Resize back to the source resolution.
    SpatialUp,
    /// Decode the bitstream (the energy-measured step).
    Decode,
    /// Score the reconstruction against the source.
    MeasureQuality,
}

impl Stage {
    /// All stages in execution order.
    pub const ALL: [Stage; 7] = [
        Stage::SpatialDown,
        Stage::TemporalDown,
        Stage::Encode,
        Stage::TemporalUp,
        Stage::SpatialUp,
        Stage::Decode,
        Stage::MeasureQuality,
    ];

    /// Snake-case name used in files.
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::SpatialDown => "spatial_down",
            Stage::TemporalDown => "temporal_down",
            Stage::Encode => "encode",
            Stage::TemporalUp => "temporal_up",
            Stage::SpatialUp => "spatial_up",
            Stage::Decode => "decode",
            Stage::MeasureQuality => "measure_quality",
        }
    }

    /// Placeholders a template for this stage must use.
    fn required_placeholders(self) -> &'static [&'static str] {
        match self {
            Stage::SpatialDown => &["input", "output", "height_px"],
            Stage::TemporalDown => &["input", "output", "framerate_fps"],
            Stage::Encode => &["input", "output", "bitrate_kbps"],
            _ => &["input", "output"],
        }
    }

    /// Output file suffix of this stage.
    fn suffix(self) -> &'static str {
        match self {
            Stage::SpatialDown => "sd.yuv",
            Stage::TemporalDown => "td.yuv",
            Stage::Encode => "bin",
            Stage::TemporalUp => "tu.yuv",
            Stage::SpatialUp => "su.yuv",
            Stage::Decode => "dec.yuv",
            Stage::MeasureQuality => "quality.json",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "stage",
                name: s.into(),
            })
    }
}

/// One expanded command.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Job {
    /// Pipeline stage.
    pub stage: Stage,
    /// Sequence the job works on.
    pub sequence_id: String,
    /// Target rung.
    pub rung: Representation,
    /// Target framerate.
    pub framerate_fps: u32,
    /// Id of the template that produced the arguments (the stage name).
    pub command_template_id: String,
    /// Whitespace-split template with placeholders substituted.
    pub substituted_args: Vec<String>,
}

/// Ordered job list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JobPlan {
    /// Jobs ordered by (sequence, bitrate, framerate, stage).
    pub jobs: Vec<Job>,
}

/// Per-stage command templates, keyed by stage.
pub type Templates = BTreeMap<Stage, String>;

/// Input and output paths of one stage for a grid cell.
///
/// The encoded bitstream feeds both the upsampling branch (whose output is
/// scored) and the measured decode.
fn stage_io(stage: Stage, source: &str, cell: &str) -> (String, String) {
    let out = |s: Stage| format!("{cell}.{}", s.suffix());
    let input = match stage {
        Stage::SpatialDown => source.to_string(),
        Stage::TemporalDown => out(Stage::SpatialDown),
        Stage::Encode => out(Stage::TemporalDown),
        Stage::TemporalUp | Stage::Decode => out(Stage::Encode),
        Stage::SpatialUp => out(Stage::TemporalUp),
        Stage::MeasureQuality => out(Stage::SpatialUp),
    };
    (input, out(stage))
}

fn expand(stage: Stage, template: &str, values: &[(&str, &str)]) -> Result<Vec<String>> {
    let mut used: Vec<&str> = Vec::new();
    let mut args = Vec::new();
    for word in template.split_whitespace() {
        let mut arg = String::new();
        let mut rest = word;
        while let Some(open) = rest.find('{') {
            arg.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let close = after
                .find('}')
                .ok_or_else(|| Error::UnresolvedPlaceholder {
                    stage: stage.as_str(),
                    placeholder: after.into(),
                })?;
            let name = &after[..close];
            let (key, value) = values.iter().find(|(k, _)| *k == name).ok_or_else(|| {
                Error::UnresolvedPlaceholder {
                    stage: stage.as_str(),
                    placeholder: name.into(),
                }
            })?;
            used.push(key);
            arg.push_str(value);
            rest = &after[close + 1..];
        }
        if rest.contains('}') {
            return Err(Error::UnresolvedPlaceholder {
                stage: stage.as_str(),
                placeholder: rest.into(),
            });
        }
        arg.push_str(rest);
        args.push(arg);
    }
    if let Some(missing) = stage
        .required_placeholders()
        .iter()
        .find(|p| !used.contains(p))
    {
        return Err(Error::UnresolvedPlaceholder {
            stage: stage.as_str(),
            placeholder: (*missing).into(),
        });
    }
    Ok(args)
}

/// Expands `templates` for every sequence x rung x framerate x stage.
///
/// `{input}` of the first stage is the sequence id itself (usually a path);
/// later stages chain through files named
/// `<sequence>_<b>k_<h>p_<f>fps.<suffix>`.
pub fn build_plan(sequences: &[String], ladder: &Ladder, templates: &Templates) -> Result<JobPlan> {
    for stage in Stage::ALL {
        if !templates.contains_key(&stage) {
            return Err(Error::MissingTemplate(stage.as_str()));
        }
    }
    let mut sorted: Vec<&String> = sequences.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut jobs =
        Vec::with_capacity(sorted.len() * ladder.rungs().len() * ladder.framerates().len() * 7);
    for seq in sorted {
        for &rung in ladder.rungs() {
            for &fps in ladder.framerates().as_slice() {
                let cell = format!("{seq}_{}k_{}p_{fps}fps", rung.bitrate_kbps, rung.height_px);
                let bitrate = rung.bitrate_kbps.to_string();
                let height = rung.height_px.to_string();
                let framerate = fps.to_string();
                for stage in Stage::ALL {
                    let (input, output) = stage_io(stage, seq, &cell);
                    let values = [
                        ("input", input.as_str()),
                        ("output", output.as_str()),
                        ("bitrate_kbps", bitrate.as_str()),
                        ("height_px", height.as_str()),
                        ("framerate_fps", framerate.as_str()),
                    ];
                    let substituted_args = expand(stage, &templates[&stage], &values)?;
                    jobs.push(Job {
                        stage,
                        sequence_id: seq.clone(),
                        rung,
                        framerate_fps: fps,
                        command_template_id: stage.as_str().into(),
                        substituted_args,
                    });
                }
            }
        }
    }
    Ok(JobPlan { jobs })
}

/// Identifies one measured job.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobKey {
    /// Grid cell.
    pub cell: CellKey,
    /// Stage that was measured.
    pub stage: Stage,
}

impl fmt::Display for JobKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {} kbps, {} px, {} fps, {})",
            self.cell.sequence_id,
            self.cell.bitrate_kbps,
            self.cell.height_px,
            self.cell.framerate_fps,
            self.stage
        )
    }
}

/// One energy reading.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEntry {
    /// Which job was measured.
    pub key: JobKey,
    /// 1-based run number.
    pub run_index: u32,
    /// Energy in joules.
    pub energy_j: f64,
}

/// Raw energy readings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyLog {
    /// Entries in file order.
    pub entries: Vec<EnergyEntry>,
}

/// How many runs per job [`average_energy`] accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunPolicy {
    /// Runs 1, 2 and 3, each exactly once.
    #[default]
    ExactlyThree,
    /// Any number of runs (at least one) with distinct indices.
    AnyCount,
}

/// Runs required under [`RunPolicy::ExactlyThree`].
pub const REQUIRED_RUNS: usize = 3;

/// Mean energy per job.
///
/// Runs are summed in run-index order, so the result does not depend on the
/// order of log entries.
pub fn average_energy(log: &EnergyLog, policy: RunPolicy) -> Result<BTreeMap<JobKey, f64>> {
    let mut runs: BTreeMap<&JobKey, BTreeMap<u32, f64>> = BTreeMap::new();
    for e in &log.entries {
        if !e.energy_j.is_finite() || e.energy_j < 0.0 {
            return Err(Error::BadRuns {
                key: e.key.to_string(),
                reason: format!("energy {} J", e.energy_j),
            });
        }
        let valid_index = match policy {
            RunPolicy::ExactlyThree => (1..=REQUIRED_RUNS as u32).contains(&e.run_index),
            RunPolicy::AnyCount => e.run_index >= 1,
        };
        if !valid_index {
            return Err(Error::BadRuns {
                key: e.key.to_string(),
                reason: format!("run index {} out of range", e.run_index),
            });
        }
        if runs
            .entry(&e.key)
            .or_default()
            .insert(e.run_index, e.energy_j)
            .is_some()
        {
            return Err(Error::BadRuns {
                key: e.key.to_string(),
                reason: format!("run {} repeated", e.run_index),
            });
        }
    }
    runs.into_iter()
        .map(|(key, r)| {
            if policy == RunPolicy::ExactlyThree && r.len() != REQUIRED_RUNS {
                return Err(Error::BadRuns {
                    key: key.to_string(),
                    reason: format!("{} runs, expected {REQUIRED_RUNS}", r.len()),
                });
            }
            let mean = r.values().sum::<f64>() / r.len() as f64;
            Ok((key.clone(), mean))
        })
        .collect()
}

/// Replaces decode energies in `table` with the averaged values.
pub fn merge_energy(
    table: &MeasurementTable,
    decode_energy: &BTreeMap<JobKey, f64>,
) -> Result<MeasurementTable> {
    let mut out = table.clone();
    for (key, &energy) in decode_energy {
        if key.stage != Stage::Decode {
            return Err(Error::EnergyKeyNotInGrid(key.to_string()));
        }
        if !energy.is_finite() || energy < 0.0 {
            return Err(Error::OutOfRange {
                field: "decode_energy_j",
                value: energy,
            });
        }
        let rec = out
            .get_mut(&key.cell)
            .ok_or_else(|| Error::EnergyKeyNotInGrid(key.to_string()))?;
        rec.decode_energy_j = energy;
    }
    Ok(out)
}
