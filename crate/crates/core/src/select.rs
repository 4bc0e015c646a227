//! Per-rung framerate selection: the threshold-constrained minimum-framerate
//! rule and the fixed-60-fps / max-quality baselines.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::ladder::{
    validate_completeness, validate_thresholds, Ladder, MeasurementTable, Representation,
};

/// Framerate used by the fixed-framerate baseline.
pub const DEFAULT_FRAMERATE_FPS: u32 = 60;

/// Quality (VMAF points) of one rung at each measured framerate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QualityByFramerate(BTreeMap<u32, f64>);

impl QualityByFramerate {
    /// Empty table; selection on it fails until entries are added.
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the quality of one framerate.
    pub fn insert(&mut self, framerate_fps: u32, quality: f64) -> &mut Self {
        self.0.insert(framerate_fps, quality);
        self
    }

    /// Entries ordered by framerate.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.0.iter().map(|(&f, &q)| (f, q))
    }

    /// Quality at `framerate_fps`, if measured.
    pub fn get(&self, framerate_fps: u32) -> Option<f64> {
        self.0.get(&framerate_fps).copied()
    }

    /// Number of framerates.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether no framerate has been measured.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Best quality over all framerates.
    pub fn max_quality(&self) -> Option<f64> {
        self.0.values().copied().reduce(f64::max)
    }

    fn checked_max(&self) -> Result<f64> {
        if let Some((_, &q)) = self.0.iter().find(|(_, q)| !q.is_finite()) {
            return Err(Error::OutOfRange {
                field: "quality",
                value: q,
            });
        }
        self.max_quality().ok_or(Error::Empty("quality table"))
    }
}

impl FromIterator<(u32, f64)> for QualityByFramerate {
    fn from_iter<I: IntoIterator<Item = (u32, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Selects the smallest framerate whose quality is within `threshold`
/// points of the best framerate for the rung.
///
/// The rule is a single pass over the candidates: compute the best quality,
/// accept every framerate whose gap to it is at most `threshold`, keep the
/// smallest accepted one. The best framerate always passes with gap 0, so a
/// non-empty table always yields a result. With `threshold == 0` this is the
/// smallest framerate attaining the maximum.
pub fn select_framerate(quality: &QualityByFramerate, threshold: f64) -> Result<u32> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let v_max = quality.checked_max()?;
    let mut selected: Option<u32> = None;
    for (fps, q) in quality.iter() {
        if v_max - q <= threshold && selected.is_none_or(|s| fps < s) {
            selected = Some(fps);
        }
    }
    selected.ok_or(Error::Empty("quality table"))
}

/// Framerate with the highest quality; ties go to the smaller framerate.
pub fn select_hq(quality: &QualityByFramerate) -> Result<u32> {
    let v_max = quality.checked_max()?;
    quality
        .iter()
        .find(|&(_, q)| q == v_max)
        .map(|(f, _)| f)
        .ok_or(Error::Empty("quality table"))
}

/// The fixed 60 fps baseline. Fails if the ladder does not offer 60 fps.
pub fn select_default(ladder: &Ladder) -> Result<u32> {
    if ladder.framerates().contains(DEFAULT_FRAMERATE_FPS) {
        Ok(DEFAULT_FRAMERATE_FPS)
    } else {
        Err(Error::DefaultFramerateMissing)
    }
}

/// Which selection rule produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Selector {
    /// Minimum framerate within the quality-degradation threshold.
    Decodra,
    /// Fixed 60 fps.
    Default,
    /// Maximum quality.
    Hq,
}

impl Selector {
    /// Wire name used in CSV / JSON output.
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Decodra => "decodra",
            Selector::Default => "default",
            Selector::Hq => "hq",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decodra" => Ok(Selector::Decodra),
            "default" => Ok(Selector::Default),
            "hq" => Ok(Selector::Hq),
            other => Err(Error::UnknownName {
                kind: "selector",
                name: other.into(),
            }),
        }
    }
}

/// The framerate chosen for one (sequence, rung, threshold).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionResult {
    /// Sequence identifier.
    pub sequence_id: String,
    /// Rung the selection applies to.
    pub rung: Representation,
    /// Threshold in VMAF points; 0 for the baselines.
    pub threshold: f64,
    /// Rule that made the choice.
    pub selector: Selector,
    /// Chosen framerate.
    pub framerate_fps: u32,
    /// VMAF of the chosen rendition.
    pub achieved_quality: f64,
    /// Decoding energy of the chosen rendition.
    pub decode_energy_j: f64,
}

/// Per-rung quality table of one sequence.
pub(crate) fn quality_table(
    table: &MeasurementTable,
    sequence_id: &str,
    rung: Representation,
) -> QualityByFramerate {
    table
        .ladder()
        .framerates()
        .as_slice()
        .iter()
        .filter_map(|&f| table.get_cell(sequence_id, rung, f).map(|r| (f, r.vmaf)))
        .collect()
}

/// Runs `selector` over every (sequence, rung) of a complete table.
///
/// `Decodra` produces one result per threshold; the baselines ignore
/// `thresholds` and record 0. Output is ordered by (sequence, bitrate,
/// threshold).
pub fn sweep(
    table: &MeasurementTable,
    selector: Selector,
    thresholds: &[f64],
) -> Result<Vec<SelectionResult>> {
    let missing = validate_completeness(table);
    if !missing.is_empty() {
        return Err(Error::Incomplete(missing));
    }
    validate_thresholds(thresholds)?;
    let mut sorted_thresholds = thresholds.to_vec();
    sorted_thresholds.sort_by(f64::total_cmp);
    sorted_thresholds.dedup();

    let ladder = table.ladder();
    let default_fps = match selector {
        Selector::Default => Some(select_default(ladder)?),
        _ => None,
    };
    let mut out = Vec::new();
    for seq in table.sequences() {
        for &rung in ladder.rungs() {
            let q = quality_table(table, &seq, rung);
            let picks: Vec<(f64, u32)> = match selector {
                Selector::Decodra => sorted_thresholds
                    .iter()
                    .map(|&t| select_framerate(&q, t).map(|f| (t, f)))
                    .collect::<Result<_>>()?,
                Selector::Hq => alloc::vec![(0.0, select_hq(&q)?)],
                Selector::Default => {
                    alloc::vec![(0.0, default_fps.unwrap_or(DEFAULT_FRAMERATE_FPS))]
                }
            };
            for (threshold, fps) in picks {
                let rec = table
                    .get_cell(&seq, rung, fps)
                    .expect("complete table has every cell");
                out.push(SelectionResult {
                    sequence_id: seq.clone(),
                    rung,
                    threshold,
                    selector,
                    framerate_fps: fps,
                    achieved_quality: rec.vmaf,
                    decode_energy_j: rec.decode_energy_j,
                });
            }
        }
    }
    Ok(out)
}
