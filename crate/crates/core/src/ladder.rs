//! Ladder configuration and the measurement data model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// One (bitrate, resolution) rung of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Representation {
    /// Target bitrate in kbps.
    pub bitrate_kbps: u32,
    /// Vertical resolution in pixels.
    pub height_px: u32,
}

impl Representation {
    /// Creates a rung, rejecting zero bitrate or height.
    pub fn new(bitrate_kbps: u32, height_px: u32) -> Result<Self> {
        if bitrate_kbps == 0 || height_px == 0 {
            return Err(Error::InvalidLadder(format!(
                "rung {bitrate_kbps} kbps / {height_px} px must be positive"
            )));
        }
        Ok(Self {
            bitrate_kbps,
            height_px,
        })
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}kbps@{}p", self.bitrate_kbps, self.height_px)
    }
}

/// Candidate framerates, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramerateSet(Vec<u32>);

impl FramerateSet {
    /// Validates and wraps a framerate list.
    pub fn new(framerates_fps: Vec<u32>) -> Result<Self> {
        if framerates_fps.is_empty() {
            return Err(Error::InvalidLadder("framerate set is empty".into()));
        }
        if framerates_fps[0] == 0 {
            return Err(Error::InvalidLadder("framerate 0 fps".into()));
        }
        if framerates_fps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLadder(
                "framerates must be strictly increasing".into(),
            ));
        }
        Ok(Self(framerates_fps))
    }

    /// Framerates in increasing order.
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Whether `fps` is a member.
    pub fn contains(&self, fps: u32) -> bool {
        self.0.binary_search(&fps).is_ok()
    }

    /// Number of candidate framerates.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false for a validated set.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rungs, candidate framerates and quality-degradation thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    rungs: Vec<Representation>,
    framerates: FramerateSet,
    thresholds: Vec<f64>,
}

impl Ladder {
    /// Validates and assembles a ladder.
    ///
    /// Rungs must be non-empty with strictly increasing bitrates; thresholds
    /// must be finite, non-negative and strictly increasing (an empty list is
    /// allowed and means "no threshold sweep configured").
    pub fn new(
        rungs: Vec<Representation>,
        framerates: FramerateSet,
        thresholds: Vec<f64>,
    ) -> Result<Self> {
        if rungs.is_empty() {
            return Err(Error::InvalidLadder("ladder has no rungs".into()));
        }
        for r in &rungs {
            Representation::new(r.bitrate_kbps, r.height_px)?;
        }
        if rungs
            .windows(2)
            .any(|w| w[0].bitrate_kbps >= w[1].bitrate_kbps)
        {
            return Err(Error::InvalidLadder(
                "rung bitrates must be strictly increasing".into(),
            ));
        }
        validate_thresholds(&thresholds)?;
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLadder(
                "thresholds must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            rungs,
            framerates,
            thresholds,
        })
    }

    /// Rungs ordered by bitrate.
    pub fn rungs(&self) -> &[Representation] {
        &self.rungs
    }

    /// Candidate framerates.
    pub fn framerates(&self) -> &FramerateSet {
        &self.framerates
    }

    /// Quality-degradation thresholds in VMAF points.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Returns a copy with a different threshold list.
    pub fn with_thresholds(&self, thresholds: Vec<f64>) -> Result<Self> {
        Self::new(self.rungs.clone(), self.framerates.clone(), thresholds)
    }

    /// Looks up a rung by its (bitrate, height) pair.
    pub fn rung(&self, bitrate_kbps: u32, height_px: u32) -> Option<Representation> {
        self.rungs
            .iter()
            .copied()
            .find(|r| r.bitrate_kbps == bitrate_kbps && r.height_px == height_px)
    }
}

pub(crate) fn validate_thresholds(thresholds: &[f64]) -> Result<()> {
    match thresholds.iter().find(|t| !t.is_finite() || **t < 0.0) {
        Some(&t) => Err(Error::InvalidThreshold(t)),
        None => Ok(()),
    }
}

/// The twelve-rung HLS authoring ladder with framerates {24, 30, 48, 60}
/// and thresholds {1, 2, 4, 6} VMAF points.
pub fn default_ladder() -> Ladder {
    const RUNGS: [(u32, u32); 12] = [
        (145, 360),
        (300, 432),
        (600, 540),
        (900, 540),
        (1600, 540),
        (2400, 720),
        (3400, 720),
        (4500, 1080),
        (5800, 1080),
        (8100, 1440),
        (11600, 2160),
        (16800, 2160),
    ];
    let rungs = RUNGS
        .iter()
        .map(|&(bitrate_kbps, height_px)| Representation {
            bitrate_kbps,
            height_px,
        })
        .collect();
    Ladder {
        rungs,
        framerates: FramerateSet(alloc::vec![24, 30, 48, 60]),
        thresholds: alloc::vec![1.0, 2.0, 4.0, 6.0],
    }
}

/// Grid key of one measurement. Orders by (sequence, bitrate, height, framerate).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellKey {
    /// Sequence identifier.
    pub sequence_id: String,
    /// Rung bitrate in kbps.
    pub bitrate_kbps: u32,
    /// Rung height in pixels.
    pub height_px: u32,
    /// Framerate in fps.
    pub framerate_fps: u32,
}

impl CellKey {
    /// Convenience constructor.
    pub fn new(sequence_id: impl Into<String>, rung: Representation, framerate_fps: u32) -> Self {
        Self {
            sequence_id: sequence_id.into(),
            bitrate_kbps: rung.bitrate_kbps,
            height_px: rung.height_px,
            framerate_fps,
        }
    }

    /// The rung this cell belongs to.
    pub fn rung(&self) -> Representation {
        Representation {
            bitrate_kbps: self.bitrate_kbps,
            height_px: self.height_px,
        }
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {} kbps, {} px, {} fps)",
            self.sequence_id, self.bitrate_kbps, self.height_px, self.framerate_fps
        )
    }
}

/// Quality and energy measured for one encoded rendition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementRecord {
    /// Sequence identifier.
    #[cfg_attr(feature = "serde", serde(rename = "sequence"))]
    pub sequence_id: String,
    /// Rung bitrate in kbps.
    pub bitrate_kbps: u32,
    /// Rung height in pixels.
    pub height_px: u32,
    /// Encoded framerate.
    pub framerate_fps: u32,
    /// VMAF, 0..=100.
    pub vmaf: f64,
    /// PSNR in dB, positive.
    pub psnr_db: f64,
    /// SSIM, 0..=1.
    #[cfg_attr(feature = "serde", serde(default))]
    pub ssim: Option<f64>,
    /// Decoding energy in joules.
    pub decode_energy_j: f64,
    /// Encoding energy in joules.
    #[cfg_attr(feature = "serde", serde(default))]
    pub encode_energy_j: Option<f64>,
}

impl MeasurementRecord {
    /// Grid key of this record.
    pub fn key(&self) -> CellKey {
        CellKey {
            sequence_id: self.sequence_id.clone(),
            bitrate_kbps: self.bitrate_kbps,
            height_px: self.height_px,
            framerate_fps: self.framerate_fps,
        }
    }

    /// The rung this record belongs to.
    pub fn rung(&self) -> Representation {
        Representation {
            bitrate_kbps: self.bitrate_kbps,
            height_px: self.height_px,
        }
    }

    /// Checks field invariants (ranges, positivity, finiteness).
    pub fn validate(&self) -> Result<()> {
        fn check(field: &'static str, value: f64, ok: bool) -> Result<()> {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::OutOfRange { field, value })
            }
        }
        if self.bitrate_kbps == 0 {
            return Err(Error::OutOfRange {
                field: "bitrate_kbps",
                value: 0.0,
            });
        }
        if self.height_px == 0 {
            return Err(Error::OutOfRange {
                field: "height_px",
                value: 0.0,
            });
        }
        if self.framerate_fps == 0 {
            return Err(Error::OutOfRange {
                field: "framerate_fps",
                value: 0.0,
            });
        }
        check("vmaf", self.vmaf, (0.0..=100.0).contains(&self.vmaf))?;
        check("psnr_db", self.psnr_db, self.psnr_db > 0.0)?;
        if let Some(ssim) = self.ssim {
            check("ssim", ssim, (0.0..=1.0).contains(&ssim))?;
        }
        check(
            "decode_energy_j",
            self.decode_energy_j,
            self.decode_energy_j >= 0.0,
        )?;
        if let Some(e) = self.encode_energy_j {
            check("encode_energy_j", e, e >= 0.0)?;
        }
        Ok(())
    }
}

/// Measurements keyed by grid cell, bound to the ladder they were taken on.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTable {
    ladder: Ladder,
    records: BTreeMap<CellKey, MeasurementRecord>,
}

impl MeasurementTable {
    /// An empty table for `ladder`.
    pub fn new(ladder: Ladder) -> Self {
        Self {
            ladder,
            records: BTreeMap::new(),
        }
    }

    /// Builds a table, failing on the first invalid record.
    pub fn from_records(
        ladder: Ladder,
        records: impl IntoIterator<Item = MeasurementRecord>,
    ) -> Result<Self> {
        let mut table = Self::new(ladder);
        for r in records {
            table.insert(r)?;
        }
        Ok(table)
    }

    /// Validates and inserts one record.
    pub fn insert(&mut self, record: MeasurementRecord) -> Result<()> {
        record.validate()?;
        if self
            .ladder
            .rung(record.bitrate_kbps, record.height_px)
            .is_none()
        {
            return Err(Error::UnknownRung {
                bitrate_kbps: record.bitrate_kbps,
                height_px: record.height_px,
            });
        }
        if !self.ladder.framerates.contains(record.framerate_fps) {
            return Err(Error::UnknownFramerate(record.framerate_fps));
        }
        let key = record.key();
        if self.records.contains_key(&key) {
            return Err(Error::DuplicateKey(key));
        }
        self.records.insert(key, record);
        Ok(())
    }

    /// Removes a record, returning it if present.
    pub fn remove(&mut self, key: &CellKey) -> Option<MeasurementRecord> {
        self.records.remove(key)
    }

    /// The ladder the table is bound to.
    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    /// Looks up one cell.
    pub fn get(&self, key: &CellKey) -> Option<&MeasurementRecord> {
        self.records.get(key)
    }

    pub(crate) fn get_cell(
        &self,
        sequence_id: &str,
        rung: Representation,
        framerate_fps: u32,
    ) -> Option<&MeasurementRecord> {
        // BTreeMap lookup needs an owned key; the clone is cheap next to the tree walk.
        self.records.get(&CellKey::new(
            String::from(sequence_id),
            rung,
            framerate_fps,
        ))
    }

    /// Mutable access for in-crate updates that keep the key unchanged.
    pub(crate) fn get_mut(&mut self, key: &CellKey) -> Option<&mut MeasurementRecord> {
        self.records.get_mut(key)
    }

    /// Records in key order.
    pub fn records(&self) -> impl Iterator<Item = &MeasurementRecord> {
        self.records.values()
    }

    /// Number of records.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Whether the table holds no records.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct sequence ids, sorted.
    pub fn sequences(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .records
            .keys()
            .map(|k| k.sequence_id.as_str())
            .collect();
        set.into_iter().map(String::from).collect()
    }
}

/// Lists every missing (sequence, rung, framerate) cell of the grid spanned by
/// the sequences present in the table, ordered by (sequence, bitrate,
/// framerate). Empty iff the table is complete.
pub fn validate_completeness(table: &MeasurementTable) -> Vec<CellKey> {
    let mut missing = Vec::new();
    for seq in table.sequences() {
        for &rung in table.ladder.rungs() {
            for &fps in table.ladder.framerates.as_slice() {
                let key = CellKey::new(seq.clone(), rung, fps);
                if !table.records.contains_key(&key) {
                    missing.push(key);
                }
            }
        }
    }
    missing
}
