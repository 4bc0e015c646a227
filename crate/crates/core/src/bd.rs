//! Bjøntegaard-delta metrics.
//!
//! BD-quality (BD-PSNR / BD-VMAF) integrates the quality difference between two
//! rate-quality curves over their shared log10-bitrate range. BDDE does the
//! same with log10 decoding energy as a function of quality, over the shared
//! quality range, and reports the mean energy ratio as a percentage. Both use
//! the monotone cubic interpolant from [`crate::interp`] and integrate it in
//! closed form.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::ladder::Representation;
use crate::select::{SelectionResult, Selector};

/// Minimum number of points on a curve.
pub const MIN_CURVE_POINTS: usize = 4;

/// What the x axis of a curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum XKind {
    /// Bitrate in kbps.
    BitrateKbps,
    /// Decoding energy in joules.
    DecodeEnergyJ,
}

impl XKind {
    /// Name used in curve CSV headers.
    pub fn as_str(self) -> &'static str {
        match self {
            XKind::BitrateKbps => "bitrate_kbps",
            XKind::DecodeEnergyJ => "decode_energy_j",
        }
    }
}

/// An ordered rate-quality or energy-quality curve.
///
/// Invariants: at least four points, `x > 0` and strictly increasing, quality
/// strictly increasing with `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    x_kind: XKind,
    points: Vec<(f64, f64)>,
}

impl RdCurve {
    /// Validates `points` as given; nothing is sorted or repaired.
    pub fn new(x_kind: XKind, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < MIN_CURVE_POINTS {
            return Err(Error::InvalidCurve(format!(
                "{} points, need at least {MIN_CURVE_POINTS}",
                points.len()
            )));
        }
        if points
            .iter()
            .any(|&(x, q)| !x.is_finite() || !q.is_finite() || x <= 0.0)
        {
            return Err(Error::InvalidCurve("x must be positive and finite".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidCurve("x must be strictly increasing".into()));
        }
        if points.windows(2).any(|w| w[0].1 >= w[1].1) {
            return Err(Error::InvalidCurve(
                "quality must be strictly increasing with x".into(),
            ));
        }
        Ok(Self { x_kind, points })
    }

    /// Keeps only the non-dominated points (lower x, higher quality) and
    /// builds a curve from them. Input order does not matter.
    pub fn pareto_front(x_kind: XKind, points: &[(f64, f64)]) -> Result<Self> {
        Self::new(x_kind, pareto_front(points))
    }

    /// What x measures.
    pub fn x_kind(&self) -> XKind {
        self.x_kind
    }

    /// Points ordered by x.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Returns a copy with `delta` added to every quality.
    pub fn shift_quality(&self, delta: f64) -> Self {
        Self {
            x_kind: self.x_kind,
            points: self.points.iter().map(|&(x, q)| (x, q + delta)).collect(),
        }
    }

    /// Returns a copy with every x multiplied by `factor` (> 0).
    pub fn scale_x(&self, factor: f64) -> Self {
        Self {
            x_kind: self.x_kind,
            points: self.points.iter().map(|&(x, q)| (x * factor, q)).collect(),
        }
    }

    /// Quality as a function of log10(x).
    pub fn quality_over_log_x(&self) -> Result<Pchip> {
        let (u, q): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .map(|&(x, q)| (libm::log10(x), q))
            .unzip();
        Pchip::new(&u, &q)
    }

    /// log10(x) as a function of quality.
    pub fn log_x_over_quality(&self) -> Result<Pchip> {
        let (q, u): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .map(|&(x, q)| (q, libm::log10(x)))
            .unzip();
        Pchip::new(&q, &u)
    }
}

/// Non-dominated subset of `(x, quality)` points, ordered by x.
///
/// A point survives when no other point has x ≤ its x and quality ≥ its
/// quality with at least one strict. Exact duplicates collapse to one point.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut front: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        if front.last().is_none_or(|last| p.1 > last.1 && p.0 > last.0) {
            front.push(p);
        }
    }
    front
}

/// A Bjøntegaard-delta value together with the integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdResult {
    /// Quality points for BD-quality, percent for BDDE.
    pub value: f64,
    /// Lower bound of the shared interval on the integration axis.
    pub overlap_lo: f64,
    /// Upper bound of the shared interval.
    pub overlap_hi: f64,
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> Result<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(Error::NoOverlap)
    }
}

fn expect_kind(c: &RdCurve, kind: XKind) -> Result<()> {
    if c.x_kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidCurve(format!(
            "expected x axis {}, got {}",
            kind.as_str(),
            c.x_kind.as_str()
        )))
    }
}

/// Average quality gain of `test` over `reference` at equal bitrate
/// (BD-PSNR / BD-VMAF depending on the quality metric on the curves).
/// Positive means `test` is better.
pub fn bd_quality(reference: &RdCurve, test: &RdCurve) -> Result<BdResult> {
    expect_kind(reference, XKind::BitrateKbps)?;
    expect_kind(test, XKind::BitrateKbps)?;
    let r = reference.quality_over_log_x()?;
    let t = test.quality_over_log_x()?;
    let (lo, hi) = overlap(r.domain(), t.domain())?;
    let diff = t.integrate(lo, hi)? - r.integrate(lo, hi)?;
    Ok(BdResult {
        value: diff / (hi - lo),
        overlap_lo: lo,
        overlap_hi: hi,
    })
}

/// Average decoding-energy difference of `test` versus `reference` at equal
/// quality, in percent. Negative means `test` saves energy.
pub fn bdde(reference: &RdCurve, test: &RdCurve) -> Result<BdResult> {
    expect_kind(reference, XKind::DecodeEnergyJ)?;
    expect_kind(test, XKind::DecodeEnergyJ)?;
    let r = reference.log_x_over_quality()?;
    let t = test.log_x_over_quality()?;
    let (lo, hi) = overlap(r.domain(), t.domain())?;
    let mean_log_ratio = (t.integrate(lo, hi)? - r.integrate(lo, hi)?) / (hi - lo);
    Ok(BdResult {
        value: 100.0 * (libm::pow(10.0, mean_log_ratio) - 1.0),
        overlap_lo: lo,
        overlap_hi: hi,
    })
}

/// Relative difference of total energy, `100 * (Σtest − Σref) / Σref`, over
/// keys matched pairwise between the two lists.
pub fn delta_energy<K: Ord>(reference: &[(K, f64)], test: &[(K, f64)]) -> Result<f64> {
    fn collect<K: Ord>(list: &[(K, f64)]) -> Result<BTreeMap<&K, f64>> {
        let mut map = BTreeMap::new();
        for (k, e) in list {
            if !e.is_finite() || *e < 0.0 {
                return Err(Error::OutOfRange {
                    field: "energy_j",
                    value: *e,
                });
            }
            if map.insert(k, *e).is_some() {
                return Err(Error::KeyMismatch);
            }
        }
        Ok(map)
    }
    let r = collect(reference)?;
    let t = collect(test)?;
    if r.len() != t.len() || r.keys().zip(t.keys()).any(|(a, b)| a != b) {
        return Err(Error::KeyMismatch);
    }
    let ref_total: f64 = r.values().sum();
    if ref_total <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let test_total: f64 = t.values().sum();
    Ok(100.0 * (test_total - ref_total) / ref_total)
}

/// Curve x axis built from selections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Rung bitrate.
    Bitrate,
    /// Decoding energy of the selected rendition.
    Energy,
}

impl Axis {
    /// Matching curve kind.
    pub fn x_kind(self) -> XKind {
        match self {
            Axis::Bitrate => XKind::BitrateKbps,
            Axis::Energy => XKind::DecodeEnergyJ,
        }
    }
}

/// How selections from several sequences collapse into one curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    /// Results must come from a single sequence.
    PerSequence,
    /// Per rung, average x and quality over sequences.
    MeanOverSequences,
}

/// One rung's point before aggregation: (sequence, rung, energy, quality).
pub(crate) struct RungSample<'a> {
    pub sequence_id: &'a str,
    pub rung: Representation,
    pub energy_j: f64,
    pub quality: f64,
}

/// Aggregates per-rung samples into `(x, quality)` points ordered by x.
pub(crate) fn aggregate_points(
    samples: &[RungSample<'_>],
    rungs: &[Representation],
    axis: Axis,
    aggregate: Aggregate,
) -> Result<Vec<(f64, f64)>> {
    let sequences: BTreeSet<&str> = samples.iter().map(|s| s.sequence_id).collect();
    if sequences.is_empty() {
        return Err(Error::Empty("selection results"));
    }
    if aggregate == Aggregate::PerSequence && sequences.len() > 1 {
        return Err(Error::IncompleteSelection(format!(
            "per-sequence curve given {} sequences",
            sequences.len()
        )));
    }
    let mut seen: BTreeSet<(&str, Representation)> = BTreeSet::new();
    for s in samples {
        if !rungs.contains(&s.rung) {
            return Err(Error::UnknownRung {
                bitrate_kbps: s.rung.bitrate_kbps,
                height_px: s.rung.height_px,
            });
        }
        if !seen.insert((s.sequence_id, s.rung)) {
            return Err(Error::IncompleteSelection(format!(
                "sequence {} has several results for rung {}",
                s.sequence_id, s.rung
            )));
        }
    }
    let n = sequences.len() as f64;
    let mut points = Vec::with_capacity(rungs.len());
    for &rung in rungs {
        let here: Vec<&RungSample<'_>> = samples.iter().filter(|s| s.rung == rung).collect();
        if here.len() != sequences.len() {
            return Err(Error::IncompleteSelection(format!("missing rung {rung}")));
        }
        let quality = here.iter().map(|s| s.quality).sum::<f64>() / n;
        let x = match axis {
            Axis::Bitrate => f64::from(rung.bitrate_kbps),
            Axis::Energy => here.iter().map(|s| s.energy_j).sum::<f64>() / n,
        };
        points.push((x, quality));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(points)
}

/// Raw `(x, VMAF)` points of a selection run, one per rung, ordered by x.
///
/// `results` must come from a single selector and threshold and cover every
/// rung in `rungs` for every sequence present. Unlike
/// [`curve_from_selections`] the points are not checked for monotonicity, so
/// this is what plot output uses.
pub fn selection_points(
    results: &[SelectionResult],
    rungs: &[Representation],
    axis: Axis,
    aggregate: Aggregate,
) -> Result<Vec<(f64, f64)>> {
    let methods: BTreeSet<(Selector, u64)> = results
        .iter()
        .map(|r| (r.selector, r.threshold.to_bits()))
        .collect();
    if methods.len() > 1 {
        return Err(Error::IncompleteSelection(
            "results mix several selectors or thresholds".into(),
        ));
    }
    let samples: Vec<RungSample<'_>> = results
        .iter()
        .map(|r| RungSample {
            sequence_id: &r.sequence_id,
            rung: r.rung,
            energy_j: r.decode_energy_j,
            quality: r.achieved_quality,
        })
        .collect();
    aggregate_points(&samples, rungs, axis, aggregate)
}

/// Builds a validated VMAF curve from selection results. See
/// [`selection_points`] for the coverage requirements.
pub fn curve_from_selections(
    results: &[SelectionResult],
    rungs: &[Representation],
    axis: Axis,
    aggregate: Aggregate,
) -> Result<RdCurve> {
    RdCurve::new(
        axis.x_kind(),
        selection_points(results, rungs, axis, aggregate)?,
    )
}

/// Renders a curve label for error context.
pub(crate) fn label(selector: Selector, threshold: Option<f64>) -> String {
    match threshold {
        Some(t) => format!("{selector} v_j={t}"),
        None => String::from(selector.as_str()),
    }
}
