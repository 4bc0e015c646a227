use alloc::string::String;
use alloc::vec::Vec;

use crate::ladder::CellKey;

/// Errors produced by the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A ladder or framerate set violates its structural invariants.
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    /// A numeric field is outside its admissible range.
    #[error("field `{field}` out of range: {value}")]
    OutOfRange {
        /// Column / field name.
        field: &'static str,
        /// Offending value.
        value: f64,
    },

    /// Two records share the same grid key.
    #[error("duplicate measurement for {0}")]
    DuplicateKey(CellKey),

    /// A record references a (bitrate, height) pair that is not a ladder rung.
    #[error("unknown rung {bitrate_kbps} kbps / {height_px} px")]
    UnknownRung {
        /// Bitrate of the offending record.
        bitrate_kbps: u32,
        /// Height of the offending record.
        height_px: u32,
    },

    /// A record references a framerate outside the ladder's framerate set.
    #[error("framerate {0} fps is not in the ladder framerate set")]
    UnknownFramerate(u32),

    /// An operation needs an optional column that some record lacks.
    #[error("column `{0}` is absent for at least one record")]
    MissingColumn(&'static str),

    /// The table does not cover the full sequence x rung x framerate grid.
    #[error("measurement table incomplete: {} missing cells", .0.len())]
    Incomplete(Vec<CellKey>),

    /// Empty input where at least one element is required.
    #[error("empty input: {0}")]
    Empty(&'static str),

    /// Threshold negative or not finite.
    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),

    /// The fixed-framerate baseline needs 60 fps in the framerate set.
    #[error("the default selector needs 60 fps in the framerate set")]
    DefaultFramerateMissing,

    /// Curve shape violation (too few points, non-monotone, non-positive x).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Two curves do not overlap on the integration axis.
    #[error("curves do not overlap on the integration axis")]
    NoOverlap,

    /// Two keyed energy lists disagree on their key sets.
    #[error("energy key sets differ")]
    KeyMismatch,

    /// Reference energy sums to zero.
    #[error("reference energy is zero")]
    ZeroEnergy,

    /// Selection results do not cover the ladder as required.
    #[error("selection results incomplete: {0}")]
    IncompleteSelection(String),

    /// Synthetic model parameters violate their invariants.
    #[error("invalid synthetic model: {0}")]
    InvalidModel(String),

    /// Plan template map lacks a stage.
    #[error("no command template for stage `{0}`")]
    MissingTemplate(&'static str),

    /// A template is missing a placeholder its stage needs, or uses one that
    /// does not exist.
    #[error("unresolved placeholder `{{{placeholder}}}` in `{stage}` template")]
    UnresolvedPlaceholder {
        /// Stage whose template is at fault.
        stage: &'static str,
        /// Placeholder name, without braces.
        placeholder: String,
    },

    /// An energy log has the wrong number of runs (or bad run indices) for a job.
    #[error("job {key}: {reason}")]
    BadRuns {
        /// Job key rendered for display.
        key: String,
        /// What is wrong with the runs.
        reason: String,
    },

    /// An energy key does not map onto the measurement grid.
    #[error("energy key {0} is not a decode cell of the measurement grid")]
    EnergyKeyNotInGrid(String),

    /// A name (selector, stage, axis...) that is not recognised.
    #[error("unknown {kind} `{name}`")]
    UnknownName {
        /// What kind of name was expected.
        kind: &'static str,
        /// The name given.
        name: String,
    },

    /// An error annotated with the report method it came from.
    #[error("{context}: {source}")]
    Context {
        /// Where the error happened, e.g. `decodra v_j=2`.
        context: String,
        /// Underlying error.
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: alloc::boxed::Box::new(self),
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
