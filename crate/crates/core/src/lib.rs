//! Variable-framerate bitrate ladder selection.
//!
//! For every (bitrate, resolution) rung of an adaptive-streaming ladder the
//! crate picks the lowest framerate whose quality stays within a degradation
//! threshold of the best framerate for that rung, and evaluates the resulting
//! ladder against fixed-60-fps and max-quality baselines with
//! Bjøntegaard-delta quality and decoding-energy metrics.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `vfr-ladder` companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod bd;
mod error;
pub mod interp;
pub mod ladder;
pub mod plan;
pub mod report;
pub mod select;
pub mod synth;

pub use error::{Error, Result};
pub use ladder::{
    default_ladder, CellKey, FramerateSet, Ladder, MeasurementRecord, MeasurementTable,
    Representation,
};
pub use select::{SelectionResult, Selector};
