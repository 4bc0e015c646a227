//! File formats and command-line front end for `vfr-ladder-core`.
//!
//! Measurements, ladders, selections, curves, job plans, energy logs and
//! reports all go through [`formats`]; [`cli`] wires them to subcommands.

pub mod cli;
pub mod formats;

pub use formats::FormatError;
