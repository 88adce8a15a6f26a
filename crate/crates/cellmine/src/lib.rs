//! cellmine — mines frequently recurring gate clusters in technology-mapped
//! netlists and merges them into custom standard-cell candidates.
//!
//! The pipeline:
//!
//! 1. [`library`] parses the standard-cell library (areas, pin-equivalence
//!    classes, SPICE bodies).
//! 2. [`netlist`] parses BLIF, flattens or partitions the hierarchy, strips
//!    sequential elements, and builds a labeled directed graph of
//!    combinational gates.
//! 3. [`mining`] grows groups of non-overlapping isomorphic subgraphs from
//!    single-gate seeds, one vertex per iteration, guided by coverage.
//! 4. [`combine`] scores candidate pattern combinations by estimated area
//!    saving and decides when growth stops paying off.
//! 5. [`emit`] renders each selected pattern as a merged SPICE subcircuit, a
//!    rewritten BLIF using the new cells, and JSON/CSV reports.
//! 6. [`synth`] generates synthetic netlists with planted patterns for
//!    benchmarking and testing.
//!
//! See `examples/` for one runnable walkthrough per capability.

mod cli;
pub mod combine;
pub mod emit;
pub mod error;
pub mod library;
pub mod mining;
pub mod netlist;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};

/// Entry point for the `cellmine` binary; returns the process exit code.
pub fn run_cli() -> i32 {
    cli::run()
}
