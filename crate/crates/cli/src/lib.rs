//! Command-line front end: scenario files, synthesis runs, timing ladders and
//! design comparisons.

pub mod app;
pub mod commands;
pub mod scenario;

pub use app::{run, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};
pub use commands::{
    bench_csv, compare_csv, pattern_csv, run_bench, run_compare, run_synthesis, synthesize, BenchRow,
    CompareRow, Synthesis, SynthesisArtifacts, SynthesisReport,
};
pub use scenario::{Scenario, ScenarioError};
