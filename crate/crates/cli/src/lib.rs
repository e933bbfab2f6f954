//! Spec parsing, check orchestration and report output for the `hkreduce` binary.

pub mod error;
pub mod report;
pub mod spec;
pub mod verify;

pub use error::CliError;
pub use report::{emit_report, read_report, CheckRecord, VerificationReport};
pub use spec::{parse_spec, parse_spec_str, ProblemSpec};
pub use verify::{run_verify, RunOptions, RunOutput, Stage};
