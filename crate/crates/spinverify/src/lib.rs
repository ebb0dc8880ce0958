//! Batch driver for the `spinverify-core` checks: configuration, a registry
//! of named checks, parallel execution and report output.

pub mod checks;
pub mod emit;
pub mod params;
pub mod report;
pub mod suite;

pub use checks::{lookup, registry, run_check};
pub use emit::{emit_report, Format, SCHEMA_VERSION};
pub use params::{parse_config, CheckDescriptor, Entry, Overrides};
pub use report::{Status, VerificationReport};
pub use suite::{default_suite, run_descriptors, run_suite, SuiteOptions, SuiteResult};
