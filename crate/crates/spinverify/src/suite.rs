//! Running descriptors on a bounded thread pool.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checks::run_check;
use crate::params::{CheckDescriptor, Entry, Overrides};
use crate::report::{Status, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Worker threads; `0` lets rayon pick.
    pub jobs: usize,
    /// Record wall time in each report. Off by default so reruns are byte-identical.
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { jobs: 0, timings: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub reports: Vec<VerificationReport>,
    pub exit_code: i32,
}

/// `0` iff every report passed; an empty suite passes.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(VerificationReport::passed) {
        0
    } else {
        1
    }
}

fn run_entry(entry: &Entry, overrides: &Overrides, timings: bool) -> VerificationReport {
    match entry {
        Entry::Descriptor(d) => {
            let mut d = d.clone();
            apply_known(overrides, &mut d);
            let start = Instant::now();
            let mut r = run_check(&d);
            if timings {
                r.runtime_ms = Some(start.elapsed().as_millis() as u64);
            }
            r
        }
        Entry::Malformed { index, reason, raw } => {
            let id = raw.get("check_id").and_then(Value::as_str).unwrap_or("<malformed>");
            let mut r = VerificationReport::error(id, Default::default(), 0, format!("descriptor {index}: {reason}"));
            r.detail = Some(json!({"raw": raw}));
            r
        }
    }
}

/// Applies only the overrides the check understands, so one flag can be
/// passed to a mixed config.
fn apply_known(overrides: &Overrides, d: &mut CheckDescriptor) {
    let mut extra = crate::params::Params::new();
    overrides.apply(&mut extra);
    let known = crate::checks::lookup(&d.check_id).map(|c| c.defaults());
    for (k, v) in extra {
        if known.as_ref().is_some_and(|m| m.contains_key(&k)) {
            d.params.insert(k, v);
        }
    }
}

/// Reports come back in config order whatever the scheduling.
pub fn run_suite(entries: &[Entry], overrides: &Overrides, opts: SuiteOptions) -> SuiteResult {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
    let reports: Vec<VerificationReport> =
        pool.install(|| entries.par_iter().map(|e| run_entry(e, overrides, opts.timings)).collect());
    let exit_code = exit_code(&reports);
    SuiteResult { reports, exit_code }
}

pub fn run_descriptors(descs: &[CheckDescriptor], opts: SuiteOptions) -> SuiteResult {
    let entries: Vec<Entry> = descs.iter().cloned().map(Entry::Descriptor).collect();
    run_suite(&entries, &Overrides::default(), opts)
}

const GRID_PRIMES: [u64; 3] = [2, 3, 5];
const GRID_DISCS: [i64; 6] = [-1, -2, 2, 3, 5, -7];

/// The full suite at the sizes used by the acceptance tests.
pub fn default_suite() -> Vec<CheckDescriptor> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7] {
        out.push(CheckDescriptor::new("macdonald").with("p", p).with("K", 8));
    }
    for p in GRID_PRIMES {
        out.push(CheckDescriptor::new("ib-ip").with("p", p).with("K", 4).with("bound", 3));
    }
    out.push(CheckDescriptor::new("factorization").with("p", 3).with("K", 12));
    for id in ["alpha-chi", "unipotent-lemma", "bijection"] {
        for p in GRID_PRIMES {
            for d in GRID_DISCS {
                out.push(CheckDescriptor::new(id).with("p", p).with("D", d).with("K", 3));
            }
        }
    }
    out.push(CheckDescriptor::new("w-identity").with("samples", 1000).with("seed", 0));
    for r in [2u64, 6, 8, 10] {
        for y in [0.5, 1.0, 2.0] {
            out.push(CheckDescriptor::new("contour").with("r", r).with("y", y));
        }
    }
    for s in [0.75, 1.0, 1.5] {
        out.push(CheckDescriptor::new("f-infty").with("s", s).with("samples", 20).with("seed", 0));
    }
    for d in [-1i64, -7] {
        out.push(CheckDescriptor::new("i-infty-gamma").with("r", 6).with("D", d).with("s", json!([0.75, 1.0, 1.25])));
    }
    for p in [3u64, 5] {
        for d in [-1i64, 1] {
            out.push(CheckDescriptor::new("orbits").with("p", p).with("D", d));
        }
    }
    out.push(CheckDescriptor::new("pd-modularity").with("D", -1).with("r", 10).with("radius", 12.0));
    for d in [-1i64, -7] {
        out.push(CheckDescriptor::new("stabilizer").with("D", d).with("samples", 50).with("words", 100).with("seed", 0));
    }
    out
}

pub fn count(reports: &[VerificationReport], status: Status) -> usize {
    reports.iter().filter(|r| r.status == status).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_passes() {
        let r = run_suite(&[], &Overrides::default(), SuiteOptions::default());
        assert!(r.reports.is_empty());
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn malformed_descriptor_is_an_error_report() {
        let entries = crate::params::parse_config(r#"[{"check_id": "factorization", "oops": 1}]"#).unwrap();
        let r = run_suite(&entries, &Overrides::default(), SuiteOptions { jobs: 1, timings: false });
        assert_eq!(r.reports[0].status, Status::Error);
        assert_eq!(r.exit_code, 1);
    }

    #[test]
    fn factorization_at_three() {
        let d = CheckDescriptor::new("factorization").with("p", 3).with("K", 6);
        let r = run_descriptors(&[d], SuiteOptions::default());
        assert_eq!(r.reports[0].status, Status::Pass);
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn timings_only_when_asked() {
        let d = [CheckDescriptor::new("factorization").with("K", 2)];
        assert!(run_descriptors(&d, SuiteOptions::default()).reports[0].runtime_ms.is_none());
        let r = run_descriptors(&d, SuiteOptions { jobs: 2, timings: true });
        assert!(r.reports[0].runtime_ms.is_some());
    }

    #[test]
    fn default_suite_uses_registered_ids() {
        for d in default_suite() {
            assert!(crate::checks::lookup(&d.check_id).is_some(), "{}", d.check_id);
        }
    }
}
