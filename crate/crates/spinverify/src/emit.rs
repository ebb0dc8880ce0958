//! Serialized output: versioned JSON or one line per check.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::report::{Status, VerificationReport};
use crate::suite::count;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    passed: usize,
    failed: usize,
    errors: usize,
}

#[derive(Serialize)]
struct Document<'a> {
    schema: u32,
    reports: &'a [VerificationReport],
    summary: Summary,
}

fn param_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn text_line(r: &VerificationReport) -> String {
    let mark = if r.passed() { '✓' } else { '✗' };
    let mut line = format!("{mark} {}", r.check_id);
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", param_text(v))).collect();
    if !params.is_empty() {
        let _ = write!(line, " [{}]", params.join(" "));
    }
    match r.status {
        Status::Error => {
            let _ = write!(line, " error: {}", r.error.as_deref().unwrap_or("unknown"));
        }
        _ => {
            if let Some(d) = r.max_discrepancy {
                let _ = write!(line, " max_discrepancy={d:e}");
            }
            if let Some(w) = &r.witness {
                let _ = write!(line, " witness={w}");
            }
        }
    }
    if let Some(ms) = r.runtime_ms {
        let _ = write!(line, " ({ms} ms)");
    }
    line
}

pub fn emit_report(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let doc = Document {
                schema: SCHEMA_VERSION,
                reports,
                summary: Summary {
                    total: reports.len(),
                    passed: count(reports, Status::Pass),
                    failed: count(reports, Status::Fail),
                    errors: count(reports, Status::Error),
                },
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => reports.iter().map(|r| text_line(r) + "\n").collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CheckDescriptor;
    use crate::suite::{run_descriptors, SuiteOptions};

    #[test]
    fn pass_report_in_json() {
        let r = run_descriptors(&[CheckDescriptor::new("factorization").with("K", 3)], SuiteOptions::default());
        let s = emit_report(&r.reports, Format::Json);
        assert!(s.starts_with("{\n  \"schema\": 1,"));
        assert!(s.contains("\"status\": \"pass\""));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["summary"]["passed"], 1);
    }

    #[test]
    fn text_has_one_line_per_check() {
        let descs = [CheckDescriptor::new("factorization").with("K", 3), CheckDescriptor::new("nope")];
        let r = run_descriptors(&descs, SuiteOptions::default());
        let s = emit_report(&r.reports, Format::Text);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("✓ factorization [K=3 p=3]"));
        assert!(lines[1].starts_with("✗ nope error:"));
    }

    #[test]
    fn series_mismatch_names_the_degree() {
        let r = crate::report::VerificationReport {
            check_id: "macdonald".into(),
            params: Default::default(),
            status: Status::Fail,
            lhs: Value::Null,
            rhs: Value::Null,
            max_discrepancy: Some(1.0),
            witness: Some(serde_json::json!({"identity": "weighted", "degree": 2, "difference": "-1/3*W"})),
            detail: None,
            error: None,
            runtime_ms: None,
            seed: 0,
        };
        let s = emit_report(&[r], Format::Json);
        assert!(s.contains("\"degree\": 2") && s.contains("\"difference\": \"-1/3*W\""));
    }
}
