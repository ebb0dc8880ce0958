//! Verification reports and the JSON encodings of their values.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};
use spinverify_core::exact_algebra::{LaurentPoly, Rat, TruncatedSeries};

use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Error => "error",
        }
    }
}

/// Field order here is the field order of the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub params: Params,
    pub status: Status,
    pub lhs: Value,
    pub rhs: Value,
    pub max_discrepancy: Option<f64>,
    /// First offending coset, coefficient degree or sample point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    pub seed: u64,
}

impl VerificationReport {
    pub fn error(check_id: &str, params: Params, seed: u64, msg: impl Into<String>) -> Self {
        Self {
            check_id: check_id.to_string(),
            params,
            status: Status::Error,
            lhs: Value::Null,
            rhs: Value::Null,
            max_discrepancy: None,
            witness: None,
            detail: None,
            error: Some(msg.into()),
            runtime_ms: None,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `"num/den"`, denominator always written.
pub fn rat_json(x: &Rat) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn poly_json(p: &LaurentPoly) -> Value {
    Value::String(p.to_string())
}

/// `{"k": "coefficient of Q^k"}` for every nonzero coefficient.
pub fn series_json(s: &TruncatedSeries) -> Value {
    let mut m = Map::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if !c.is_zero() {
            m.insert(k.to_string(), poly_json(c));
        }
    }
    Value::Object(m)
}
