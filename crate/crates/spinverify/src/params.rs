//! Check descriptors, parameter maps and command-line overrides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Parameters of one check, keyed by name. Ordered, so serialization is stable.
pub type Params = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDescriptor {
    pub check_id: String,
    #[serde(default)]
    pub params: Params,
}

impl CheckDescriptor {
    pub fn new(check_id: &str) -> Self {
        Self { check_id: check_id.to_string(), params: Params::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config must be a JSON array of descriptors")]
    NotAnArray,
}

/// One config entry: either a descriptor or the reason it could not be read.
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Descriptor(CheckDescriptor),
    Malformed { index: usize, reason: String, raw: Value },
}

/// Parse a config file. A malformed entry does not abort the whole file; it
/// becomes an error report when the suite runs.
pub fn parse_config(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let root: Value = serde_json::from_str(text)?;
    let Value::Array(items) = root else {
        return Err(ConfigError::NotAnArray);
    };
    Ok(items
        .into_iter()
        .enumerate()
        .map(|(index, raw)| match serde_json::from_value::<CheckDescriptor>(raw.clone()) {
            Ok(d) => Entry::Descriptor(d),
            Err(e) => Entry::Malformed { index, reason: e.to_string(), raw },
        })
        .collect())
}

/// Values given on the command line. They replace the matching config fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub p: Option<u64>,
    pub disc: Option<i64>,
    pub order: Option<u64>,
    pub weight: Option<u64>,
    pub radius: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, params: &mut Params) {
        let mut set = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        };
        set("p", self.p.map(Value::from));
        set("D", self.disc.map(Value::from));
        set("K", self.order.map(Value::from));
        set("r", self.weight.map(Value::from));
        set("radius", self.radius.map(Value::from));
        set("tol", self.tol.map(Value::from));
        set("seed", self.seed.map(Value::from));
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("unknown parameter `{0}`")]
    Unknown(String),
    #[error("parameter `{key}`: {msg}")]
    Invalid { key: String, msg: String },
}

/// Typed, validated view of a parameter map merged with a check's defaults.
#[derive(Debug, Clone)]
pub struct Args {
    values: Params,
}

impl Args {
    /// Merge `given` over `defaults`, rejecting keys the check does not know.
    pub fn resolve(defaults: &Params, given: &Params) -> Result<Self, ParamError> {
        let mut values = defaults.clone();
        for (k, v) in given {
            if !defaults.contains_key(k) {
                return Err(ParamError::Unknown(k.clone()));
            }
            values.insert(k.clone(), v.clone());
        }
        Ok(Self { values })
    }

    pub fn params(&self) -> &Params {
        &self.values
    }

    fn get(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or(&Value::Null)
    }

    fn invalid(key: &str, msg: impl Into<String>) -> ParamError {
        ParamError::Invalid { key: key.to_string(), msg: msg.into() }
    }

    pub fn u64(&self, key: &str) -> Result<u64, ParamError> {
        self.get(key).as_u64().ok_or_else(|| Self::invalid(key, "expected a non-negative integer"))
    }

    pub fn i64(&self, key: &str) -> Result<i64, ParamError> {
        self.get(key).as_i64().ok_or_else(|| Self::invalid(key, "expected an integer"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ParamError> {
        match self.get(key).as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => Err(Self::invalid(key, "expected a finite number")),
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64, ParamError> {
        let x = self.f64(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Self::invalid(key, "must be positive"))
        }
    }

    pub fn str(&self, key: &str) -> Result<&str, ParamError> {
        self.get(key).as_str().ok_or_else(|| Self::invalid(key, "expected a string"))
    }

    /// A list of numbers; a bare number counts as a one-element list.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, ParamError> {
        match self.get(key) {
            Value::Array(xs) if !xs.is_empty() => xs
                .iter()
                .map(|x| x.as_f64().filter(|v| v.is_finite()).ok_or_else(|| Self::invalid(key, "expected numbers")))
                .collect(),
            v => v.as_f64().map(|x| vec![x]).ok_or_else(|| Self::invalid(key, "expected a number or a list of numbers")),
        }
    }

    pub fn prime(&self, key: &str) -> Result<u64, ParamError> {
        let p = self.u64(key)?;
        if p >= 2 && (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0) {
            Ok(p)
        } else {
            Err(Self::invalid(key, format!("{p} is not prime")))
        }
    }

    pub fn seed(&self) -> u64 {
        self.get("seed").as_u64().unwrap_or(0)
    }

    /// Integer within `lo..=hi`.
    pub fn bounded(&self, key: &str, lo: u64, hi: u64) -> Result<u64, ParamError> {
        let v = self.u64(key)?;
        if (lo..=hi).contains(&v) {
            Ok(v)
        } else {
            Err(Self::invalid(key, format!("must lie in {lo}..={hi}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn malformed_entries_survive_parsing() {
        let cfg = r#"[{"check_id": "factorization", "params": {"K": 6}}, {"params": {}}, 3]"#;
        let entries = parse_config(cfg).unwrap();
        assert_eq!(entries.len(), 3);
        assert!(matches!(&entries[0], Entry::Descriptor(d) if d.check_id == "factorization"));
        assert!(matches!(&entries[1], Entry::Malformed { index: 1, .. }));
        assert!(matches!(&entries[2], Entry::Malformed { index: 2, .. }));
        assert!(matches!(parse_config("{}"), Err(ConfigError::NotAnArray)));
        assert!(parse_config("[").is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let mut p = Params::new();
        p.insert("p".into(), json!(3));
        let o = Overrides { p: Some(5), disc: Some(-7), ..Default::default() };
        o.apply(&mut p);
        assert_eq!(p["p"], json!(5));
        assert_eq!(p["D"], json!(-7));
        assert!(!p.contains_key("seed"));
    }

    #[test]
    fn resolve_rejects_unknown_keys() {
        let mut d = Params::new();
        d.insert("p".into(), json!(2));
        let mut g = Params::new();
        g.insert("q".into(), json!(1));
        assert_eq!(Args::resolve(&d, &g).unwrap_err(), ParamError::Unknown("q".into()));
        g.clear();
        g.insert("p".into(), json!(9));
        let a = Args::resolve(&d, &g).unwrap();
        assert!(a.prime("p").is_err());
        assert_eq!(a.u64("p").unwrap(), 9);
    }

    #[test]
    fn lists_accept_scalars() {
        let mut d = Params::new();
        d.insert("s".into(), json!([0.75, 1]));
        d.insert("y".into(), json!(2));
        let a = Args::resolve(&d, &Params::new()).unwrap();
        assert_eq!(a.f64_list("s").unwrap(), vec![0.75, 1.0]);
        assert_eq!(a.f64_list("y").unwrap(), vec![2.0]);
    }
}
