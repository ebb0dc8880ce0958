//! The registered checks. Each one reads validated parameters and returns an
//! [`Outcome`]; [`run_check`] turns that into a report.

use serde_json::{json, Value};
use spinverify_core::gsp4::Mat2;

use crate::params::{Args, CheckDescriptor, ParamError, Params};
use crate::report::{rat_json, Status, VerificationReport};

mod appendix;
mod archimedean;
mod global;
mod local;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub lhs: Value,
    pub rhs: Value,
    pub max_discrepancy: Option<f64>,
    pub witness: Option<Value>,
    pub detail: Option<Value>,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Core(#[from] spinverify_core::Error),
    #[error("{0}")]
    Other(String),
}

pub type CheckResult = Result<Outcome, CheckError>;

pub struct CheckSpec {
    pub id: &'static str,
    pub summary: &'static str,
    defaults: fn() -> Value,
    run: fn(&Args) -> CheckResult,
}

impl CheckSpec {
    pub fn defaults(&self) -> Params {
        match (self.defaults)() {
            Value::Object(m) => m.into_iter().collect(),
            _ => unreachable!("defaults are objects"),
        }
    }
}

static REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        id: "macdonald",
        summary: "weighted torus sum equals (1 - W Q^2 / p) times the Spin factor, coefficientwise",
        defaults: || json!({"p": 2, "K": 8}),
        run: appendix::macdonald,
    },
    CheckSpec {
        id: "alpha-chi",
        summary: "oscillatory Levi integral equals Delta_0 on normal forms and random Levi elements",
        defaults: || json!({"p": 3, "D": -1, "K": 3, "samples": 50, "seed": 0, "tol": 1e-9}),
        run: local::alpha_chi,
    },
    CheckSpec {
        id: "unipotent-lemma",
        summary: "unipotent character sum equals p^alpha or 0, for each orientation of the congruence",
        defaults: || json!({"p": 3, "D": -1, "K": 3, "tol": 1e-9}),
        run: local::unipotent_lemma,
    },
    CheckSpec {
        id: "bijection",
        summary: "torus cosets of GL2*(L) and Levi cosets coincide with matching integrands",
        defaults: || json!({"p": 3, "D": -1, "K": 3}),
        run: local::bijection,
    },
    CheckSpec {
        id: "ib-ip",
        summary: "I_B and I_P by lattice counting against their closed forms",
        defaults: || json!({"p": 2, "K": 4, "bound": 3}),
        run: appendix::ib_ip,
    },
    CheckSpec {
        id: "factorization",
        summary: "integral torus elements factor through t_A..t_D in val_p(t) + 1 ways",
        defaults: || json!({"p": 3, "K": 12}),
        run: appendix::factorization,
    },
    CheckSpec {
        id: "w-identity",
        summary: "|(w, v)|^2 = ||v||^2 - (v, v) on random rational vectors",
        defaults: || json!({"samples": 1000, "seed": 0}),
        run: archimedean::w_identity,
    },
    CheckSpec {
        id: "contour",
        summary: "line integral of e(-x) (x + iy)^-r against its residue",
        defaults: || json!({"r": 6, "y": 1.0, "cutoff": 200.0, "tol": 1e-6}),
        run: archimedean::contour,
    },
    CheckSpec {
        id: "f-infty",
        summary: "archimedean section by quadrature against its Gamma closed form",
        defaults: || json!({"s": 1.0, "samples": 20, "seed": 0, "tol": 1e-8}),
        run: archimedean::f_infty,
    },
    CheckSpec {
        id: "i-infty-gamma",
        summary: "archimedean integral divided by its Gamma profile is constant in s",
        defaults: || json!({"r": 6, "D": -1, "s": [0.75, 1.0, 1.25], "form": "trace", "tol": 1e-4}),
        run: archimedean::i_infty_gamma,
    },
    CheckSpec {
        id: "orbits",
        summary: "orbits of the embedded GL2*(L) on lines of F_p^4",
        defaults: || json!({"p": 3, "D": -1}),
        run: global::orbits,
    },
    CheckSpec {
        id: "pd-modularity",
        summary: "truncated lattice sum P_D under the symplectic inversion, within its tail bound",
        defaults: || json!({"D": -1, "r": 10, "radius": 12.0, "y": 2.0, "tol": 1e-3, "convention": "natural"}),
        run: global::pd_modularity,
    },
    CheckSpec {
        id: "stabilizer",
        summary: "v_D is fixed by embedded GL2*(L); V5(Z) is stable under GSp4(Z) words",
        defaults: || json!({"D": -1, "samples": 50, "words": 100, "seed": 0}),
        run: global::stabilizer,
    },
];

pub fn registry() -> &'static [CheckSpec] {
    REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|c| c.id == id)
}

/// Run one descriptor. Never panics on bad input: unknown ids, invalid
/// parameters and failed computations all come back as error reports.
pub fn run_check(desc: &CheckDescriptor) -> VerificationReport {
    let seed = desc.params.get("seed").and_then(Value::as_u64).unwrap_or(0);
    let Some(check) = lookup(&desc.check_id) else {
        return VerificationReport::error(&desc.check_id, desc.params.clone(), seed, format!("unknown check id `{}`", desc.check_id));
    };
    let args = match Args::resolve(&check.defaults(), &desc.params) {
        Ok(a) => a,
        Err(e) => return VerificationReport::error(check.id, desc.params.clone(), seed, e.to_string()),
    };
    let seed = args.seed();
    match (check.run)(&args) {
        Ok(o) => VerificationReport {
            check_id: check.id.to_string(),
            params: args.params().clone(),
            status: if o.passed { Status::Pass } else { Status::Fail },
            lhs: o.lhs,
            rhs: o.rhs,
            max_discrepancy: o.max_discrepancy,
            witness: if o.passed { None } else { Some(o.witness.unwrap_or(Value::Null)) },
            detail: o.detail,
            error: None,
            runtime_ms: None,
            seed,
        },
        Err(e) => VerificationReport::error(check.id, args.params().clone(), seed, e.to_string()),
    }
}

/// Largest discrepancy seen and the first sample that broke the tolerance.
#[derive(Debug, Default)]
pub(crate) struct Worst {
    pub max: f64,
    pub first: Option<Value>,
}

impl Worst {
    pub fn record(&mut self, diff: f64, tol: f64, witness: impl FnOnce() -> Value) {
        let diff = if diff.is_nan() { f64::INFINITY } else { diff };
        self.max = self.max.max(diff);
        if diff > tol && self.first.is_none() {
            self.first = Some(witness());
        }
    }

    pub fn ok(&self) -> bool {
        self.first.is_none()
    }
}

pub(crate) fn mat2_json(m: &Mat2) -> Value {
    json!([[rat_json(&m[0][0]), rat_json(&m[0][1])], [rat_json(&m[1][0]), rat_json(&m[1][1])]])
}
