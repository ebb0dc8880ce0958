use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use spinverify_core::exact_algebra::{int, rat_to_f64, LaurentPoly, Rat};
use spinverify_core::gsp4::{mat2, Mat2};
use spinverify_core::padic::PrimeCtx;
use spinverify_core::satake::{
    factorization_count, ib_by_counting, ib_formula, integral_torus_of_degree, ip_by_counting, ip_formula,
    verify_macdonald, SatakeAssignment, TorusElt,
};

use super::{mat2_json, CheckResult, Outcome};
use crate::params::Args;
use crate::report::{poly_json, rat_json, series_json};

fn max_coeff(p: &LaurentPoly) -> f64 {
    p.terms().map(|(_, c)| rat_to_f64(&c.abs())).fold(0.0, f64::max)
}

pub fn macdonald(args: &Args) -> CheckResult {
    let p = args.prime("p")?;
    let k = args.bounded("K", 0, 16)? as usize;
    let ctx = PrimeCtx::new(p)?;
    let out = verify_macdonald(&SatakeAssignment::Symbolic, &ctx, k)?;
    let mut witness = None;
    let mut disc = 0.0;
    for (name, m) in [("weighted", &out.weighted_mismatch), ("plain", &out.plain_mismatch)] {
        if let Some((deg, diff)) = m {
            disc = f64::max(disc, max_coeff(diff));
            witness.get_or_insert_with(|| json!({"identity": name, "degree": deg, "difference": poly_json(diff)}));
        }
    }
    Ok(Outcome {
        passed: out.holds(),
        lhs: series_json(&out.weighted),
        rhs: series_json(&out.expected_weighted),
        max_discrepancy: Some(disc),
        witness,
        detail: Some(json!({"plain_identity": out.plain_mismatch.is_none(), "order": k})),
    })
}

fn torus_json(t: &TorusElt) -> Value {
    json!({"u": t.u})
}

/// Upper and lower triangular shapes with diagonal `(p^a, p^b)`.
fn ip_shapes(p: i64, a: u32, b: u32) -> [Mat2; 3] {
    let (pa, pb) = (int(p.pow(a)), int(p.pow(b)));
    [
        mat2(pa.clone(), int(0), int(0), pb.clone()),
        mat2(pa.clone(), int(1), int(0), pb.clone()),
        mat2(pa, int(0), int(p), pb),
    ]
}

pub fn ib_ip(args: &Args) -> CheckResult {
    let p = args.prime("p")?;
    let k = args.bounded("K", 0, 8)? as i64;
    let bound = args.bounded("bound", 0, 4)? as u32;
    let ctx = PrimeCtx::new(p)?;

    let tori: Vec<TorusElt> = (0..=k).flat_map(integral_torus_of_degree).collect();
    let ib: Vec<(Rat, Rat)> = tori
        .par_iter()
        .map(|t| Ok((ib_by_counting(t, &ctx)?, ib_formula(t, &ctx)?)))
        .collect::<Result<_, spinverify_core::Error>>()?;

    let shapes: Vec<Mat2> = (0..=bound)
        .flat_map(|a| (0..=bound).map(move |b| (a, b)))
        .flat_map(|(a, b)| ip_shapes(p as i64, a, b))
        .collect();
    let ip: Vec<(Rat, Rat)> = shapes
        .par_iter()
        .map(|m| Ok((ip_by_counting(m, &ctx)?, ip_formula(m, &ctx)?)))
        .collect::<Result<_, spinverify_core::Error>>()?;

    let mut disc = 0.0f64;
    let mut witness = None;
    for (t, (c, f)) in tori.iter().zip(&ib) {
        disc = disc.max(rat_to_f64(&(c - f).abs()));
        if c != f && witness.is_none() {
            witness = Some(json!({"integral": "I_B", "t": torus_json(t), "counted": rat_json(c), "formula": rat_json(f)}));
        }
    }
    for (m, (c, f)) in shapes.iter().zip(&ip) {
        disc = disc.max(rat_to_f64(&(c - f).abs()));
        if c != f && witness.is_none() {
            witness = Some(json!({"integral": "I_P", "m2": mat2_json(m), "counted": rat_json(c), "formula": rat_json(f)}));
        }
    }
    let sum = |xs: &[(Rat, Rat)], first: bool| xs.iter().fold(Rat::zero(), |acc, (c, f)| acc + if first { c } else { f });
    Ok(Outcome {
        passed: witness.is_none(),
        lhs: json!({"I_B": {"cases": ib.len(), "sum": rat_json(&sum(&ib, true))}, "I_P": {"cases": ip.len(), "sum": rat_json(&sum(&ip, true))}}),
        rhs: json!({"I_B": {"cases": ib.len(), "sum": rat_json(&sum(&ib, false))}, "I_P": {"cases": ip.len(), "sum": rat_json(&sum(&ip, false))}}),
        max_discrepancy: Some(disc),
        witness,
        detail: None,
    })
}

pub fn factorization(args: &Args) -> CheckResult {
    args.prime("p")?;
    let k = args.bounded("K", 0, 40)? as i64;
    let mut witness = None;
    let (mut cases, mut total, mut expected) = (0u64, 0u64, 0u64);
    let mut disc = 0u64;
    for n in 0..=k {
        for t in integral_torus_of_degree(n) {
            let got = factorization_count(&t);
            // Brute force over exponents of t_A, t_B, t_C, t_D.
            let brute = (0..=n)
                .flat_map(|a| (0..=n - a).map(move |b| (a, b)))
                .flat_map(|(a, b)| (0..=n - a - b).map(move |c| (a, b, c, n - a - b - c)))
                .filter(|&(a, b, c, d)| [a + b, a + c, b + d, c + d] == t.u)
                .count() as u64;
            let want = (t.val() + 1) as u64;
            cases += 1;
            total += got;
            expected += want;
            disc = disc.max(got.abs_diff(want)).max(brute.abs_diff(want));
            if (got != want || brute != want) && witness.is_none() {
                witness = Some(json!({"t": torus_json(&t), "count": got, "brute_force": brute, "expected": want}));
            }
        }
    }
    Ok(Outcome {
        passed: witness.is_none(),
        lhs: json!({"cases": cases, "total": total}),
        rhs: json!({"cases": cases, "total": expected}),
        max_discrepancy: Some(disc as f64),
        witness,
        detail: None,
    })
}
