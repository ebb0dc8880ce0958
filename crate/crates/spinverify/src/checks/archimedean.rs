use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use spinverify_core::arch::quadrature::QuadConfig;
use spinverify_core::arch::{contour_integral_check, f_infty_check, i_infty_gamma_check, siegel_parabolic, IInftyForm, RealGsp};
use spinverify_core::exact_algebra::{rat, rat_to_f64, Rat};
use spinverify_core::gsp4::V5Vector;

use super::{CheckError, CheckResult, Outcome, Worst};
use crate::params::Args;
use crate::report::{complex_json, rat_json};

pub fn w_identity(args: &Args) -> CheckResult {
    let samples = args.bounded("samples", 1, 1_000_000)? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed());
    let mut worst = Worst::default();
    let (mut lsum, mut rsum) = (Rat::zero(), Rat::zero());
    for _ in 0..samples {
        let c: [Rat; 5] = std::array::from_fn(|_| rat(rng.gen_range(-60..=60), rng.gen_range(1..=12)));
        let v = V5Vector { c };
        let (l, r) = spinverify_core::arch::w_pairing_identity_check(&v);
        let diff = rat_to_f64(&(&l - &r)).abs();
        worst.record(diff, 0.0, || json!({"v": v.c.iter().map(rat_json).collect::<Vec<_>>(), "lhs": rat_json(&l), "rhs": rat_json(&r)}));
        lsum += l;
        rsum += r;
    }
    Ok(Outcome {
        passed: worst.ok(),
        lhs: json!({"samples": samples, "sum": rat_json(&lsum)}),
        rhs: json!({"samples": samples, "sum": rat_json(&rsum)}),
        max_discrepancy: Some(worst.max),
        witness: worst.first,
        detail: None,
    })
}

pub fn contour(args: &Args) -> CheckResult {
    let r = args.bounded("r", 2, 40)? as u32;
    let y = args.positive("y")?;
    let cutoff = args.positive("cutoff")?;
    let tol = args.positive("tol")?;
    let c = contour_integral_check(r, y, cutoff, &QuadConfig::default())?;
    let passed = c.rel_error < tol;
    Ok(Outcome {
        passed,
        lhs: complex_json(c.numeric),
        rhs: complex_json(c.closed),
        max_discrepancy: Some(c.rel_error),
        witness: (!passed).then(|| json!({"r": r, "y": y, "rel_error": c.rel_error})),
        detail: None,
    })
}

fn random_parabolic(rng: &mut ChaCha8Rng) -> Result<(RealGsp, [f64; 8]), CheckError> {
    loop {
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let lambda = rng.gen_range(0.3..3.0);
        let m: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if m[0] * m[3] - m[1] * m[2] > 0.2 {
            let g = siegel_parabolic(x, lambda, m)?;
            return Ok((g, [x[0], x[1], x[2], lambda, m[0], m[1], m[2], m[3]]));
        }
    }
}

pub fn f_infty(args: &Args) -> CheckResult {
    let s = args.positive("s")?;
    let samples = args.bounded("samples", 1, 10_000)? as usize;
    let tol = args.positive("tol")?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed());
    let elements = (0..samples).map(|_| random_parabolic(&mut rng)).collect::<Result<Vec<_>, _>>()?;
    let cfg = QuadConfig::default();
    let results = elements.par_iter().map(|(g, _)| f_infty_check(g, s, &cfg)).collect::<Result<Vec<_>, _>>()?;
    let mut worst = Worst::default();
    for ((_, data), c) in elements.iter().zip(&results) {
        worst.record(c.rel_error, tol, || {
            json!({"x": &data[..3], "lambda": data[3], "m": &data[4..], "numeric": c.numeric.re, "closed": c.closed.re})
        });
    }
    Ok(Outcome {
        passed: worst.ok(),
        lhs: json!(results.iter().map(|c| c.numeric.re).collect::<Vec<_>>()),
        rhs: json!(results.iter().map(|c| c.closed.re).collect::<Vec<_>>()),
        max_discrepancy: Some(worst.max),
        witness: worst.first,
        detail: None,
    })
}

pub fn i_infty_gamma(args: &Args) -> CheckResult {
    let r = args.bounded("r", 6, 40)? as u32;
    let d = args.i64("D")?;
    let s = args.f64_list("s")?;
    let tol = args.positive("tol")?;
    let form = match args.str("form")? {
        "trace" => IInftyForm::Trace,
        "displayed" => IInftyForm::AsDisplayed,
        other => return Err(CheckError::Other(format!("unknown form `{other}`; use trace or displayed"))),
    };
    let rep = i_infty_gamma_check(r, d, &s, form, &QuadConfig::default())?;
    let passed = rep.spread < tol;
    let worst = rep
        .ratios
        .iter()
        .zip(&rep.s_values)
        .map(|(x, s)| ((x / rep.ratios[0] - 1.0).abs(), *s))
        .fold((0.0, s[0]), |a, b| if b.0 > a.0 { b } else { a });
    Ok(Outcome {
        passed,
        lhs: json!(rep.numeric),
        rhs: json!(rep.closed),
        max_discrepancy: Some(rep.spread),
        witness: (!passed).then(|| json!({"s": worst.1, "relative_spread": worst.0})),
        detail: Some(json!({"ratios": rep.ratios, "analytic_constant": rep.analytic_constant})),
    })
}
