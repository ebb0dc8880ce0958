use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use spinverify_core::arch::SiegelPoint;
use spinverify_core::exact_algebra::{int, rat, Rat};
use spinverify_core::gsp4::{
    act_v5, embed_gl2l, gsp4z_generators, gsp4z_word, j4, line_orbits_mod_p, make_gsp, make_v_d, Branch, LElt,
    QuadExt, V5Vector,
};
use spinverify_core::padic::PrimeCtx;
use spinverify_core::siegel::{enumerate_slab, modularity_check, shell_from_slabs, slab_range, ShellConvention};

use super::{CheckError, CheckResult, Outcome};
use crate::params::Args;
use crate::report::{complex_json, rat_json};

pub fn orbits(args: &Args) -> CheckResult {
    let p = args.prime("p")?;
    let d = args.i64("D")?;
    let ext = QuadExt::new(d)?;
    let ctx = PrimeCtx::new(p)?;
    if p == 2 || d.rem_euclid(p as i64) == 0 {
        return Err(CheckError::Other(format!("p = {p} must be odd and prime to D = {d}")));
    }
    let pi = p as i64;
    let square = (1..pi).any(|x| (x * x - d).rem_euclid(pi) == 0);
    // Transitive when L_p is a field, three orbits when it splits.
    let expected = if square { 3 } else { 1 };
    let orbits = line_orbits_mod_p(&ext, &ctx)?;
    let lines = (pi.pow(4) - 1) / (pi - 1);
    let total: usize = orbits.sizes.iter().sum();
    let passed = orbits.count() == expected && total as i64 == lines;
    Ok(Outcome {
        passed,
        lhs: json!({"orbits": orbits.count(), "sizes": orbits.sizes}),
        rhs: json!({"orbits": expected, "lines": lines}),
        max_discrepancy: Some(orbits.count().abs_diff(expected) as f64),
        witness: (!passed).then(|| json!({"p": p, "D": d, "sizes": orbits.sizes})),
        detail: None,
    })
}

fn convention(args: &Args, ext: &QuadExt) -> Result<ShellConvention, CheckError> {
    match args.str("convention")? {
        "natural" => Ok(ShellConvention::natural(ext)),
        "generic" => Ok(ShellConvention::Generic),
        "half-integral" if ext.branch() == Branch::OneMod4 => Ok(ShellConvention::HalfIntegral),
        other => Err(CheckError::Other(format!("convention `{other}` is not available for D = {}", ext.d()))),
    }
}

pub fn pd_modularity(args: &Args) -> CheckResult {
    let d = args.i64("D")?;
    if d >= 0 {
        return Err(CheckError::Other("P_D needs D < 0".into()));
    }
    let ext = QuadExt::new(d)?;
    let conv = convention(args, &ext)?;
    let r = args.bounded("r", 6, 40)? as u32;
    if r % 2 != 0 {
        return Err(CheckError::Other("r must be even".into()));
    }
    let radius = args.positive("radius")?;
    let y = args.positive("y")?;
    let tol = args.positive("tol")?;
    let slabs: Vec<_> = slab_range(radius).collect::<Vec<_>>().into_par_iter().map(|a| enumerate_slab(d, radius, conv, a)).collect();
    let shell = shell_from_slabs(d, radius, conv, slabs)?;
    let z = SiegelPoint::i_scaled(y);
    let rep = modularity_check(&shell, r, &z, &make_gsp(j4())?)?;
    let passed = rep.defect < tol && rep.abs_defect <= rep.abs_bound;
    Ok(Outcome {
        passed,
        lhs: complex_json(rep.lhs),
        rhs: complex_json(rep.rhs),
        max_discrepancy: Some(rep.defect),
        witness: (!passed).then(|| json!({"z": [[0.0, y], [0.0, 0.0], [0.0, y]], "defect": rep.defect, "abs_defect": rep.abs_defect, "abs_bound": rep.abs_bound})),
        detail: Some(json!({
            "convention": conv.name(),
            "terms": rep.terms,
            "j": complex_json(rep.j),
            "abs_defect": rep.abs_defect,
            "abs_bound": rep.abs_bound,
            "relative_bound": rep.defect_bound,
            "transported_defect": rep.transported_defect,
        })),
    })
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))
}

fn random_lelt(rng: &mut ChaCha8Rng) -> LElt {
    LElt::new(small_rat(rng), small_rat(rng))
}

fn lelt_json(x: &LElt) -> serde_json::Value {
    json!([rat_json(&x.e), rat_json(&x.h)])
}

pub fn stabilizer(args: &Args) -> CheckResult {
    let ext = QuadExt::new(args.i64("D")?)?;
    let samples = args.bounded("samples", 0, 100_000)? as usize;
    let words = args.bounded("words", 0, 100_000)? as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed());
    let v_d = make_v_d(&ext);
    let mut witness = None;
    let mut fixed = 0;
    let mut drawn = 0;
    while drawn < samples {
        let (u1, u2, u3) = (random_lelt(&mut rng), random_lelt(&mut rng), random_lelt(&mut rng));
        let det = small_rat(&mut rng);
        if u1.is_zero() || ext.norm(&u1).is_zero() || det.is_zero() {
            continue;
        }
        drawn += 1;
        let u = ext.complete_with_det(u1, u2, u3, &det)?;
        let g = embed_gl2l(&u, &ext)?;
        let img = act_v5(&v_d, &g);
        if img == v_d {
            fixed += 1;
        } else if witness.is_none() {
            witness = Some(json!({"kind": "stabilizer", "u": u.iter().flatten().map(lelt_json).collect::<Vec<_>>(), "image": img.c.iter().map(rat_json).collect::<Vec<_>>()}));
        }
    }
    let gens = gsp4z_generators().len();
    let half = ext.branch() == Branch::OneMod4;
    let mut stable = 0;
    for _ in 0..words {
        let len = rng.gen_range(1..=10);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..gens)).collect();
        let g = gsp4z_word(&word);
        let c: [i64; 5] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        let b2 = if half { rat(c[2], 2) } else { int(c[2]) };
        let v = V5Vector::new(int(c[0]), int(c[1]), b2, int(c[3]), int(c[4]));
        let img = act_v5(&v, &g);
        if img.is_integral(&ext) && img.q() == v.q() {
            stable += 1;
        } else if witness.is_none() {
            witness = Some(json!({"kind": "integrality", "word": word, "v": v.c.iter().map(rat_json).collect::<Vec<_>>(), "image": img.c.iter().map(rat_json).collect::<Vec<_>>()}));
        }
    }
    Ok(Outcome {
        passed: witness.is_none(),
        lhs: json!({"fixed": fixed, "stable": stable}),
        rhs: json!({"fixed": samples, "stable": words}),
        max_discrepancy: Some(((samples - fixed) + (words - stable)) as f64),
        witness,
        detail: Some(json!({"v_D": v_d.c.iter().map(rat_json).collect::<Vec<_>>()})),
    })
}
