use std::collections::BTreeSet;

use spinverify_core::exact_algebra::{int, Rat};
use spinverify_core::gsp4::{mat2, Branch, QuadExt};
use spinverify_core::local_unramified::{
    alpha_chi_p, delta0, enumerate_levi_cosets, enumerate_torus_l_cosets, levi_from, unipotent_integral,
    LeviCoset, Orientation,
};
use spinverify_core::padic::PrimeCtx;

fn congruent(b: i128, alpha: u32, d: i64, p: i128, o: Orientation) -> bool {
    let m = p.pow(alpha);
    if d.rem_euclid(4) == 1 {
        let lin = if o == Orientation::Minus { -b } else { b };
        (b * b + lin - ((d - 1) / 4) as i128).rem_euclid(m) == 0
    } else {
        (b * b - d as i128).rem_euclid(m) == 0
    }
}

#[test]
fn alpha_chi_on_all_normal_forms() {
    for (p, d) in [(3u64, -1i64), (5, -1), (2, -7), (2, 3)] {
        let ctx = PrimeCtx::new(p).unwrap();
        let ext = QuadExt::new(d).unwrap();
        for alpha in 0..=2u32 {
            for b in 0..(p as i128).pow(alpha) {
                for l in 0..=1 {
                    let g = LeviCoset::new(alpha, b, l, &ctx).element(&ctx);
                    let lhs = alpha_chi_p(&g, &ext, &ctx).unwrap();
                    let rhs = spinverify_core::exact_algebra::rat_to_f64(&delta0(&g, &ext, &ctx).unwrap());
                    assert!((lhs.re - rhs).abs() < 1e-9 && lhs.im.abs() < 1e-9, "p={p} D={d} ({alpha},{b},{l})");
                }
            }
        }
    }
}

#[test]
fn levi_enumeration_is_the_congruence() {
    for (p, d) in [(5u64, -1i64), (2, -7), (3, -2)] {
        let ctx = PrimeCtx::new(p).unwrap();
        let ext = QuadExt::new(d).unwrap();
        let got: BTreeSet<(u32, i128)> = enumerate_levi_cosets(&ext, &ctx, 3, Orientation::Minus)
            .into_iter()
            .filter(|k| k.lambda_exp == 0)
            .map(|k| (k.alpha_exp, k.b))
            .collect();
        let want: BTreeSet<(u32, i128)> = (0..=3u32)
            .flat_map(|a| (0..(p as i128).pow(a)).map(move |b| (a, b)))
            .filter(|&(a, b)| congruent(b, a, d, p as i128, Orientation::Minus))
            .collect();
        assert_eq!(got, want);
    }
}

#[test]
fn unipotent_lemma_small_grid() {
    for (p, d) in [(3u64, -2i64), (2, 5), (2, -7)] {
        let ctx = PrimeCtx::new(p).unwrap();
        let ext = QuadExt::new(d).unwrap();
        for alpha in 0..=2u32 {
            for delta in 0..=1u32 {
                for b in 0..(p as i64).pow(alpha) {
                    let mb = mat2(int((p as i64).pow(alpha)), int(b), int(0), int((p as i64).pow(delta)));
                    let g = levi_from(&mb, &Rat::from_integer(1.into())).unwrap();
                    let v = unipotent_integral(&g, &ext, &ctx).unwrap();
                    let want = if delta == 0 && congruent(b as i128, alpha, d, p as i128, Orientation::Minus) {
                        (p as f64).powi(alpha as i32)
                    } else {
                        0.0
                    };
                    assert!((v.re - want).abs() < 1e-9 && v.im.abs() < 1e-9, "p={p} D={d} a={alpha} d={delta} b={b}: {v}");
                }
            }
        }
    }
}

#[test]
fn only_minus_orientation_matches_at_two() {
    let ctx = PrimeCtx::new(2).unwrap();
    let ext = QuadExt::new(-7).unwrap();
    assert_eq!(ext.branch(), Branch::OneMod4);
    let torus: Vec<LeviCoset> = enumerate_torus_l_cosets(&ext, &ctx, 3).unwrap().iter().map(|w| w.coset).collect();
    assert_eq!(torus, enumerate_levi_cosets(&ext, &ctx, 3, Orientation::Minus));
    assert_ne!(torus, enumerate_levi_cosets(&ext, &ctx, 3, Orientation::Plus));
    assert_eq!(torus.len(), 16);
}
