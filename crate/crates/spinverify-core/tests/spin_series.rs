use num_traits::Zero;
use spinverify_core::exact_algebra::{int, rat, LaurentPoly, Rat};
use spinverify_core::padic::PrimeCtx;
use spinverify_core::satake::{
    ib_by_counting, ib_formula, integral_torus_of_degree, spin_l_factor, torus_sum, verify_macdonald,
    SatakeAssignment, TorusElt, TorusSumKind,
};

/// `X_A^a X_B^b X_C^c X_D^d` with `X_C = W/X_B`, `X_D = W/X_A`.
fn monomial(a: i64, b: i64, c: i64, d: i64) -> LaurentPoly {
    LaurentPoly::monomial(Rat::from_integer(1.into()), [a - d, b - c, c + d])
}

/// Complete homogeneous polynomial of degree `n` in the four Satake variables.
fn h(n: i64) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                acc = &acc + &monomial(a, b, c, n - a - b - c);
            }
        }
    }
    acc
}

#[test]
fn spin_factor_is_complete_homogeneous() {
    let s = spin_l_factor(&SatakeAssignment::Symbolic, 6).unwrap();
    for n in 0..=6 {
        assert_eq!(*s.coeff(n as usize), h(n), "degree {n}");
    }
}

#[test]
fn plain_torus_sum_matches_direct_enumeration() {
    let ctx = PrimeCtx::new(3).unwrap();
    let s = torus_sum(TorusSumKind::Plain, &SatakeAssignment::Symbolic, &ctx, 5).unwrap();
    for n in 0..=5 {
        assert_eq!(*s.coeff(n as usize), h(n));
    }
}

#[test]
fn weighted_sum_against_shifted_oracle() {
    for p in [2u64, 7] {
        let ctx = PrimeCtx::new(p).unwrap();
        let s = torus_sum(TorusSumKind::Weighted, &SatakeAssignment::Symbolic, &ctx, 6).unwrap();
        for n in 0..=6 {
            let mut want = h(n);
            if n >= 2 {
                let shift = &LaurentPoly::w() * &h(n - 2);
                want = &want - &shift.scale(&rat(1, p as i64));
            }
            assert_eq!(*s.coeff(n as usize), want, "p = {p}, degree {n}");
        }
    }
}

#[test]
fn coefficient_counts_are_frozen() {
    // Distinct monomials of h_n once X_A X_D = X_B X_C = W: the integral
    // torus elements of degree n, (n + 1)^2.
    for n in 0..=5 {
        assert_eq!(h(n).len(), ((n + 1) * (n + 1)) as usize);
        assert_eq!(integral_torus_of_degree(n).count(), ((n + 1) * (n + 1)) as usize);
    }
}

#[test]
fn numeric_satake_parameters() {
    let ctx = PrimeCtx::new(5).unwrap();
    let assign = SatakeAssignment::Numeric { xa: rat(2, 3), xb: rat(-1, 4), w: rat(5, 7) };
    let out = verify_macdonald(&assign, &ctx, 6).unwrap();
    assert!(out.holds());
    // Q^1 coefficient: X_A + X_B + W/X_B + W/X_A.
    let q1 = rat(2, 3) + rat(-1, 4) + rat(5, 7) / rat(-1, 4) + rat(5, 7) / rat(2, 3);
    let c1 = out.spin.coeff(1).coeff(&[0, 0, 0]);
    assert_eq!(c1, q1);
}

#[test]
fn ib_at_seven() {
    let ctx = PrimeCtx::new(7).unwrap();
    for n in 0..=2 {
        for t in integral_torus_of_degree(n) {
            assert_eq!(ib_by_counting(&t, &ctx).unwrap(), ib_formula(&t, &ctx).unwrap(), "{t:?}");
        }
    }
    let tb = TorusElt::new([1, 0, 1, 0]).unwrap();
    assert_eq!(ib_formula(&tb, &ctx).unwrap(), int(7));
    assert!(!ib_formula(&TorusElt::identity(), &ctx).unwrap().is_zero());
}
