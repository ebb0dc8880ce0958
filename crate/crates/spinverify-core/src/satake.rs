//! Torus sums against an unramified character, the unipotent integrals
//! `I_B` and `I_P`, and the Spin Euler factor as a truncated series in
//! `Q = p^{3/2 - s}`.
//!
//! This module uses the ordered basis `(e1, e2, f2, f1)`, in which the
//! Borel is upper triangular. [`to_standard`] converts to the
//! `(e1, e2, f1, f2)` ordering of [`crate::gsp4`].

use alloc::vec::Vec;
use core::array;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{int, series_geo_inverse, LaurentPoly, Rat, TruncatedSeries};
use crate::gsp4::{det2, diag4, make_gsp, GSpElement, Mat2, Mat4};
use crate::padic::{residue, val_p, vp_i128, LatticeQuotient, PrimeCtx};

/// `diag(p^u1, p^u2, p^u3, p^u4)` in the basis `(e1, e2, f2, f1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElt {
    pub u: [i64; 4],
}

pub const T_A: TorusElt = TorusElt { u: [1, 1, 0, 0] };
pub const T_B: TorusElt = TorusElt { u: [1, 0, 1, 0] };
pub const T_C: TorusElt = TorusElt { u: [0, 1, 0, 1] };
pub const T_D: TorusElt = TorusElt { u: [0, 0, 1, 1] };

impl TorusElt {
    pub fn new(u: [i64; 4]) -> Result<Self> {
        if u[0] + u[3] != u[1] + u[2] {
            return Err(Error::WrongShape(alloc::format!("{u:?} is not a similitude")));
        }
        Ok(Self { u })
    }

    pub fn identity() -> Self {
        Self { u: [0; 4] }
    }

    /// `p^k` times the identity.
    pub fn scalar(k: i64) -> Self {
        Self { u: [k; 4] }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { u: array::from_fn(|i| self.u[i] + o.u[i]) }
    }

    pub fn ord_nu(&self) -> i64 {
        self.u[0] + self.u[3]
    }

    /// Largest `k` with `p^{-k} t` integral.
    pub fn val(&self) -> i64 {
        *self.u.iter().min().expect("four entries")
    }

    pub fn is_integral(&self) -> bool {
        self.val() >= 0
    }

    /// `alpha(t) = X_A^{u1-u3} X_B^{u3-u4} W^{u4}`.
    pub fn alpha(&self) -> LaurentPoly {
        let [u1, _, u3, u4] = self.u;
        LaurentPoly::monomial(Rat::one(), [u1 - u3, u3 - u4, u4])
    }

    /// The matrix in the standard basis `(e1, e2, f1, f2)`.
    pub fn to_gsp(&self, ctx: &PrimeCtx) -> GSpElement {
        let [u1, u2, u3, u4] = self.u;
        make_gsp(diag4([ctx.pow(u1), ctx.pow(u2), ctx.pow(u4), ctx.pow(u3)])).expect("torus similitude")
    }
}

/// Swap the last two basis vectors: `(e1, e2, f2, f1) <-> (e1, e2, f1, f2)`.
pub fn to_standard(m: &Mat4) -> Mat4 {
    const PERM: [usize; 4] = [0, 1, 3, 2];
    array::from_fn(|i| array::from_fn(|j| m[PERM[i]][PERM[j]].clone()))
}

pub fn from_standard(m: &Mat4) -> Mat4 {
    to_standard(m)
}

/// The symplectic form in the basis `(e1, e2, f2, f1)`.
pub fn j_appendix() -> Mat4 {
    to_standard(&crate::gsp4::j4())
}

/// Upper unipotent `n(a, b, c, d)` with `e = b - ad`, `f = -a` filling
/// the remaining entries, in the basis `(e1, e2, f2, f1)`.
pub fn n_matrix(a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Mat4 {
    let z = Rat::zero;
    let o = Rat::one;
    [
        [o(), a.clone(), b.clone(), c.clone()],
        [z(), o(), d.clone(), b - a * d],
        [z(), z(), o(), -a.clone()],
        [z(), z(), z(), o()],
    ]
}

/// `delta_B(t)^{1/2} |nu(t)|^{-3/2} (val_p(pt) - |p| val_p(t))`.
pub fn ib_formula(t: &TorusElt, ctx: &PrimeCtx) -> Result<Rat> {
    if !t.is_integral() {
        return Err(Error::WrongShape("I_B needs an integral torus element".into()));
    }
    let [u1, _, u3, u4] = t.u;
    // t = diag(lambda t1, lambda t2, t1, t2): ord lambda = u1 - u3.
    let l = u1 - u3;
    let twice = -(3 * l + u3 - u4) + 3 * (l + u3 + u4);
    if twice % 2 != 0 {
        return Err(Error::HalfPower(alloc::format!("p^({twice}/2)")));
    }
    let k = t.val();
    let coeff = int(k + 1) - int(k) * ctx.pow(-1);
    Ok(ctx.pow(twice / 2) * coeff)
}

/// `int_N 1(n t ∈ M4(Z_p)) dn` by counting over the coordinates `(a, d)`,
/// with the `b` and `c` directions integrated exactly.
pub fn ib_by_counting(t: &TorusElt, ctx: &PrimeCtx) -> Result<Rat> {
    if !t.is_integral() {
        return Err(Error::WrongShape("I_B needs an integral torus element".into()));
    }
    let [_, u2, u3, u4] = t.u;
    let p = ctx.pi();
    let na = u2.min(u4) as u32;
    let nd = u3 as u32;
    let ma = (u3 - u4).max(0) as u32;
    let lq = LatticeQuotient::per_axis(ctx, alloc::vec![na, nd], alloc::vec![ma, 0]);
    // b ∈ p^{-u3} Z_p ∩ (ad + p^{-u4} Z_p): nonempty iff ord(ad) >= -max(u3, u4).
    let need = (na + nd) as i64 - u3.max(u4);
    let pred = |x: &[i128]| {
        let (a, d) = (x[0], x[1]);
        match (vp_i128(a, p), vp_i128(d, p)) {
            (Some(va), Some(vd)) => va + vd >= need,
            _ => true,
        }
    };
    let outer = lq.measure_stable(pred)?;
    Ok(outer * ctx.pow(u3.min(u4)) * ctx.pow(u4))
}

/// `|det m2|^{-1} Delta_1(m2)^{-1}` for integral `m2`.
pub fn ip_formula(m2: &Mat2, ctx: &PrimeCtx) -> Result<Rat> {
    let vals: Vec<i64> = m2.iter().flatten().filter_map(|x| val_p(x, ctx)).collect();
    if vals.iter().any(|&v| v < 0) {
        return Err(Error::WrongShape("I_P needs an integral block".into()));
    }
    let vdet = val_p(&det2(m2), ctx).ok_or(Error::Singular)?;
    let vmin = *vals.iter().min().ok_or(Error::Singular)?;
    Ok(ctx.pow(vdet + vmin))
}

/// Measure of `{X = (y, x12; x21, y) : X m2 ∈ M2(Z_p)}`; `y` is the outer
/// variable and `x12`, `x21` are counted independently for each `y`.
pub fn ip_by_counting(m2: &Mat2, ctx: &PrimeCtx) -> Result<Rat> {
    if m2.iter().flatten().any(|x| val_p(x, ctx).map_or(false, |v| v < 0)) {
        return Err(Error::WrongShape("I_P needs an integral block".into()));
    }
    let vdet = val_p(&det2(m2), ctx).ok_or(Error::Singular)?;
    let n = vdet as u32;
    let coarse = ip_sum(m2, ctx, n, 0);
    let fine = ip_sum(m2, ctx, n, 1);
    if coarse != fine {
        return Err(Error::ResolutionUnstable { coarse: alloc::format!("{coarse}"), fine: alloc::format!("{fine}") });
    }
    Ok(coarse)
}

fn ip_sum(m2: &Mat2, ctx: &PrimeCtx, n: u32, m: u32) -> Rat {
    let p = ctx.pi();
    let pn = p.pow(n);
    let size = p.pow(n + m);
    let r = |x: &Rat| residue(x, ctx, n).expect("integral");
    let (m11, m12, m21, m22) = (r(&m2[0][0]), r(&m2[0][1]), r(&m2[1][0]), r(&m2[1][1]));
    let ok = |s: i128, t: i128| (s * m11 + t * m21).rem_euclid(pn) == 0 && (s * m12 + t * m22).rem_euclid(pn) == 0;
    // The congruences only see residues mod p^n; each axis has size / p^n lifts.
    let mut total: u128 = 0;
    for y in 0..pn {
        let c12 = (0..pn).filter(|&x| ok(y, x)).count() as u128;
        if c12 == 0 {
            continue;
        }
        let c21 = (0..pn).filter(|&x| ok(x, y)).count() as u128;
        total += c12 * c21;
    }
    let lifts = (size / pn) as u128;
    Rat::from_integer((total * lifts * lifts * lifts).into()) * ctx.pow(-3 * m as i64)
}

/// Number of `(a, b, c, d) >= 0` with `t_A^a t_B^b t_C^c t_D^d = t`.
pub fn factorization_count(t: &TorusElt) -> u64 {
    let [u1, u2, u3, u4] = t.u;
    (0..=u1.max(0))
        .filter(|&a| {
            let (b, c) = (u1 - a, u2 - a);
            let d = u3 - b;
            b >= 0 && c >= 0 && d >= 0 && c + d == u4
        })
        .count() as u64
}

/// All integral torus elements with `ord nu = n`.
pub fn integral_torus_of_degree(n: i64) -> impl Iterator<Item = TorusElt> {
    (0..=n).flat_map(move |u1| (0..=n).map(move |u2| TorusElt { u: [u1, u2, n - u2, n - u1] }))
}

/// Values substituted for the Satake variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatakeAssignment {
    Symbolic,
    Numeric { xa: Rat, xb: Rat, w: Rat },
}

impl SatakeAssignment {
    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        match self {
            Self::Symbolic => Ok(f.clone()),
            Self::Numeric { xa, xb, w } => Ok(LaurentPoly::constant(f.eval(xa, xb, w)?)),
        }
    }

    pub fn apply_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        let coeffs = s.coeffs().iter().map(|c| self.apply(c)).collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSeries::from_coeffs(s.order(), coeffs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusSumKind {
    /// Coefficient `val_p(pt) - |p| val_p(t)`.
    Weighted,
    /// Coefficient `val_p(pt)`.
    Plain,
}

/// `sum_{t integral, ord nu(t) <= K} alpha(t) c(t) Q^{ord nu(t)}`.
pub fn torus_sum(kind: TorusSumKind, assign: &SatakeAssignment, ctx: &PrimeCtx, k_max: usize) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::zero(k_max);
    let pinv = ctx.pow(-1);
    for n in 0..=k_max as i64 {
        let mut layer = LaurentPoly::zero();
        for t in integral_torus_of_degree(n) {
            let k = t.val();
            let c = match kind {
                TorusSumKind::Weighted => int(k + 1) - int(k) * &pinv,
                TorusSumKind::Plain => int(k + 1),
            };
            layer = &layer + &t.alpha().scale(&c);
        }
        s.add_term(n as usize, &layer);
    }
    assign.apply_series(&s)
}

/// `prod_{X in X_A, X_B, X_C, X_D} (1 - X Q)^{-1}` truncated at `K`.
pub fn spin_l_factor(assign: &SatakeAssignment, k_max: usize) -> Result<TruncatedSeries> {
    let vars = [LaurentPoly::x_a(), LaurentPoly::x_b(), LaurentPoly::x_c(), LaurentPoly::x_d()];
    let mut acc = TruncatedSeries::one(k_max);
    for v in &vars {
        acc = acc.mul(&series_geo_inverse(v, k_max)?)?;
    }
    assign.apply_series(&acc)
}

/// `1 - p^{-1} W Q^2`.
pub fn central_correction(assign: &SatakeAssignment, ctx: &PrimeCtx, k_max: usize) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::one(k_max);
    s.add_term(2, &LaurentPoly::w().scale(&-ctx.pow(-1)));
    assign.apply_series(&s)
}

/// Outcome of comparing both torus sums with the Spin factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacdonaldOutcome {
    pub weighted: TruncatedSeries,
    pub expected_weighted: TruncatedSeries,
    pub plain: TruncatedSeries,
    pub spin: TruncatedSeries,
    /// First failing degree and difference, weighted identity.
    pub weighted_mismatch: Option<(usize, LaurentPoly)>,
    /// First failing degree and difference, plain identity.
    pub plain_mismatch: Option<(usize, LaurentPoly)>,
}

impl MacdonaldOutcome {
    pub fn holds(&self) -> bool {
        self.weighted_mismatch.is_none() && self.plain_mismatch.is_none()
    }
}

pub fn verify_macdonald(assign: &SatakeAssignment, ctx: &PrimeCtx, k_max: usize) -> Result<MacdonaldOutcome> {
    let weighted = torus_sum(TorusSumKind::Weighted, assign, ctx, k_max)?;
    let plain = torus_sum(TorusSumKind::Plain, assign, ctx, k_max)?;
    let spin = spin_l_factor(assign, k_max)?;
    let expected_weighted = central_correction(assign, ctx, k_max)?.mul(&spin)?;
    let weighted_mismatch = weighted.first_mismatch(&expected_weighted)?;
    let plain_mismatch = plain.first_mismatch(&spin)?;
    Ok(MacdonaldOutcome { weighted, expected_weighted, plain, spin, weighted_mismatch, plain_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;
    use crate::gsp4::{delta_b, mat2, mul4, transpose4};
    use proptest::prelude::*;

    fn c(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    #[test]
    fn basis_adapter_round_trips() {
        let m: Mat4 = array::from_fn(|i| array::from_fn(|j| int((4 * i + j) as i64)));
        assert_eq!(from_standard(&to_standard(&m)), m);
        let t = TorusElt::new([2, 1, 1, 0]).unwrap();
        assert_eq!(to_standard(t.to_gsp(&c(3)).mat())[2][2], int(3));
    }

    #[test]
    fn n_is_symplectic_and_closed() {
        let j = j_appendix();
        let n1 = n_matrix(&rat(1, 3), &int(2), &rat(-5, 7), &int(4));
        let n2 = n_matrix(&int(-2), &rat(1, 2), &int(3), &rat(2, 9));
        for n in [&n1, &n2] {
            assert_eq!(mul4(&mul4(n, &j), &transpose4(n)), j);
        }
        let prod = mul4(&n1, &n2);
        let back = n_matrix(&prod[0][1], &prod[0][2], &prod[0][3], &prod[1][2]);
        assert_eq!(prod, back);
    }

    #[test]
    fn delta_b_prefactor_matches_gsp4() {
        let p = c(3);
        for n in 0..=4 {
            for t in integral_torus_of_degree(n) {
                let [u1, _, u3, u4] = t.u;
                let l = u1 - u3;
                let db = p.pow(-(3 * l + u3 - u4));
                assert_eq!(delta_b(&t.to_gsp(&p), &p).unwrap(), db);
            }
        }
    }

    #[test]
    fn ib_examples() {
        let p = c(3);
        assert_eq!(ib_formula(&TorusElt::identity(), &p).unwrap(), int(1));
        assert_eq!(ib_by_counting(&TorusElt::identity(), &p).unwrap(), int(1));
        assert_eq!(ib_formula(&T_A, &p).unwrap(), int(1));
        assert_eq!(ib_by_counting(&T_A, &p).unwrap(), int(1));
        assert_eq!(ib_formula(&TorusElt::scalar(1), &p).unwrap(), int(27) * (int(2) - rat(1, 3)));
        assert_eq!(ib_by_counting(&TorusElt::scalar(1), &p).unwrap(), int(45));
        // t_B = diag(p, 1, p, 1): both routes give p.
        assert_eq!(ib_formula(&T_B, &p).unwrap(), int(3));
        assert_eq!(ib_by_counting(&T_B, &p).unwrap(), int(3));
        let t = TorusElt::new([2, 1, 1, 0]).unwrap();
        assert_eq!(ib_by_counting(&t, &p).unwrap(), ib_formula(&t, &p).unwrap());
    }

    #[test]
    fn ib_counting_agrees_with_formula() {
        for (p, top) in [(2, 5), (3, 4), (5, 3)] {
            let p = c(p);
            for n in 0..=top {
                for t in integral_torus_of_degree(n) {
                    assert_eq!(ib_by_counting(&t, &p).unwrap(), ib_formula(&t, &p).unwrap(), "{t:?}");
                }
            }
        }
    }

    #[test]
    fn ip_examples() {
        let p = c(3);
        let one = mat2(int(1), int(0), int(0), int(1));
        assert_eq!(ip_formula(&one, &p).unwrap(), int(1));
        assert_eq!(ip_by_counting(&one, &p).unwrap(), int(1));
        let m = mat2(int(9), int(0), int(0), int(3));
        assert_eq!(ip_formula(&m, &p).unwrap(), int(81));
        assert_eq!(ip_by_counting(&m, &p).unwrap(), int(81));
        let m = mat2(int(3), int(1), int(0), int(1));
        assert_eq!(ip_formula(&m, &p).unwrap(), int(3));
        assert_eq!(ip_by_counting(&m, &p).unwrap(), int(3));
        let m = mat2(int(1), int(0), int(0), int(27));
        assert_eq!(ip_by_counting(&m, &p).unwrap(), int(27));
        assert!(ip_formula(&mat2(rat(1, 3), int(0), int(0), int(1)), &p).is_err());
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factorization_count(&TorusElt::identity()), 1);
        assert_eq!(factorization_count(&T_A), 1);
        assert_eq!(factorization_count(&TorusElt::scalar(1)), 2);
        assert_eq!(factorization_count(&TorusElt::scalar(2)), 3);
    }

    #[test]
    fn torus_sum_low_orders() {
        let p = c(3);
        for kind in [TorusSumKind::Weighted, TorusSumKind::Plain] {
            let s = torus_sum(kind, &SatakeAssignment::Symbolic, &p, 0).unwrap();
            assert_eq!(*s.coeff(0), LaurentPoly::one());
        }
        let s = torus_sum(TorusSumKind::Plain, &SatakeAssignment::Symbolic, &p, 1).unwrap();
        let want = &(&LaurentPoly::x_a() + &LaurentPoly::x_b()) + &(&LaurentPoly::x_c() + &LaurentPoly::x_d());
        assert_eq!(*s.coeff(1), want);
    }

    #[test]
    fn spin_factor_examples() {
        let ones = SatakeAssignment::Numeric { xa: int(1), xb: int(1), w: int(1) };
        let s = spin_l_factor(&ones, 2).unwrap();
        assert_eq!(s.coeffs().iter().map(|c| c.coeff(&[0, 0, 0])).collect::<Vec<_>>(), [int(1), int(4), int(10)]);
        let s = spin_l_factor(&SatakeAssignment::Symbolic, 6).unwrap();
        assert_eq!(s.map(|c| c.swap_ab()), s);
    }

    #[test]
    fn macdonald_symbolic() {
        for p in [2, 3] {
            let out = verify_macdonald(&SatakeAssignment::Symbolic, &c(p), 6).unwrap();
            assert!(out.holds(), "{:?} {:?}", out.weighted_mismatch, out.plain_mismatch);
        }
        let num = SatakeAssignment::Numeric { xa: int(2), xb: rat(1, 2), w: int(3) };
        assert!(verify_macdonald(&num, &c(5), 8).unwrap().holds());
    }

    #[test]
    fn macdonald_detects_a_wrong_correction() {
        // With |p| replaced by 1 the weighted identity must fail at Q^2.
        let p = c(3);
        let s = torus_sum(TorusSumKind::Weighted, &SatakeAssignment::Symbolic, &p, 3).unwrap();
        let mut wrong = TruncatedSeries::one(3);
        wrong.add_term(2, &LaurentPoly::w().scale(&int(-1)));
        let rhs = wrong.mul(&spin_l_factor(&SatakeAssignment::Symbolic, 3).unwrap()).unwrap();
        assert_eq!(s.first_mismatch(&rhs).unwrap().map(|m| m.0), Some(2));
    }

    proptest! {
        #[test]
        fn alpha_is_independent_of_the_factorization(a in 0i64..6, b in 0i64..6, cc in 0i64..6, d in 0i64..6, shift in 1i64..4) {
            let t = [T_A.u, T_B.u, T_C.u, T_D.u];
            let u: [i64; 4] = array::from_fn(|i| a * t[0][i] + b * t[1][i] + cc * t[2][i] + d * t[3][i]);
            let direct = LaurentPoly::monomial(Rat::one(), [a - d, b - cc, cc + d]);
            prop_assert_eq!(TorusElt { u }.alpha(), direct.clone());
            // (a, b, c, d) -> (a + s, b - s, c - s, d + s) solves the same system.
            let alt = LaurentPoly::monomial(Rat::one(), [(a + shift) - (d + shift), (b - shift) - (cc - shift), (cc - shift) + (d + shift)]);
            prop_assert_eq!(alt, direct);
        }

        #[test]
        fn factorization_matches_valuation(u1 in 0i64..7, u2 in 0i64..7, n in 0i64..13) {
            prop_assume!(u1 <= n && u2 <= n);
            let t = TorusElt { u: [u1, u2, n - u2, n - u1] };
            prop_assert_eq!(factorization_count(&t) as i64, t.val() + 1);
        }

        #[test]
        fn ip_is_unimodular_invariant(a in 0u32..3, b in 0u32..3, k in proptest::array::uniform4(-3i64..4), kk in proptest::array::uniform4(-3i64..4)) {
            let p = c(3);
            let (a, b) = (a.max(b), a.min(b));
            let km = mat2(int(k[0]), int(k[1]), int(k[2]), int(k[3]));
            let kpm = mat2(int(kk[0]), int(kk[1]), int(kk[2]), int(kk[3]));
            prop_assume!(val_p(&det2(&km), &p) == Some(0) && val_p(&det2(&kpm), &p) == Some(0));
            let d = mat2(p.pow(a as i64), int(0), int(0), p.pow(b as i64));
            let m = crate::gsp4::mul2(&crate::gsp4::mul2(&km, &d), &kpm);
            prop_assert_eq!(ip_by_counting(&m, &p).unwrap(), ip_formula(&m, &p).unwrap());
            prop_assert_eq!(ip_formula(&m, &p).unwrap(), p.pow((2 * b + a) as i64));
        }
    }
}
