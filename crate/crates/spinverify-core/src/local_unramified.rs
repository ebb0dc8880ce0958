//! Local objects at an unramified finite place: the weight `Delta_0`, the
//! oscillatory integral `alpha_{chi,p}` on the Siegel Levi, the unipotent
//! character sum, and the comparison between Levi cosets and torus cosets
//! of the embedded `GL2*(L)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{int, rat, Rat};
use crate::gsp4::{
    act_v5, det2, embed_gl2l, inv2, levi, make_v_d, mat2, mul2, t_matrix, transpose2, Branch, GSpElement, LElt,
    Mat2, QuadExt, V5Vector,
};
use crate::padic::{is_integral, psi_int, residue, val_p, LatticeQuotient, PrimeCtx};

/// Sign of the linear term in the `1 mod 4` congruence
/// `b^2 ∓ b ≡ (D-1)/4 (mod p^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Minus,
    Plus,
}

/// The normal form `m_b = (p^alpha, b; 0, 1)`, `m_t = lambda det(m_b) tm_b^{-1}`,
/// `lambda = p^lambda_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeviCoset {
    pub alpha_exp: u32,
    pub b: i128,
    pub lambda_exp: i64,
}

impl LeviCoset {
    pub fn new(alpha_exp: u32, b: i128, lambda_exp: i64, ctx: &PrimeCtx) -> Self {
        let b = b.rem_euclid(ctx.pi().pow(alpha_exp));
        Self { alpha_exp, b, lambda_exp }
    }

    pub fn m_b(&self, ctx: &PrimeCtx) -> Mat2 {
        mat2(ctx.pow(self.alpha_exp as i64), Rat::from_integer(self.b.into()), Rat::zero(), Rat::one())
    }

    pub fn m_t(&self, ctx: &PrimeCtx) -> Mat2 {
        let l = ctx.pow(self.lambda_exp);
        mat2(l.clone(), Rat::zero(), -&l * Rat::from_integer(self.b.into()), l * ctx.pow(self.alpha_exp as i64))
    }

    pub fn element(&self, ctx: &PrimeCtx) -> GSpElement {
        levi(&self.m_t(ctx), &self.m_b(ctx)).expect("normal form is symplectic")
    }
}

/// Levi element with bottom block `m_b` and `nu = lambda det(m_b)`.
pub fn levi_from(mb: &Mat2, lambda: &Rat) -> Result<GSpElement> {
    let d = det2(mb);
    let s = lambda * &d;
    let t = transpose2(&inv2(mb)?);
    let mt = mat2(&t[0][0] * &s, &t[0][1] * &s, &t[1][0] * &s, &t[1][1] * &s);
    levi(&mt, mb)
}

/// Right-multiply by `GL2(Z_p)` to reach `(m11, m12; 0, m22)`.
pub fn hermite_2x2(m: &Mat2, ctx: &PrimeCtx) -> Result<Mat2> {
    let mut m = m.clone();
    let v = |x: &Rat| val_p(x, ctx).unwrap_or(i64::MAX);
    if m[1][0].is_zero() && m[1][1].is_zero() {
        return Err(Error::Singular);
    }
    if v(&m[1][0]) <= v(&m[1][1]) {
        for row in m.iter_mut() {
            row.swap(0, 1);
        }
    }
    let f = &m[1][0] / &m[1][1];
    for row in m.iter_mut() {
        row[0] = &row[0] - &f * &row[1];
    }
    debug_assert!(m[1][0].is_zero());
    Ok(m)
}

fn ge(x: &Rat, bound: i64, ctx: &PrimeCtx) -> bool {
    val_p(x, ctx).map_or(true, |v| v >= bound)
}

/// `Delta_0'(m)` on the column Hermite form of `m`.
pub fn delta0_prime(m: &Mat2, ext: &QuadExt, ctx: &PrimeCtx) -> Result<bool> {
    if det2(m).is_zero() {
        return Err(Error::Singular);
    }
    let h = hermite_2x2(m, ctx)?;
    let x = &h[0][0] / &h[1][1];
    let y = &h[0][1] / &h[1][1];
    let vx = val_p(&x, ctx).expect("nonzero");
    if vx < 0 {
        return Ok(false);
    }
    Ok(match ext.branch() {
        Branch::NotOneMod4 => is_integral(&y, ctx) && ge(&(&y * &y - int(ext.d())), vx, ctx),
        Branch::OneMod4 => {
            is_integral(&(&y * int(2)), ctx) && ge(&(&y * &y - &y - ext.c()), vx, ctx)
        }
    })
}

/// `1(|r| <= 1) |r|^{1/2} Delta_0'(m_b)` with `r = det m_t / det m_b`.
pub fn delta0(m: &GSpElement, ext: &QuadExt, ctx: &PrimeCtx) -> Result<Rat> {
    let (mt, mb) = m.levi_blocks()?;
    let r = det2(&mt) / det2(&mb);
    let v = val_p(&r, ctx).ok_or(Error::Singular)?;
    if v % 2 != 0 {
        return Err(Error::HalfPower(format!("|{r}|^(1/2)")));
    }
    if v < 0 || !delta0_prime(&mb, ext, ctx)? {
        return Ok(Rat::zero());
    }
    Ok(ctx.pow(-v / 2))
}

/// Coordinates in which `V5(Z_p)` is the standard lattice: `B2` is
/// doubled on the `1 mod 4` branch.
fn lattice_coords(v: &V5Vector, ext: &QuadExt) -> [Rat; 5] {
    let mut c = v.c.clone();
    if ext.branch() == Branch::OneMod4 {
        c[2] = &c[2] * int(2);
    }
    c
}

/// `int_{Q_p} psi(z) 1(v_D n(z) m ∈ V5(Z_p)) dz` as a finite character sum.
pub fn alpha_chi_p(m: &GSpElement, ext: &QuadExt, ctx: &PrimeCtx) -> Result<Complex64> {
    // v_D n24(z) = v_D + z f2^f1 and f2^f1 = -F.
    let base = lattice_coords(&act_v5(&make_v_d(ext), m), ext);
    let dir = lattice_coords(&act_v5(&V5Vector::ints([0, 0, 0, 0, -1]), m), ext);
    let mut axes = Vec::new();
    for (b, d) in base.iter().zip(&dir) {
        if d.is_zero() {
            if !is_integral(b, ctx) {
                return Ok(Complex64::zero());
            }
        } else {
            let center = -(b / d);
            axes.push((center, val_p(d, ctx).expect("nonzero")));
        }
    }
    let v_min = axes.iter().map(|a| a.1).min().expect("m is invertible");
    let c_min = axes.iter().filter_map(|a| val_p(&a.0, ctx)).min().unwrap_or(0);
    let upper = (0.max(-v_min) + 1) as u32;
    let lower = (0.max(v_min).max(-c_min) + 1) as u32;
    let p = ctx.pi();
    let pn = ctx.pow(lower as i64);
    // z = a/p^N lies in center + p^{-v} Z_p iff a ≡ p^N center mod p^{N-v}.
    let tests: Vec<(i128, i128)> = axes
        .iter()
        .map(|(c, v)| {
            let r = residue(&(c * &pn), ctx, lower + upper).expect("N covers every center");
            let k = (lower as i64 - v).max(0) as u32;
            (r, p.pow(k))
        })
        .collect();
    let lq = LatticeQuotient::new(ctx, 1, lower, upper);
    let f = |a: &[i128]| {
        if tests.iter().all(|(r, q)| (a[0] - r).rem_euclid(*q) == 0) {
            psi_int(a[0], lower, p)
        } else {
            Complex64::zero()
        }
    };
    lq.char_sum_stable(f)
}

/// `int_U chi(u) 1(u g ∈ M4(Z_p)) du` for `g` in the Siegel Levi.
pub fn unipotent_integral(g: &GSpElement, ext: &QuadExt, ctx: &PrimeCtx) -> Result<Complex64> {
    let (mt, mb) = g.levi_blocks()?;
    if !mt.iter().flatten().chain(mb.iter().flatten()).all(|x| is_integral(x, ctx)) {
        return Ok(Complex64::zero());
    }
    let inv = inv2(&mb)?;
    let worst = inv.iter().flatten().filter_map(|x| val_p(x, ctx)).min().unwrap_or(0);
    let n = (-worst).max(0) as u32;
    let lq = LatticeQuotient::new(ctx, 1, n, 0);
    let coarse = unipotent_sum(&mb, ext, ctx, &lq)?;
    let fine = unipotent_sum(&mb, ext, ctx, &lq.refined())?;
    if (coarse - fine).norm() > 1e-9 * coarse.norm().max(1.0) {
        return Err(Error::ResolutionUnstable { coarse: format!("{coarse}"), fine: format!("{fine}") });
    }
    Ok(coarse)
}

/// Fubini over `x12`: the rows `(x11, x12) m_b` and `(x12, x22) m_b` are
/// independent once `x12` is fixed.
fn unipotent_sum(mb: &Mat2, ext: &QuadExt, ctx: &PrimeCtx, lq: &LatticeQuotient) -> Result<Complex64> {
    let n = lq.lower()[0];
    let mm = lq.upper()[0];
    let p = ctx.pi();
    let size = p.pow(n + mm);
    let pn = p.pow(n);
    let r = |x: &Rat| residue(x, ctx, n).expect("integral m_b");
    let (m11, m12, m21, m22) = (r(&mb[0][0]), r(&mb[0][1]), r(&mb[1][0]), r(&mb[1][1]));
    let (c11, c12, c22): (i128, i128, i128) = match ext.branch() {
        Branch::NotOneMod4 => (-(ext.d() as i128), 0, 1),
        Branch::OneMod4 => ((1 - ext.d() as i128) / 4, 1, 1),
    };
    let ok = |s: i128, t: i128| (s * m11 + t * m21).rem_euclid(pn) == 0 && (s * m12 + t * m22).rem_euclid(pn) == 0;
    // The constraint and psi(c x / p^n) depend on each coordinate only mod
    // p^n, so every axis contributes p^mm identical lifts.
    let rows: Vec<Complex64> = (0..pn)
        .map(|x12| {
            let s1: Complex64 = (0..pn).filter(|&x11| ok(x11, x12)).map(|x11| psi_int(c11 * x11, n, p)).sum();
            if s1.norm() < 1e-13 {
                return Complex64::zero();
            }
            let s2: Complex64 = (0..pn).filter(|&x22| ok(x12, x22)).map(|x22| psi_int(c22 * x22, n, p)).sum();
            s1 * s2
        })
        .collect();
    let total: Complex64 = (0..pn).map(|x12| psi_int(c12 * x12, n, p) * rows[x12 as usize]).sum();
    let lifts = (size / pn) as f64;
    let total = total * lifts * lifts * lifts;
    let cell = crate::exact_algebra::rat_to_f64(&ctx.pow(-3 * mm as i64));
    Ok(total * cell)
}

/// `((y^2 - D)/x, y; y, x)` or `((y^2 + y + (1-D)/4)/x, 1/2 + y; 1/2 + y, x)`.
pub fn y_matrix(x: &Rat, y: &Rat, ext: &QuadExt) -> Result<Mat2> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(match ext.branch() {
        Branch::NotOneMod4 => mat2((y * y - int(ext.d())) / x, y.clone(), y.clone(), x.clone()),
        Branch::OneMod4 => {
            let off = y + rat(1, 2);
            mat2((y * y + y - ext.c()) / x, off.clone(), off, x.clone())
        }
    })
}

/// Diagonal in `Z_p`, off-diagonal in `(1/2) Z_p`.
pub fn is_half_integral(y: &Mat2, ctx: &PrimeCtx) -> bool {
    y[0][1] == y[1][0]
        && is_integral(&y[0][0], ctx)
        && is_integral(&y[1][1], ctx)
        && is_integral(&(&y[0][1] * int(2)), ctx)
}

/// `lambda^{-1} m_b^{-1} X m_t` with `X = T`.
pub fn y_from_levi(m: &GSpElement, ext: &QuadExt) -> Result<Mat2> {
    let (mt, mb) = m.levi_blocks()?;
    let lambda = m.nu() / det2(&mb);
    let y = mul2(&mul2(&inv2(&mb)?, &t_matrix(ext)), &mt);
    let s = lambda.recip();
    Ok(mat2(&y[0][0] * &s, &y[0][1] * &s, &y[1][0] * &s, &y[1][1] * &s))
}

fn satisfies(b: i128, alpha: u32, ext: &QuadExt, ctx: &PrimeCtx, o: Orientation) -> bool {
    let pa = ctx.pi().pow(alpha);
    let lin = match o {
        Orientation::Minus => -b,
        Orientation::Plus => b,
    };
    let lhs = match ext.branch() {
        Branch::NotOneMod4 => b * b - ext.d() as i128,
        Branch::OneMod4 => b * b + lin - ((ext.d() - 1) / 4) as i128,
    };
    lhs.rem_euclid(pa) == 0
}

/// All cosets with `alpha + lambda_exp <= val_bound` whose `b` satisfies
/// the congruence in the given orientation.
pub fn enumerate_levi_cosets(ext: &QuadExt, ctx: &PrimeCtx, val_bound: u32, o: Orientation) -> Vec<LeviCoset> {
    let mut out = Vec::new();
    for alpha in 0..=val_bound {
        for b in 0..ctx.pi().pow(alpha) {
            if satisfies(b, alpha, ext, ctx, o) {
                for l in 0..=(val_bound - alpha) as i64 {
                    out.push(LeviCoset { alpha_exp: alpha, b, lambda_exp: l });
                }
            }
        }
    }
    out.sort();
    out
}

/// How `p` decomposes in `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn splitting(ext: &QuadExt, ctx: &PrimeCtx) -> Splitting {
    let p = ctx.p() as i64;
    let d = ext.d();
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        };
    }
    if d % p == 0 {
        return Splitting::Ramified;
    }
    let pi = p as i128;
    let mut r: i128 = 1;
    let mut b = (d as i128).rem_euclid(pi);
    let mut e = (pi - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % pi;
        }
        b = b * b % pi;
        e >>= 1;
    }
    if r == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    }
}

/// An integral element of `L` of norm `p` times a unit.
fn norm_p_element(ext: &QuadExt, ctx: &PrimeCtx) -> LElt {
    let p = ctx.p() as i64;
    for e in 0..p * p + 4 {
        for h in [1, 2, -1] {
            let x = LElt::ints(e, h);
            if val_p(&ext.norm(&x), ctx) == Some(1) {
                return x;
            }
        }
    }
    unreachable!("split or ramified primes admit an element of norm valuation one")
}

/// A torus element `diag(u1, u4)` of `GL2*(L)`, with its Levi image.
#[derive(Debug, Clone)]
pub struct TorusWitness {
    pub u1: LElt,
    pub u4: LElt,
    pub element: GSpElement,
    pub coset: LeviCoset,
}

/// Torus cosets `T*_L(Q_p)/T*_L(Z_p)` on which the torus integrand is
/// nonzero, reduced to Levi normal form. Fails if an image does not reduce
/// or two torus cosets share an image.
pub fn enumerate_torus_l_cosets(ext: &QuadExt, ctx: &PrimeCtx, val_bound: u32) -> Result<Vec<TorusWitness>> {
    let span = 2 * val_bound as i64 + 2;
    let p = LElt::rational(int(ctx.p() as i64));
    let gens: Vec<LElt> = match splitting(ext, ctx) {
        Splitting::Split => {
            let pi = norm_p_element(ext, ctx);
            let pib = ext.conj(&pi);
            alloc::vec![pi, pib]
        }
        Splitting::Inert => alloc::vec![p.clone()],
        Splitting::Ramified => alloc::vec![norm_p_element(ext, ctx)],
    };
    let pow = |x: &LElt, k: i64| (0..k).fold(LElt::one(), |acc, _| ext.mul(&acc, x));
    let mut u1s = Vec::new();
    match gens.len() {
        1 => {
            for a in 0..=span {
                u1s.push(pow(&gens[0], a));
            }
        }
        _ => {
            for a in 0..=span {
                for b in 0..=span {
                    u1s.push(ext.mul(&pow(&gens[0], a), &pow(&gens[1], b)));
                }
            }
        }
    }
    let mut out: Vec<TorusWitness> = Vec::new();
    let mut seen = BTreeSet::new();
    for u1 in &u1s {
        for m in -span..=span {
            let u4 = ext.mul(&ext.conj(u1), &LElt::rational(ctx.pow(m)));
            let u = [[u1.clone(), LElt::zero()], [LElt::zero(), u4.clone()]];
            let g = embed_gl2l(&u, ext)?;
            let (mt, mb) = g.levi_blocks()?;
            let entries = || mt.iter().flatten().chain(mb.iter().flatten());
            if !entries().all(|x| is_integral(x, ctx)) {
                continue;
            }
            if entries().filter_map(|x| val_p(x, ctx)).min() != Some(0) {
                continue;
            }
            let lambda = g.nu() / det2(&mb);
            let lexp = val_p(&lambda, ctx).expect("nonzero");
            if lexp < 0 {
                continue;
            }
            let h = hermite_2x2(&mb, ctx)?;
            let v22 = val_p(&h[1][1], ctx).expect("nonzero");
            let v11 = val_p(&h[0][0], ctx).expect("nonzero");
            if v22 != 0 || v11 < 0 {
                return Err(Error::ReductionFailure(format!("u1 = {u1:?}, u4 = {u4:?}, m_b ~ {h:?}")));
            }
            // Scale the columns by units so that m_b = (p^alpha, b; 0, 1).
            let alpha = v11 as u32;
            let b = residue(&(&h[0][1] / &h[1][1]), ctx, alpha)
                .ok_or_else(|| Error::ReductionFailure(format!("non-integral b in {h:?}")))?;
            let coset = LeviCoset { alpha_exp: alpha, b, lambda_exp: lexp };
            if alpha as i64 + lexp > val_bound as i64 {
                continue;
            }
            if !seen.insert(coset) {
                return Err(Error::ReductionFailure(format!("two torus cosets map to {coset:?}")));
            }
            out.push(TorusWitness { u1: u1.clone(), u4, element: g, coset });
        }
    }
    out.sort_by(|a, b| a.coset.cmp(&b.coset));
    Ok(out)
}

/// `delta_P^{-1}(m) |det m_t / det m_b|^{1/2}`.
pub fn levi_integrand_weight(m: &GSpElement, ctx: &PrimeCtx) -> Result<Rat> {
    let (mt, mb) = m.levi_blocks()?;
    let r = det2(&mt) / det2(&mb);
    let v = val_p(&r, ctx).ok_or(Error::Singular)?;
    if v % 2 != 0 {
        return Err(Error::HalfPower(format!("|{r}|^(1/2)")));
    }
    let dp = crate::gsp4::delta_p(m, ctx)?;
    Ok(ctx.pow(-v / 2) / dp)
}

/// `delta_{B_L}^{-1}(diag(u1, u4)) = |N(u1)/N(u4)|_p^{-1}`.
pub fn torus_integrand_weight(u1: &LElt, u4: &LElt, ext: &QuadExt, ctx: &PrimeCtx) -> Rat {
    let r = ext.norm(u1) / ext.norm(u4);
    ctx.abs(&r).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::int;
    use crate::gsp4::{diag4, identity2, make_gsp};

    fn c(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }
    fn e(d: i64) -> QuadExt {
        QuadExt::new(d).unwrap()
    }

    #[test]
    fn delta0_prime_examples() {
        assert!(delta0_prime(&identity2(), &e(-1), &c(5)).unwrap());
        let m = mat2(int(5), int(2), int(0), int(1));
        assert!(delta0_prime(&m, &e(-1), &c(5)).unwrap());
        for b in 0..5 {
            let m = mat2(int(5), int(b), int(0), int(1));
            assert!(!delta0_prime(&m, &e(2), &c(5)).unwrap());
        }
    }

    #[test]
    fn delta0_examples() {
        let p = c(3);
        assert_eq!(delta0(&GSpElement::identity(), &e(-1), &p).unwrap(), int(1));
        let g = make_gsp(diag4([int(3), int(3), int(1), int(1)])).unwrap();
        assert_eq!(delta0(&g, &e(-1), &p).unwrap(), rat(1, 3));
        let g = levi_from(&mat2(int(3), int(0), int(0), int(1)), &int(1)).unwrap();
        assert_eq!(delta0(&g, &e(-1), &p).unwrap(), int(0));
    }

    #[test]
    fn alpha_chi_examples() {
        let p = c(3);
        let one = alpha_chi_p(&GSpElement::identity(), &e(-1), &p).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        let g = make_gsp(diag4([int(3), int(3), int(1), int(1)])).unwrap();
        assert!((alpha_chi_p(&g, &e(-1), &p).unwrap() - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-9);
        let g = levi_from(&mat2(int(3), int(0), int(0), int(1)), &int(1)).unwrap();
        assert!(alpha_chi_p(&g, &e(-1), &p).unwrap().norm() < 1e-9);
    }

    #[test]
    fn unipotent_examples() {
        let p = c(5);
        let one = unipotent_integral(&GSpElement::identity(), &e(-1), &p).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        let g = LeviCoset::new(1, 2, 0, &p).element(&p);
        assert!((unipotent_integral(&g, &e(-1), &p).unwrap() - Complex64::new(5.0, 0.0)).norm() < 1e-9);
        let g = levi_from(&mat2(int(1), int(0), int(0), int(5)), &int(1)).unwrap();
        assert!(unipotent_integral(&g, &e(-1), &p).unwrap().norm() < 1e-9);
    }

    #[test]
    fn y_examples() {
        let p = c(3);
        let y = y_matrix(&int(1), &int(0), &e(-1)).unwrap();
        assert_eq!(y, identity2());
        assert!(is_half_integral(&y, &p));
        let y = y_matrix(&int(1), &int(0), &e(5)).unwrap();
        assert_eq!(y, mat2(int(-1), rat(1, 2), rat(1, 2), int(1)));
        assert!(is_half_integral(&y, &p));
        let y = y_matrix(&int(9), &int(3), &e(-1)).unwrap();
        let third = mat2(&y[0][0] / int(3), &y[0][1] / int(3), &y[1][0] / int(3), &y[1][1] / int(3));
        assert!(!is_half_integral(&third, &p));
        assert_eq!(y_matrix(&int(0), &int(1), &e(-1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn y_matches_levi_conjugate() {
        let p = c(5);
        for d in [-1, 5] {
            for k in enumerate_levi_cosets(&e(d), &p, 3, Orientation::Minus) {
                let y = y_matrix(&p.pow(k.alpha_exp as i64), &-Rat::from_integer(k.b.into()), &e(d)).unwrap();
                assert_eq!(y_from_levi(&k.element(&p), &e(d)).unwrap(), y);
            }
        }
    }

    #[test]
    fn levi_enumeration_examples() {
        let p5 = c(5);
        let got = enumerate_levi_cosets(&e(-1), &p5, 1, Orientation::Minus);
        let want = [
            LeviCoset { alpha_exp: 0, b: 0, lambda_exp: 0 },
            LeviCoset { alpha_exp: 0, b: 0, lambda_exp: 1 },
            LeviCoset { alpha_exp: 1, b: 2, lambda_exp: 0 },
            LeviCoset { alpha_exp: 1, b: 3, lambda_exp: 0 },
        ];
        assert_eq!(got, want);
        assert_eq!(enumerate_levi_cosets(&e(-1), &p5, 0, Orientation::Minus).len(), 1);
        assert_eq!(enumerate_levi_cosets(&e(-1), &c(3), 1, Orientation::Minus).len(), 2);
    }

    #[test]
    fn orientations_differ_at_two() {
        let p = c(2);
        let minus: Vec<i128> = enumerate_levi_cosets(&e(-7), &p, 2, Orientation::Minus)
            .iter()
            .filter(|k| k.alpha_exp == 2)
            .map(|k| k.b)
            .collect();
        let plus: Vec<i128> = enumerate_levi_cosets(&e(-7), &p, 2, Orientation::Plus)
            .iter()
            .filter(|k| k.alpha_exp == 2)
            .map(|k| k.b)
            .collect();
        assert_eq!(minus, [2, 3]);
        assert_eq!(plus, [1, 2]);
    }

    #[test]
    fn torus_examples() {
        let p5 = c(5);
        let ts = enumerate_torus_l_cosets(&e(-1), &p5, 0).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].coset, LeviCoset { alpha_exp: 0, b: 0, lambda_exp: 0 });

        let ts = enumerate_torus_l_cosets(&e(-1), &p5, 1).unwrap();
        let alpha_one: BTreeSet<i128> = ts.iter().filter(|t| t.coset.alpha_exp == 1).map(|t| t.coset.b).collect();
        assert_eq!(alpha_one, [2, 3].into_iter().collect());

        let p3 = c(3);
        let ts = enumerate_torus_l_cosets(&e(3), &p3, 1).unwrap();
        assert!(ts.iter().any(|t| t.coset == LeviCoset { alpha_exp: 1, b: 0, lambda_exp: 0 }));
    }

    #[test]
    fn splitting_types() {
        assert_eq!(splitting(&e(-1), &c(5)), Splitting::Split);
        assert_eq!(splitting(&e(-1), &c(3)), Splitting::Inert);
        assert_eq!(splitting(&e(3), &c(3)), Splitting::Ramified);
        assert_eq!(splitting(&e(-7), &c(2)), Splitting::Split);
        assert_eq!(splitting(&e(5), &c(2)), Splitting::Inert);
        assert_eq!(splitting(&e(-1), &c(2)), Splitting::Ramified);
    }

    #[test]
    fn hermite_keeps_the_coset() {
        let p = c(3);
        let m = mat2(int(2), int(7), int(9), int(6));
        let h = hermite_2x2(&m, &p).unwrap();
        assert!(h[1][0].is_zero());
        let k = mul2(&inv2(&m).unwrap(), &h);
        assert!(k.iter().flatten().all(|x| is_integral(x, &p)));
        assert_eq!(val_p(&det2(&k), &p), Some(0));
    }
}
