//! GSp4 over the rationals, its five-dimensional orthogonal
//! representation, and the embedding of GL2 over a quadratic algebra.
//!
//! Matrices act on row vectors in the ordered basis `(e1, e2, f1, f2)`
//! with `<e_i, f_j> = delta_ij`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::array;
use core::fmt;
use core::ops::{Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Num, One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{checked_inv, int, rat, Rat};
use crate::padic::{psi_p, residue, val_p, PrimeCtx};

pub type Mat2 = [[Rat; 2]; 2];
pub type Mat4 = [[Rat; 4]; 4];

pub fn identity4() -> Mat4 {
    array::from_fn(|i| array::from_fn(|j| if i == j { Rat::one() } else { Rat::zero() }))
}

pub fn diag4(d: [Rat; 4]) -> Mat4 {
    let mut m = zero4();
    for (i, x) in d.into_iter().enumerate() {
        m[i][i] = x;
    }
    m
}

pub fn zero4() -> Mat4 {
    array::from_fn(|_| array::from_fn(|_| Rat::zero()))
}

pub fn mat4_from_i64(rows: [[i64; 4]; 4]) -> Mat4 {
    array::from_fn(|i| array::from_fn(|j| int(rows[i][j])))
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    array::from_fn(|i| {
        array::from_fn(|j| (0..4).fold(Rat::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
    })
}

pub fn transpose4(a: &Mat4) -> Mat4 {
    array::from_fn(|i| array::from_fn(|j| a[j][i].clone()))
}

/// Gauss-Jordan inverse.
pub fn inv4(a: &Mat4) -> Result<Mat4> {
    let mut m = a.clone();
    let mut inv = identity4();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = checked_inv(&m[col][col])?;
        for j in 0..4 {
            m[col][j] = &m[col][j] * &s;
            inv[col][j] = &inv[col][j] * &s;
        }
        for r in 0..4 {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..4 {
                    m[r][j] = &m[r][j] - &f * &m[col][j];
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

pub fn mat2(a: Rat, b: Rat, c: Rat, d: Rat) -> Mat2 {
    [[a, b], [c, d]]
}

pub fn identity2() -> Mat2 {
    mat2(Rat::one(), Rat::zero(), Rat::zero(), Rat::one())
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    array::from_fn(|i| array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]))
}

pub fn det2(a: &Mat2) -> Rat {
    &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
}

pub fn transpose2(a: &Mat2) -> Mat2 {
    mat2(a[0][0].clone(), a[1][0].clone(), a[0][1].clone(), a[1][1].clone())
}

pub fn inv2(a: &Mat2) -> Result<Mat2> {
    let d = checked_inv(&det2(a))?;
    Ok(mat2(&a[1][1] * &d, -&a[0][1] * &d, -&a[1][0] * &d, &a[0][0] * &d))
}

/// `J4` in the basis `(e1, e2, f1, f2)`.
pub fn j4() -> Mat4 {
    mat4_from_i64([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
}

/// A validated symplectic similitude.
#[derive(Clone, PartialEq, Eq)]
pub struct GSpElement {
    mat: Mat4,
    nu: Rat,
}

impl fmt::Debug for GSpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GSp(nu={}; ", self.nu)?;
        for (i, row) in self.mat.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{} {} {} {}", row[0], row[1], row[2], row[3])?;
        }
        write!(f, ")")
    }
}

/// Check `g J tg = nu J` and return the element.
pub fn make_gsp(mat: Mat4) -> Result<GSpElement> {
    let gj = mul4(&mul4(&mat, &j4()), &transpose4(&mat));
    let nu = gj[0][2].clone();
    if nu.is_zero() {
        return Err(Error::Singular);
    }
    let j = j4();
    for r in 0..4 {
        for c in 0..4 {
            if gj[r][c] != &nu * &j[r][c] {
                return Err(Error::NotSymplectic { row: r, col: c, value: format!("{}", gj[r][c]) });
            }
        }
    }
    Ok(GSpElement { mat, nu })
}

impl GSpElement {
    pub fn identity() -> Self {
        Self { mat: identity4(), nu: Rat::one() }
    }

    pub fn mat(&self) -> &Mat4 {
        &self.mat
    }

    pub fn nu(&self) -> &Rat {
        &self.nu
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.mat[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { mat: mul4(&self.mat, &other.mat), nu: &self.nu * &other.nu }
    }

    pub fn inverse(&self) -> Self {
        // g^{-1} = nu^{-1} J^{-1} tg J.
        let j = j4();
        let jinv = transpose4(&j);
        let s = self.nu.recip();
        let m = mul4(&mul4(&jinv, &transpose4(&self.mat)), &j);
        Self { mat: array::from_fn(|i| array::from_fn(|k| &m[i][k] * &s)), nu: s }
    }

    /// Top-left and bottom-right blocks, if `g` lies in the Siegel Levi.
    pub fn levi_blocks(&self) -> Result<(Mat2, Mat2)> {
        for i in 0..2 {
            for j in 2..4 {
                if !self.mat[i][j].is_zero() || !self.mat[j][i].is_zero() {
                    return Err(Error::WrongShape("not in the Siegel Levi".into()));
                }
            }
        }
        let b = |i: usize, j: usize| mat2(
            self.mat[i][j].clone(),
            self.mat[i][j + 1].clone(),
            self.mat[i + 1][j].clone(),
            self.mat[i + 1][j + 1].clone(),
        );
        Ok((b(0, 0), b(2, 2)))
    }

    /// The symmetric block `X` of `u(X)`, if `g` is of that shape.
    pub fn unipotent_block(&self) -> Result<Mat2> {
        let one = identity2();
        for i in 0..2 {
            for j in 0..2 {
                if self.mat[i][j] != one[i][j]
                    || self.mat[i + 2][j + 2] != one[i][j]
                    || !self.mat[i + 2][j].is_zero()
                {
                    return Err(Error::WrongShape("not in the Siegel unipotent radical".into()));
                }
            }
        }
        Ok(mat2(
            self.mat[0][2].clone(),
            self.mat[0][3].clone(),
            self.mat[1][2].clone(),
            self.mat[1][3].clone(),
        ))
    }
}

/// `diag(m_t, m_b)`, validated.
pub fn levi(mt: &Mat2, mb: &Mat2) -> Result<GSpElement> {
    let mut m = zero4();
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = mt[i][j].clone();
            m[i + 2][j + 2] = mb[i][j].clone();
        }
    }
    make_gsp(m)
}

/// `u(X) = (1 X; 0 1)` for symmetric `X`.
pub fn unipotent(x: &Mat2) -> Result<GSpElement> {
    let mut m = identity4();
    for i in 0..2 {
        for j in 0..2 {
            m[i][j + 2] = x[i][j].clone();
        }
    }
    make_gsp(m)
}

/// Which of the two integral structures applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    NotOneMod4,
    OneMod4,
}

/// `L = Q[x]/(x^2 - D)` with its distinguished root `alpha`: `alpha^2 = D`
/// when `D ≢ 1 mod 4`, and `alpha = (-1 + sqrt D)/2` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExt {
    d: i64,
    branch: Branch,
}

impl QuadExt {
    pub fn new(d: i64) -> Result<Self> {
        let sq_free = d != 0 && (2i64..).take_while(|k| k * k <= d.abs()).all(|k| d % (k * k) != 0);
        if !sq_free {
            return Err(Error::BadDiscriminant(d));
        }
        let branch = if d.rem_euclid(4) == 1 { Branch::OneMod4 } else { Branch::NotOneMod4 };
        Ok(Self { d, branch })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// `(D - 1)/4`, meaningful on the `1 mod 4` branch.
    pub fn c(&self) -> Rat {
        rat(self.d - 1, 4)
    }

    pub fn mul(&self, a: &LElt, b: &LElt) -> LElt {
        let hh = &a.h * &b.h;
        match self.branch {
            Branch::NotOneMod4 => LElt {
                e: &a.e * &b.e + &hh * int(self.d),
                h: &a.e * &b.h + &a.h * &b.e,
            },
            Branch::OneMod4 => LElt {
                e: &a.e * &b.e + &hh * self.c(),
                h: &a.e * &b.h + &a.h * &b.e - hh,
            },
        }
    }

    pub fn conj(&self, a: &LElt) -> LElt {
        match self.branch {
            Branch::NotOneMod4 => LElt { e: a.e.clone(), h: -a.h.clone() },
            Branch::OneMod4 => LElt { e: &a.e - &a.h, h: -a.h.clone() },
        }
    }

    pub fn norm(&self, a: &LElt) -> Rat {
        match self.branch {
            Branch::NotOneMod4 => &a.e * &a.e - &a.h * &a.h * int(self.d),
            Branch::OneMod4 => &a.e * &a.e - &a.e * &a.h - &a.h * &a.h * self.c(),
        }
    }

    pub fn inv(&self, a: &LElt) -> Result<LElt> {
        let n = checked_inv(&self.norm(a))?;
        let c = self.conj(a);
        Ok(LElt { e: c.e * &n, h: c.h * n })
    }

    pub fn gl2_mul(&self, a: &Gl2L, b: &Gl2L) -> Gl2L {
        array::from_fn(|i| {
            array::from_fn(|j| self.mul(&a[i][0], &b[0][j]).add(&self.mul(&a[i][1], &b[1][j])))
        })
    }

    pub fn gl2_det(&self, a: &Gl2L) -> LElt {
        self.mul(&a[0][0], &a[1][1]).sub(&self.mul(&a[0][1], &a[1][0]))
    }

    /// `g in GL2(L)` with `det g = r`, completed from `u1, u2, u3`.
    pub fn complete_with_det(&self, u1: LElt, u2: LElt, u3: LElt, r: &Rat) -> Result<Gl2L> {
        let u4 = self.mul(&LElt::rational(r.clone()).add(&self.mul(&u2, &u3)), &self.inv(&u1)?);
        Ok([[u1, u2], [u3, u4]])
    }
}

/// `e + h * alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LElt {
    pub e: Rat,
    pub h: Rat,
}

impl LElt {
    pub fn new(e: Rat, h: Rat) -> Self {
        Self { e, h }
    }

    pub fn ints(e: i64, h: i64) -> Self {
        Self { e: int(e), h: int(h) }
    }

    pub fn rational(e: Rat) -> Self {
        Self { e, h: Rat::zero() }
    }

    pub fn zero() -> Self {
        Self::ints(0, 0)
    }

    pub fn one() -> Self {
        Self::ints(1, 0)
    }

    pub fn alpha() -> Self {
        Self::ints(0, 1)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { e: &self.e + &o.e, h: &self.h + &o.h }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { e: &self.e - &o.e, h: &self.h - &o.h }
    }

    pub fn is_zero(&self) -> bool {
        self.e.is_zero() && self.h.is_zero()
    }
}

/// `(u1 u2; u3 u4)` over `L`.
pub type Gl2L = [[LElt; 2]; 2];

pub fn gl2l_identity() -> Gl2L {
    [[LElt::one(), LElt::zero()], [LElt::zero(), LElt::one()]]
}

/// The raw 4x4 image of `u`, without validation.
pub fn embed_matrix(u: &Gl2L, ext: &QuadExt) -> Mat4 {
    let [[a, b], [c, d]] = u;
    let (e1, h1, e2, h2, e3, h3, e4, h4) = (&a.e, &a.h, &b.e, &b.h, &c.e, &c.h, &d.e, &d.h);
    let dd = int(ext.d);
    match ext.branch {
        Branch::NotOneMod4 => [
            [e1.clone(), h1.clone(), h2.clone(), e2.clone()],
            [&dd * h1, e1.clone(), e2.clone(), &dd * h2],
            [&dd * h3, e3.clone(), e4.clone(), &dd * h4],
            [e3.clone(), h3.clone(), h4.clone(), e4.clone()],
        ],
        Branch::OneMod4 => {
            let c = ext.c();
            [
                [e1.clone(), h1.clone(), h2.clone(), e2 - h2],
                [&c * h1, e1 - h1, e2 - h2, -e2 + h2 * rat(ext.d + 3, 4)],
                [e3 + &c * h3, e3.clone(), e4.clone(), &c * h4],
                [e3.clone(), h3.clone(), h4.clone(), e4 - h4],
            ]
        }
    }
}

/// The embedding of `GL2*(L)`: the determinant must be rational.
pub fn embed_gl2l(u: &Gl2L, ext: &QuadExt) -> Result<GSpElement> {
    let det = ext.gl2_det(u);
    if det.is_zero() {
        return Err(Error::Singular);
    }
    if !det.h.is_zero() {
        return Err(Error::IrrationalDeterminant(format!("{} + {}*alpha", det.e, det.h)));
    }
    make_gsp(embed_matrix(u, ext))
}

/// Coordinates `(A, B1, B2, B3, C)` on `E = e1^e2`, `P = e1^f2`,
/// `X = e1^f1 - e2^f2`, `R = e2^f1`, `F = f1^f2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct V5Vector {
    pub c: [Rat; 5],
}

impl V5Vector {
    pub fn new(a: Rat, b1: Rat, b2: Rat, b3: Rat, c: Rat) -> Self {
        Self { c: [a, b1, b2, b3, c] }
    }

    pub fn ints(c: [i64; 5]) -> Self {
        Self { c: c.map(int) }
    }

    pub fn zero() -> Self {
        Self::ints([0; 5])
    }

    pub fn a(&self) -> &Rat {
        &self.c[0]
    }
    pub fn b1(&self) -> &Rat {
        &self.c[1]
    }
    pub fn b2(&self) -> &Rat {
        &self.c[2]
    }
    pub fn b3(&self) -> &Rat {
        &self.c[3]
    }
    pub fn cc(&self) -> &Rat {
        &self.c[4]
    }

    /// `(v, w) = AC' + CA' + B1B3' + B3B1' + 2B2B2'`.
    pub fn pairing(&self, w: &Self) -> Rat {
        let [a, b1, b2, b3, c] = &self.c;
        let [a2, b12, b22, b32, c2] = &w.c;
        a * c2 + c * a2 + b1 * b32 + b3 * b12 + int(2) * b2 * b22
    }

    pub fn q(&self) -> Rat {
        self.pairing(self) / int(2)
    }

    /// `A^2 + B1^2 + 2B2^2 + B3^2 + C^2`.
    pub fn norm2(&self) -> Rat {
        let [a, b1, b2, b3, c] = &self.c;
        a * a + b1 * b1 + int(2) * b2 * b2 + b3 * b3 + c * c
    }

    pub fn neg(&self) -> Self {
        Self { c: array::from_fn(|i| -self.c[i].clone()) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c: array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self { c: array::from_fn(|i| &self.c[i] * s) }
    }

    /// Membership in `V5(Z)`: all coordinates integral, except that on the
    /// `1 mod 4` branch only `2 B2` need be.
    pub fn is_integral(&self, ext: &QuadExt) -> bool {
        let ok = |x: &Rat| x.is_integer();
        integral_with(self, ext, ok)
    }

    /// Membership in `V5(Z_p)`.
    pub fn is_integral_p(&self, ext: &QuadExt, ctx: &PrimeCtx) -> bool {
        let ok = |x: &Rat| val_p(x, ctx).map_or(true, |v| v >= 0);
        integral_with(self, ext, ok)
    }

    pub fn to_f64(&self) -> [f64; 5] {
        self.c.clone().map(|x| crate::exact_algebra::rat_to_f64(&x))
    }
}

fn integral_with(v: &V5Vector, ext: &QuadExt, ok: impl Fn(&Rat) -> bool) -> bool {
    let [a, b1, b2, b3, c] = &v.c;
    let b2_ok = match ext.branch {
        Branch::NotOneMod4 => ok(b2),
        Branch::OneMod4 => ok(&(b2 * int(2))),
    };
    b2_ok && ok(a) && ok(b1) && ok(b3) && ok(c)
}

/// `v_D`: `D e1^f2 + e2^f1`, or `(D-1)/4 e1^f2 + (1/2)(e1^f1 - e2^f2) + e2^f1`.
pub fn make_v_d(ext: &QuadExt) -> V5Vector {
    match ext.branch {
        Branch::NotOneMod4 => V5Vector::ints([0, ext.d, 0, 1, 0]),
        Branch::OneMod4 => V5Vector::new(Rat::zero(), ext.c(), rat(1, 2), Rat::one(), Rat::zero()),
    }
}

/// `v g nu(g)^{-1}` on raw coordinates, over any commutative ring with
/// the inverse similitude supplied.
pub fn act_coords<T>(v: &[T; 5], g: &[[T; 4]; 4], nu_inv: &T) -> [T; 5]
where
    T: Clone + Num + Neg<Output = T>,
{
    let [a, b1, b2, b3, c] = v.clone();
    // Pairs (01, 02, 03, 12, 13, 23).
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let w6: [T; 6] = [a, b2.clone(), b1, b3, -b2, c];
    let mut out: [T; 6] = array::from_fn(|_| T::zero());
    for (s, &(k, l)) in PAIRS.iter().enumerate() {
        if w6[s].is_zero() {
            continue;
        }
        for (t, &(i, j)) in PAIRS.iter().enumerate() {
            let minor = g[k][i].clone() * g[l][j].clone() - g[k][j].clone() * g[l][i].clone();
            out[t] = out[t].clone() + w6[s].clone() * minor;
        }
    }
    let n = nu_inv.clone();
    [
        out[0].clone() * n.clone(),
        out[2].clone() * n.clone(),
        out[1].clone() * n.clone(),
        out[3].clone() * n.clone(),
        out[5].clone() * n,
    ]
}

pub fn act_v5(v: &V5Vector, g: &GSpElement) -> V5Vector {
    V5Vector { c: act_coords(&v.c, &g.mat, &g.nu.recip()) }
}

/// Where the character is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Finite(PrimeCtx),
    Infinite,
}

/// The argument of `psi` in `chi(u(X))`: `-D x11 + x22`, or
/// `(1-D)/4 x11 + x12 + x22` on the `1 mod 4` branch.
pub fn chi_argument(x: &Mat2, ext: &QuadExt) -> Rat {
    match ext.branch {
        Branch::NotOneMod4 => -int(ext.d) * &x[0][0] + &x[1][1],
        Branch::OneMod4 => -ext.c() * &x[0][0] + &x[0][1] + &x[1][1],
    }
}

/// The matrix `T` with `chi(u(X)) = psi(tr(T X))`.
pub fn t_matrix(ext: &QuadExt) -> Mat2 {
    match ext.branch {
        Branch::NotOneMod4 => mat2(int(-ext.d), Rat::zero(), Rat::zero(), Rat::one()),
        Branch::OneMod4 => mat2(-ext.c(), rat(1, 2), rat(1, 2), Rat::one()),
    }
}

pub fn chi_value(u: &GSpElement, ext: &QuadExt, place: Place) -> Result<Complex64> {
    let x = u.unipotent_block()?;
    if x[0][1] != x[1][0] {
        return Err(Error::WrongShape("unipotent block is not symmetric".into()));
    }
    let arg = chi_argument(&x, ext);
    Ok(match place {
        Place::Finite(ctx) => psi_p(&arg, &ctx),
        Place::Infinite => {
            let f = crate::exact_algebra::rat_to_f64(&arg);
            Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (f - num_traits::Float::floor(f)))
        }
    })
}

/// `delta_P(m) = |det m_t / nu|^3` on the Siegel Levi.
pub fn delta_p(m: &GSpElement, ctx: &PrimeCtx) -> Result<Rat> {
    let (mt, _) = m.levi_blocks()?;
    let r = ctx.abs(&(det2(&mt) / m.nu()));
    Ok(&r * &r * &r)
}

/// `delta_B(t) = |lambda|^3 |t1/t2|` for `t = diag(lambda t1, lambda t2, t2, t1)`.
pub fn delta_b(t: &GSpElement, ctx: &PrimeCtx) -> Result<Rat> {
    let m = t.mat();
    for i in 0..4 {
        for j in 0..4 {
            if i != j && !m[i][j].is_zero() {
                return Err(Error::WrongShape("not diagonal".into()));
            }
        }
    }
    let lambda = &m[0][0] / &m[3][3];
    let l = ctx.abs(&lambda);
    Ok(&l * &l * &l * ctx.abs(&(&m[3][3] / &m[2][2])))
}

/// `delta_Q(g) = |a/d|^2` on the Klingen parabolic fixing the line of `f2`.
pub fn delta_q(g: &GSpElement, ctx: &PrimeCtx) -> Result<Rat> {
    let m = g.mat();
    if (0..3).any(|j| !m[3][j].is_zero()) {
        return Err(Error::WrongShape("f2 g is not a multiple of f2".into()));
    }
    let r = ctx.abs(&(&m[1][1] / &m[3][3]));
    Ok(&r * &r)
}

/// Rows `e1 + e2, e2, f1, f1 - f2`.
pub fn split_basis_change() -> Mat4 {
    mat4_from_i64([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, -1]])
}

/// Orbit decomposition of the lines of `F_p^4` under the reduction of the
/// embedded `GL2*(L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineOrbits {
    pub p: u64,
    /// Sizes in decreasing order.
    pub sizes: Vec<usize>,
    /// Orbit label of every normalized line, indexed by [`line_index`].
    labels: Vec<usize>,
}

impl LineOrbits {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn orbit_of(&self, v: [i64; 4]) -> Option<usize> {
        let p = self.p as i64;
        let idx = line_index(normalize_line(v.map(|x| x.rem_euclid(p)), p)?, p);
        Some(self.labels[idx])
    }
}

fn normalize_line(v: [i64; 4], p: i64) -> Option<[i64; 4]> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = modinv(lead, p);
    Some(v.map(|x| (x * inv).rem_euclid(p)))
}

fn line_index(v: [i64; 4], p: i64) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

fn modinv(a: i64, p: i64) -> i64 {
    let mut r = 1;
    let mut b = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn line_orbits_mod_p(ext: &QuadExt, ctx: &PrimeCtx) -> Result<LineOrbits> {
    let p = ctx.p() as i64;
    if p == 2 || ext.d % p == 0 {
        return Err(Error::BadReduction { p: ctx.p(), d: ext.d });
    }
    let prim = (2..p).find(|&g| (1..p - 1).all(|k| modpow(g, k, p) != 1)).unwrap_or(1);
    let mut gens = Vec::new();
    for t in [LElt::one(), LElt::alpha()] {
        gens.push([[LElt::one(), t.clone()], [LElt::zero(), LElt::one()]]);
        gens.push([[LElt::one(), LElt::zero()], [t, LElt::one()]]);
    }
    gens.push([[LElt::one(), LElt::zero()], [LElt::zero(), LElt::ints(prim, 0)]]);
    let mats: Vec<[[i64; 4]; 4]> = gens
        .iter()
        .map(|u| {
            let m = embed_matrix(u, ext);
            let pc = PrimeCtx::new(p as u64).expect("prime");
            array::from_fn(|i| array::from_fn(|j| residue(&m[i][j], &pc, 1).expect("p-integral") as i64))
        })
        .collect();

    let total = (p * p * p * p) as usize;
    let mut parent: Vec<usize> = (0..total).collect();
    let mut lines = Vec::new();
    for idx in 1..total {
        let mut v = [0i64; 4];
        let mut r = idx as i64;
        for k in (0..4).rev() {
            v[k] = r % p;
            r /= p;
        }
        if normalize_line(v, p) == Some(v) {
            lines.push(v);
        }
    }
    for v in &lines {
        let i = line_index(*v, p);
        for g in &mats {
            let img: [i64; 4] = array::from_fn(|j| (0..4).map(|k| v[k] * g[k][j]).sum::<i64>().rem_euclid(p));
            let img = normalize_line(img, p).ok_or(Error::Singular)?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, line_index(img, p)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut labels = vec![usize::MAX; total];
    let roots: BTreeSet<usize> = lines.iter().map(|v| find(&mut parent, line_index(*v, p))).collect();
    let roots: Vec<usize> = roots.into_iter().collect();
    let mut sizes = vec![0usize; roots.len()];
    for v in &lines {
        let i = line_index(*v, p);
        let r = find(&mut parent, i);
        let k = roots.binary_search(&r).expect("root");
        labels[i] = k;
        sizes[k] += 1;
    }
    let mut sorted = sizes.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(LineOrbits { p: p as u64, sizes: sorted, labels })
}

fn modpow(b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    let mut b = b.rem_euclid(p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Generators of `GSp4(Z)` together with their inverses.
pub fn gsp4z_generators() -> Vec<GSpElement> {
    let mut out = Vec::new();
    let mut push = |m: Mat4| {
        let g = make_gsp(m).expect("generator is symplectic");
        out.push(g.inverse());
        out.push(g);
    };
    push(j4());
    for x in [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]]] {
        let mut m = identity4();
        let mut mt = identity4();
        for i in 0..2 {
            for j in 0..2 {
                m[i][j + 2] = int(x[i][j]);
                mt[j + 2][i] = int(x[i][j]);
            }
        }
        push(m);
        push(mt);
    }
    for a in [[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[1, 0], [1, 1]]] {
        let a = mat2(int(a[0][0]), int(a[0][1]), int(a[1][0]), int(a[1][1]));
        let b = transpose2(&inv2(&a).expect("unimodular"));
        push(levi(&a, &b).expect("levi").mat);
    }
    push(diag4([int(1), int(1), int(-1), int(-1)]));
    out
}

/// Product of generators by index (indices taken modulo the list length).
pub fn gsp4z_word(indices: &[usize]) -> GSpElement {
    let gens = gsp4z_generators();
    indices.iter().fold(GSpElement::identity(), |acc, &i| acc.mul(&gens[i % gens.len()]))
}

impl Sub for &LElt {
    type Output = LElt;
    fn sub(self, o: &LElt) -> LElt {
        LElt::sub(self, o)
    }
}

impl Mul<&Rat> for &LElt {
    type Output = LElt;
    fn mul(self, s: &Rat) -> LElt {
        LElt { e: &self.e * s, h: &self.h * s }
    }
}
