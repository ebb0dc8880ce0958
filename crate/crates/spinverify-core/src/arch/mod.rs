//! The real place: Siegel upper half space, the isotropic vector `w`,
//! the contour integral for `alpha_chi`, the section `f_infty` and the
//! Gamma-factor structure of `I_infty`.

pub mod gamma;
pub mod quadrature;

use alloc::format;
use alloc::vec::Vec;
use core::array;
use core::f64::consts::PI;

use num_complex::{Complex, Complex64};
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_algebra::{int, rat_to_f64, Rat};
use crate::gsp4::{act_coords, GSpElement, V5Vector};

pub use gamma::{gamma_fn, gamma_real};
pub use quadrature::{integrate, integrate_line, integrate_real, integrate_to_inf, Estimate, QuadConfig};

pub type CMat2 = [[Complex64; 2]; 2];
pub type RMat4 = [[f64; 4]; 4];

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

fn cmul2(a: &CMat2, b: &CMat2) -> CMat2 {
    array::from_fn(|i| array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn cdet2(a: &CMat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn block(g: &RMat4, r: usize, c: usize) -> CMat2 {
    array::from_fn(|i| array::from_fn(|j| Complex64::new(g[r + i][c + j], 0.0)))
}

/// A real similitude in the basis `(e1, e2, f1, f2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealGsp {
    mat: RMat4,
    nu: f64,
}

impl RealGsp {
    /// Checks `g J g^t = nu J` to a relative `1e-9`.
    pub fn new(mat: RMat4) -> Result<Self> {
        let j = j4f();
        let gj = mul4f(&mul4f(&mat, &j), &transpose4f(&mat));
        let nu = gj[0][2];
        let scale = mat.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for r in 0..4 {
            for c in 0..4 {
                if (gj[r][c] - nu * j[r][c]).abs() > 1e-9 * scale * scale {
                    return Err(Error::NotSymplectic { row: r, col: c, value: format!("{:e}", gj[r][c]) });
                }
            }
        }
        if nu == 0.0 {
            return Err(Error::Singular);
        }
        Ok(Self { mat, nu })
    }

    pub fn from_gsp(g: &GSpElement) -> Self {
        Self { mat: g.mat().clone().map(|r| r.map(|x| rat_to_f64(&x))), nu: rat_to_f64(g.nu()) }
    }

    pub fn identity() -> Self {
        Self { mat: array::from_fn(|i| array::from_fn(|j| if i == j { 1.0 } else { 0.0 })), nu: 1.0 }
    }

    pub fn mat(&self) -> &RMat4 {
        &self.mat
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { mat: mul4f(&self.mat, &o.mat), nu: self.nu * o.nu }
    }

    /// `nu^{-1} J^t g^t J`.
    pub fn inverse(&self) -> Self {
        let j = j4f();
        let m = mul4f(&mul4f(&transpose4f(&j), &transpose4f(&self.mat)), &j);
        Self { mat: m.map(|r| r.map(|x| x / self.nu)), nu: 1.0 / self.nu }
    }
}

pub fn j4f() -> RMat4 {
    [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]]
}

fn mul4f(a: &RMat4, b: &RMat4) -> RMat4 {
    array::from_fn(|i| array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn transpose4f(a: &RMat4) -> RMat4 {
    array::from_fn(|i| array::from_fn(|j| a[j][i]))
}

/// `u(X) diag(lambda, lambda, 1, 1) m(a, b, c, d)` with
/// `m = (a b; c d) (+) (d -c; -b a)` and `X = (x11 x12; x12 x22)`.
pub fn siegel_parabolic(x: [f64; 3], lambda: f64, abcd: [f64; 4]) -> Result<RealGsp> {
    let [x11, x12, x22] = x;
    let [a, b, c, d] = abcd;
    let n = [[1.0, 0.0, x11, x12], [0.0, 1.0, x12, x22], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let l = [[lambda, 0.0, 0.0, 0.0], [0.0, lambda, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let m = [[a, b, 0.0, 0.0], [c, d, 0.0, 0.0], [0.0, 0.0, d, -c], [0.0, 0.0, -b, a]];
    RealGsp::new(mul4f(&mul4f(&n, &l), &m))
}

/// `(A B; -B A)` for a unitary `U = A + iB`.
pub fn k_from_unitary(u: &CMat2) -> Result<RealGsp> {
    let a: [[f64; 2]; 2] = array::from_fn(|i| array::from_fn(|j| u[i][j].re));
    let b: [[f64; 2]; 2] = array::from_fn(|i| array::from_fn(|j| u[i][j].im));
    let m = [
        [a[0][0], a[0][1], b[0][0], b[0][1]],
        [a[1][0], a[1][1], b[1][0], b[1][1]],
        [-b[0][0], -b[0][1], a[0][0], a[0][1]],
        [-b[1][0], -b[1][1], a[1][0], a[1][1]],
    ];
    RealGsp::new(m)
}

/// Gram-Schmidt on two complex vectors; the rows of the result are orthonormal.
pub fn unitary_from_vectors(v1: [Complex64; 2], v2: [Complex64; 2]) -> Result<CMat2> {
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    if n1 < 1e-8 {
        return Err(Error::InvalidArgument("degenerate first vector".into()));
    }
    let e1 = [v1[0] / n1, v1[1] / n1];
    let proj = e1[0].conj() * v2[0] + e1[1].conj() * v2[1];
    let w = [v2[0] - e1[0] * proj, v2[1] - e1[1] * proj];
    let n2 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    if n2 < 1e-8 {
        return Err(Error::InvalidArgument("dependent vectors".into()));
    }
    Ok([e1, [w[0] / n2, w[1] / n2]])
}

/// A point `Z = X + iY` of the Siegel upper half space of degree two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegelPoint {
    z: CMat2,
}

impl SiegelPoint {
    /// `x` and `y` list the entries `(11, 12, 22)`.
    pub fn new(x: [f64; 3], y: [f64; 3]) -> Result<Self> {
        let z = [[Complex64::new(x[0], y[0]), Complex64::new(x[1], y[1])], [Complex64::new(x[1], y[1]), Complex64::new(x[2], y[2])]];
        Self::from_matrix(z)
    }

    pub fn from_matrix(z: CMat2) -> Result<Self> {
        let scale = z.iter().flatten().fold(1.0f64, |m, c| m.max(c.norm()));
        if (z[0][1] - z[1][0]).norm() > 1e-9 * scale {
            return Err(Error::WrongShape("Z is not symmetric".into()));
        }
        let (y11, y12, y22) = (z[0][0].im, 0.5 * (z[0][1].im + z[1][0].im), z[1][1].im);
        if !(y11 > 0.0 && y11 * y22 - y12 * y12 > 0.0) {
            return Err(Error::WrongShape("Im Z is not positive definite".into()));
        }
        Ok(Self { z })
    }

    /// `c i 1_2`.
    pub fn i_scaled(c: f64) -> Self {
        Self::new([0.0; 3], [c, 0.0, c]).expect("c > 0")
    }

    pub fn z(&self) -> &CMat2 {
        &self.z
    }

    pub fn y(&self) -> [f64; 3] {
        [self.z[0][0].im, self.z[0][1].im, self.z[1][1].im]
    }

    pub fn det(&self) -> Complex64 {
        cdet2(&self.z)
    }

    pub fn det_y(&self) -> f64 {
        let [a, b, c] = self.y();
        a * c - b * b
    }

    /// `Z + X0`.
    pub fn translate(&self, x0: [f64; 3]) -> Self {
        let [a, b, c] = x0;
        let d = [[a, b], [b, c]];
        Self { z: array::from_fn(|i| array::from_fn(|j| self.z[i][j] + d[i][j])) }
    }
}

/// `g Z = (AZ + B)(CZ + D)^{-1}` and `j(g, Z) = det(CZ + D)`.
pub fn act_h2(g: &RealGsp, z: &SiegelPoint) -> Result<(SiegelPoint, Complex64)> {
    if g.nu <= 0.0 {
        return Err(Error::InvalidArgument("act_h2 needs nu(g) > 0".into()));
    }
    let (a, b, c, d) = (block(&g.mat, 0, 0), block(&g.mat, 0, 2), block(&g.mat, 2, 0), block(&g.mat, 2, 2));
    let az = cmul2(&a, &z.z);
    let cz = cmul2(&c, &z.z);
    let num: CMat2 = array::from_fn(|i| array::from_fn(|k| az[i][k] + b[i][k]));
    let den: CMat2 = array::from_fn(|i| array::from_fn(|k| cz[i][k] + d[i][k]));
    let j = cdet2(&den);
    if j.norm() < 1e-300 {
        return Err(Error::Singular);
    }
    let inv = [[den[1][1] / j, -den[0][1] / j], [-den[1][0] / j, den[0][0] / j]];
    let mut w = cmul2(&num, &inv);
    let sym = 0.5 * (w[0][1] + w[1][0]);
    w[0][1] = sym;
    w[1][0] = sym;
    Ok((SiegelPoint::from_matrix(w)?, j))
}

/// `w = -(e1 - i f1) ^ (e2 - i f2)` with Gaussian-integer coordinates.
pub fn w_exact() -> [Complex<Rat>; 5] {
    let re = |n: i64| Complex::new(int(n), Rat::zero());
    let im = |n: i64| Complex::new(Rat::zero(), int(n));
    [re(-1), im(1), re(0), im(-1), re(1)]
}

pub fn w_vector() -> [Complex64; 5] {
    [-C1, CI, C0, -CI, C1]
}

/// The invariant pairing on coordinates over any commutative ring.
pub fn pairing_generic<T: Clone + num_traits::Num>(v: &[T; 5], w: &[T; 5]) -> T {
    let two = T::one() + T::one();
    v[0].clone() * w[4].clone() + v[4].clone() * w[0].clone() + v[1].clone() * w[3].clone() + v[3].clone() * w[1].clone() + two * v[2].clone() * w[2].clone()
}

/// `(|(w, v)|^2, ||v||^2 - (v, v))`, both exact.
pub fn w_pairing_identity_check(v: &V5Vector) -> (Rat, Rat) {
    let vc: [Complex<Rat>; 5] = array::from_fn(|i| Complex::new(v.c[i].clone(), Rat::zero()));
    let p = pairing_generic(&w_exact(), &vc);
    let lhs = &p.re * &p.re + &p.im * &p.im;
    let rhs = v.norm2() - v.pairing(v);
    (lhs, rhs)
}

/// `Q_v(Z) = -A det Z + tr((-B1 B2; B2 B3) Z) - C` in our coordinates.
pub fn q_v_eval(v: &[f64; 5], z: &SiegelPoint) -> Complex64 {
    let [a, b1, b2, b3, c] = *v;
    let zz = &z.z;
    -zz_det(zz) * a - zz[0][0] * b1 + zz[0][1] * (2.0 * b2) + zz[1][1] * b3 - c
}

fn zz_det(z: &CMat2) -> Complex64 {
    cdet2(z)
}

fn to_c5(v: &[f64; 5]) -> [Complex64; 5] {
    v.map(|x| Complex64::new(x, 0.0))
}

fn to_c4(g: &RealGsp) -> [[Complex64; 4]; 4] {
    g.mat.map(|r| r.map(|x| Complex64::new(x, 0.0)))
}

/// `v g nu(g)^{-1}` on complex coordinates.
pub fn act_c5(v: &[Complex64; 5], g: &RealGsp) -> [Complex64; 5] {
    act_coords(v, &to_c4(g), &Complex64::new(1.0 / g.nu, 0.0))
}

/// `(j(g, i)^{-1} nu(g) (w, v g), Q_v(g i))`.
pub fn gv_pairing_check(g: &RealGsp, v: &[f64; 5]) -> Result<(Complex64, Complex64)> {
    let (z, j) = act_h2(g, &SiegelPoint::i_scaled(1.0))?;
    let vg = act_c5(&to_c5(v), g);
    let lhs = pairing_generic(&w_vector(), &vg) * g.nu / j;
    Ok((lhs, q_v_eval(v, &z)))
}

/// `nu(g) j(g, i)^{-1} w g^{-1}` and the coordinates predicted from `Z = g i`:
/// `(-1, z22, z12, -z11, -det Z)`.
pub fn w_ginv_coords(g: &RealGsp) -> Result<([Complex64; 5], [Complex64; 5])> {
    let (z, j) = act_h2(g, &SiegelPoint::i_scaled(1.0))?;
    let wg = act_c5(&w_vector(), &g.inverse());
    let lhs = wg.map(|c| c * g.nu / j);
    let zz = z.z;
    Ok((lhs, [-C1, zz[1][1], zz[0][1], -zz[0][0], -z.det()]))
}

/// `(w k, j(k, i)^{-1} w)` for `k` in `K_infty`.
pub fn w_k_check(k: &RealGsp) -> Result<([Complex64; 5], [Complex64; 5])> {
    let (_, j) = act_h2(k, &SiegelPoint::i_scaled(1.0))?;
    Ok((act_c5(&w_vector(), k), w_vector().map(|c| c / j)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub numeric: Complex64,
    pub closed: Complex64,
    pub rel_error: f64,
}

impl Comparison {
    fn new(numeric: Complex64, closed: Complex64) -> Self {
        let rel_error = (numeric - closed).norm() / closed.norm().max(f64::MIN_POSITIVE);
        Self { numeric, closed, rel_error }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `e^{-2 pi y} (-2 pi i)^r / (r-1)!`.
pub fn contour_closed(r: u32, y: f64) -> Complex64 {
    (-2.0 * PI * y).exp() * Complex64::new(0.0, -2.0 * PI).powu(r) / factorial(r - 1)
}

/// `int_R e^{-2 pi i x} (x + iy)^{-r} dx` as quadrature on `[-L, L]` plus an
/// asymptotic tail from repeated integration by parts.
pub fn contour_integral_check(r: u32, y: f64, cutoff: f64, cfg: &QuadConfig) -> Result<Comparison> {
    if r < 2 {
        return Err(Error::InvalidArgument("the contour integral needs r >= 2".into()));
    }
    if y <= 0.0 || cutoff <= 0.0 {
        return Err(Error::InvalidArgument("y and the cutoff must be positive".into()));
    }
    let f = |x: f64| Complex64::new(0.0, -2.0 * PI * x).exp() * Complex64::new(x, y).powi(-(r as i32));
    let cfg = cfg.with_panels((4.0 * cutoff).ceil() as usize);
    let body = integrate(f, -cutoff, cutoff, &cfg)?.value;
    let a = Complex64::new(0.0, 2.0 * PI);
    // d^k/dx^k (x + iy)^{-r}
    let deriv = |x: f64, k: u32| {
        let c: f64 = (0..k).map(|m| -(r as f64) - m as f64).product();
        Complex64::new(x, y).powi(-((r + k) as i32)) * c
    };
    let mut tail = C0;
    for k in 0..8 {
        let ak = a.powu(k + 1);
        tail += (-a * cutoff).exp() * deriv(cutoff, k) / ak;
        tail -= (a * cutoff).exp() * deriv(-cutoff, k) / ak;
    }
    Ok(Comparison::new(body + tail, contour_closed(r, y)))
}

/// `pi^{-2s} Gamma(2s) y11^{-2s} det(Y)^{2s}` at `Z = g i`, against
/// `|nu|^{2s} int_R exp(-pi t^2 ||f2 g||^2) |t|^{4s} dt / |t|` by quadrature.
pub fn f_infty_check(g: &RealGsp, s: f64, cfg: &QuadConfig) -> Result<Comparison> {
    if s <= 0.0 {
        return Err(Error::InvalidArgument("f_infty needs s > 0".into()));
    }
    let (z, _) = act_h2(g, &SiegelPoint::i_scaled(1.0))?;
    let y = z.y();
    let closed = PI.powf(-2.0 * s) * gamma_real(2.0 * s)? * y[0].powf(-2.0 * s) * z.det_y().powf(2.0 * s);
    let a: f64 = g.mat[3].iter().map(|x| x * x).sum();
    let half = integrate_to_inf(|t| (-PI * a * t * t).exp() * t.powf(4.0 * s - 1.0), 0.0, cfg)?;
    let numeric = g.nu.abs().powf(2.0 * s) * 2.0 * half;
    Ok(Comparison::new(Complex64::new(numeric, 0.0), Complex64::new(closed, 0.0)))
}

/// How the `y11` coefficient of the exponent in `I_infty` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IInftyForm {
    /// `|D| y11`, plus `y12` when `D = 1 mod 4`.
    AsDisplayed,
    /// `tr(T Y)`: `(1 - D)/4 y11 + y12` when `D = 1 mod 4`.
    Trace,
}

fn one_mod_4(d: i64) -> bool {
    d.rem_euclid(4) == 1
}

/// Coefficient of `y11` and whether the linear `y12` term is present.
fn y_coefficients(d: i64, form: IInftyForm) -> (f64, bool) {
    let shifted = one_mod_4(d);
    let c = match (form, shifted) {
        (IInftyForm::Trace, true) => (1 - d) as f64 / 4.0,
        _ => d.unsigned_abs() as f64,
    };
    (c, shifted)
}

/// `int_{y11 > 0} int_R exp(-4 pi (y12^2 / y11 + c y11 [+ y12])) dy12 dy11`.
pub fn i_infty_y_part(d: i64, form: IInftyForm, cfg: &QuadConfig) -> Result<f64> {
    let (c, lin) = y_coefficients(d, form);
    let err = core::cell::RefCell::new(None);
    let outer = integrate_to_inf(
        |y11| {
            if y11 <= 0.0 {
                return 0.0;
            }
            // y12 = y0 + sqrt(y11) u keeps the Gaussian at unit width.
            let (h, y0) = (y11.sqrt(), if lin { -0.5 * y11 } else { 0.0 });
            let inner = integrate_line(
                |u| {
                    let y12 = y0 + h * u;
                    let l = if lin { y12 } else { 0.0 };
                    (-4.0 * PI * (y12 * y12 / y11 + c * y11 + l)).exp()
                },
                cfg,
            );
            inner.map(|v| v * h).unwrap_or_else(|e| {
                err.borrow_mut().get_or_insert(e);
                0.0
            })
        },
        0.0,
        cfg,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// The same double integral in closed form: `Gamma(3/2) / 2 (4 pi c')^{-3/2}`
/// with `c' = c - 1/4` when the `y12` term is present.
pub fn i_infty_y_part_closed(d: i64, form: IInftyForm) -> Result<f64> {
    let (c, lin) = y_coefficients(d, form);
    let ce = if lin { c - 0.25 } else { c };
    if ce <= 0.0 {
        return Err(Error::InvalidArgument(format!("divergent y-integral for D = {d}")));
    }
    Ok(0.5 * gamma_real(1.5)? * (4.0 * PI * ce).powf(-1.5))
}

/// `int_0^inf t^{2s + r - 2} e^{-4 pi t} dt / t`.
pub fn i_infty_t_part(r: u32, s: f64, cfg: &QuadConfig) -> Result<f64> {
    let e = 2.0 * s + r as f64 - 3.0;
    integrate_to_inf(|t| t.powf(e) * (-4.0 * PI * t).exp(), 0.0, cfg)
}

/// `(4 pi)^{-(2s + r - 2)} Gamma(2s + r - 2)`.
pub fn i_infty_closed(r: u32, s: f64) -> Result<f64> {
    let e = 2.0 * s + r as f64 - 2.0;
    Ok((4.0 * PI).powf(-e) * gamma_real(e)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IInftyReport {
    pub s_values: Vec<f64>,
    pub numeric: Vec<f64>,
    pub closed: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `max |ratio / ratio_0 - 1|`.
    pub spread: f64,
    pub analytic_constant: f64,
}

/// Iterated quadrature of the `(t, y11, y12)` integral at each `s`, compared
/// with the Gamma profile. The ratio must not depend on `s`.
pub fn i_infty_gamma_check(r: u32, d: i64, s_values: &[f64], form: IInftyForm, cfg: &QuadConfig) -> Result<IInftyReport> {
    if r < 6 {
        return Err(Error::InvalidArgument("I_infty needs r >= 6".into()));
    }
    if d >= 0 {
        return Err(Error::BadDiscriminant(d));
    }
    if s_values.iter().any(|&s| s <= 0.0) {
        return Err(Error::InvalidArgument("I_infty needs s > 0".into()));
    }
    let y_part = i_infty_y_part(d, form, cfg)?;
    let mut numeric = Vec::new();
    let mut closed = Vec::new();
    for &s in s_values {
        numeric.push(i_infty_t_part(r, s, cfg)? * y_part);
        closed.push(i_infty_closed(r, s)?);
    }
    let ratios: Vec<f64> = numeric.iter().zip(&closed).map(|(n, c)| n / c).collect();
    let spread = ratios.iter().map(|x| (x / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(IInftyReport { s_values: s_values.to_vec(), numeric, closed, ratios, spread, analytic_constant: i_infty_y_part_closed(d, form)? })
}
