//! Exact rationals, Laurent polynomials in the Satake variables and
//! power series in `Q = p^(3/2 - s)` truncated at a fixed order.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always stored reduced with a positive
/// denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn checked_inv(x: &Rat) -> Result<Rat> {
    if x.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(x.recip())
    }
}

/// `p^k` for any integer `k`.
pub fn p_pow(p: u64, k: i64) -> Rat {
    let base = Rat::from_integer(BigInt::from(p));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base.recip(), (-k) as usize)
    }
}

/// `"num/den"`, or `"num"` for integers.
pub fn rat_string(x: &Rat) -> String {
    alloc::format!("{x}")
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exponent vector `(e_A, e_B, e_W)` of `X_A^e_A X_B^e_B W^e_W`.
pub type Exp = [i64; 3];

/// Finite sum of monomials in `X_A`, `X_B`, `W` with rational
/// coefficients. `X_C = W/X_B` and `X_D = W/X_A` are derived.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Exp, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial(c: Rat, e: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn x_a() -> Self {
        Self::monomial(Rat::one(), [1, 0, 0])
    }

    pub fn x_b() -> Self {
        Self::monomial(Rat::one(), [0, 1, 0])
    }

    pub fn x_c() -> Self {
        Self::monomial(Rat::one(), [0, -1, 1])
    }

    pub fn x_d() -> Self {
        Self::monomial(Rat::one(), [-1, 0, 1])
    }

    pub fn w() -> Self {
        Self::monomial(Rat::one(), [0, 0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exp) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// The single `(coefficient, exponent)` pair of a monomial.
    pub fn as_monomial(&self) -> Result<(Rat, Exp)> {
        if self.terms.len() != 1 {
            return Err(Error::NotMonomial(self.terms.len()));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok((c.clone(), *e))
    }

    fn add_term(&mut self, e: Exp, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exchange `X_A` and `X_B` (and hence `X_C` and `X_D`).
    pub fn swap_ab(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| ([e[1], e[0], e[2]], c.clone())).collect() }
    }

    /// Evaluate at rational values of `X_A`, `X_B`, `W`.
    pub fn eval(&self, xa: &Rat, xb: &Rat, w: &Rat) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            acc += c * ipow(xa, e[0])? * ipow(xb, e[1])? * ipow(w, e[2])?;
        }
        Ok(acc)
    }
}

fn ipow(x: &Rat, k: i64) -> Result<Rat> {
    if k >= 0 {
        Ok(num_traits::pow(x.clone(), k as usize))
    } else {
        Ok(num_traits::pow(checked_inv(x)?, (-k) as usize))
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (name, k) in [("XA", e[0]), ("XB", e[1]), ("W", e[2])] {
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `sum_{k <= K} c_k Q^k` with Laurent polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<LaurentPoly>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![LaurentPoly::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = LaurentPoly::one();
        s
    }

    /// Build from explicit coefficients; terms past `order` are dropped.
    pub fn from_coeffs(order: usize, coeffs: Vec<LaurentPoly>) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in coeffs.into_iter().enumerate().take(order + 1) {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &LaurentPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    /// Add `c Q^k`; ignored when `k` exceeds the order.
    pub fn add_term(&mut self, k: usize, c: &LaurentPoly) {
        if k < self.coeffs.len() {
            self.coeffs[k] = &self.coeffs[k] + c;
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let k_max = self.order();
        let mut out = Self::zero(k_max);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k_max + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn series_equal(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.coeffs == other.coeffs)
    }

    /// First degree at which the two series differ, with `self - other`
    /// at that degree.
    pub fn first_mismatch(&self, other: &Self) -> Result<Option<(usize, LaurentPoly)>> {
        self.check(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(k, (a, b))| (k, a - b)))
    }

    /// Apply `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        Self { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// `(1 - m Q)^{-1}` truncated at order `k_max`, for a monomial `m`.
pub fn series_geo_inverse(m: &LaurentPoly, k_max: usize) -> Result<TruncatedSeries> {
    m.as_monomial()?;
    let mut s = TruncatedSeries::zero(k_max);
    let mut power = LaurentPoly::one();
    for k in 0..=k_max {
        s.coeffs[k] = power.clone();
        power = &power * m;
    }
    Ok(s)
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*Q^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_examples() {
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
        assert_eq!(checked_inv(&rat(1, 5)).unwrap(), int(5));
        assert_eq!((int(1) - rat(1, 5)) * rat(5, 4), int(1));
        assert_eq!(checked_inv(&int(0)), Err(Error::DivisionByZero));
        assert_eq!(rat(6, -4), rat(-3, 2));
        assert_eq!(*rat(6, -4).denom(), BigInt::from(2));
    }

    #[test]
    fn laurent_relations() {
        assert_eq!(&LaurentPoly::x_a() * &LaurentPoly::x_d(), LaurentPoly::w());
        assert_eq!(&LaurentPoly::x_b() * &LaurentPoly::x_c(), LaurentPoly::w());
        assert!((&LaurentPoly::zero() * &LaurentPoly::x_a()).is_zero());
        let p = &LaurentPoly::x_a() - &LaurentPoly::x_a();
        assert!(p.is_zero());
    }

    #[test]
    fn geometric_series() {
        let one = series_geo_inverse(&LaurentPoly::one(), 3).unwrap();
        for k in 0..=3 {
            assert_eq!(*one.coeff(k), LaurentPoly::one());
        }
        let xa = series_geo_inverse(&LaurentPoly::x_a(), 2).unwrap();
        assert_eq!(*xa.coeff(2), LaurentPoly::x_a().pow(2));
        let bad = &LaurentPoly::x_a() + &LaurentPoly::x_b();
        assert_eq!(series_geo_inverse(&bad, 2), Err(Error::NotMonomial(2)));
    }

    #[test]
    fn four_factor_product_at_one() {
        // (1 - Q)^{-4} = sum C(k+3, 3) Q^k.
        let g = series_geo_inverse(&LaurentPoly::one(), 2).unwrap();
        let prod = g.mul(&g).unwrap().mul(&g).unwrap().mul(&g).unwrap();
        let want = TruncatedSeries::from_coeffs(
            2,
            vec![LaurentPoly::one(), LaurentPoly::constant(int(4)), LaurentPoly::constant(int(10))],
        );
        assert!(prod.series_equal(&want).unwrap());
    }

    #[test]
    fn series_products() {
        let one_minus_q = TruncatedSeries::from_coeffs(2, vec![LaurentPoly::one(), LaurentPoly::constant(int(-1))]);
        let geo = series_geo_inverse(&LaurentPoly::one(), 2).unwrap();
        assert!(one_minus_q.mul(&geo).unwrap().series_equal(&TruncatedSeries::one(2)).unwrap());
        assert!(geo.series_equal(&geo).unwrap());
        assert_eq!(geo.mul(&TruncatedSeries::one(3)), Err(Error::OrderMismatch(2, 3)));

        // (1 - W Q^2 / 3) (1 - Q)^{-4} at W = 1: 1 + 4Q + (10 - 1/3) Q^2.
        let g4 = geo.mul(&geo).unwrap().mul(&geo).unwrap().mul(&geo).unwrap();
        let corr = TruncatedSeries::from_coeffs(
            2,
            vec![LaurentPoly::one(), LaurentPoly::zero(), LaurentPoly::constant(rat(-1, 3))],
        );
        let got = corr.mul(&g4).unwrap();
        assert_eq!(*got.coeff(1), LaurentPoly::constant(int(4)));
        assert_eq!(*got.coeff(2), LaurentPoly::constant(int(10) - rat(1, 3)));
    }

    #[test]
    fn mismatch_reports_degree() {
        let a = TruncatedSeries::one(3);
        let mut b = TruncatedSeries::one(3);
        b.add_term(2, &LaurentPoly::w());
        let (k, diff) = a.first_mismatch(&b).unwrap().unwrap();
        assert_eq!(k, 2);
        assert_eq!(diff, -&LaurentPoly::w());
    }

    #[test]
    fn eval_uses_derived_variables() {
        let v = LaurentPoly::x_d().eval(&int(2), &rat(1, 2), &int(3)).unwrap();
        assert_eq!(v, rat(3, 2));
    }
}
