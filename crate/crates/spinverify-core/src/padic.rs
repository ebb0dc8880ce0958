//! p-adic valuations, the additive character, Haar measure by finite
//! enumeration, and square-root congruence counts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{p_pow, Rat};

/// A fixed finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeCtx {
    p: u64,
}

impl PrimeCtx {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn pi(&self) -> i128 {
        self.p as i128
    }

    /// `p^k` as an exact rational, `k` of either sign.
    pub fn pow(&self, k: i64) -> Rat {
        p_pow(self.p, k)
    }

    /// `|x|_p` as an exact rational.
    pub fn abs(&self, x: &Rat) -> Rat {
        match val_p(x, self) {
            None => Rat::zero(),
            Some(v) => self.pow(-v),
        }
    }
}

/// Valuation of a nonzero integer.
pub fn val_int(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `ord_p(x)`, with `None` standing for `+infinity` at zero.
pub fn val_p(x: &Rat, ctx: &PrimeCtx) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_int(x.numer(), ctx.p) - val_int(x.denom(), ctx.p))
}

pub fn is_integral(x: &Rat, ctx: &PrimeCtx) -> bool {
    val_p(x, ctx).map_or(true, |v| v >= 0)
}

/// The representative of `x mod Z_p` in `Z[1/p] ∩ [0, 1)`.
pub fn frac_p(x: &Rat, ctx: &PrimeCtx) -> Rat {
    let k = val_int(x.denom(), ctx.p);
    if k == 0 {
        return Rat::zero();
    }
    let pk = num_traits::pow(BigInt::from(ctx.p), k as usize);
    let m = x.denom() / &pk;
    let minv = m.mod_floor(&pk).modinv(&pk).expect("unit mod p^k");
    let c = (x.numer() * minv).mod_floor(&pk);
    Rat::new(c, pk)
}

/// `psi_p(x) = exp(-2 pi i frac_p(x))`, trivial on `Z_p`.
pub fn psi_p(x: &Rat, ctx: &PrimeCtx) -> Complex64 {
    let f = frac_p(x, ctx).to_f64().unwrap_or(0.0);
    Complex64::from_polar(1.0, -2.0 * PI * f)
}

/// `psi_p(a / p^k)` for machine integers.
pub fn psi_int(a: i128, k: u32, p: i128) -> Complex64 {
    let pk = p.pow(k);
    let c = a.rem_euclid(pk);
    Complex64::from_polar(1.0, -2.0 * PI * (c as f64) / (pk as f64))
}

pub fn pow_p(p: i128, k: u32) -> i128 {
    p.pow(k)
}

/// Valuation of a machine integer, `None` at zero.
pub fn vp_i128(mut x: i128, p: i128) -> Option<i64> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Residue of a p-integral rational modulo `p^k`, or `None` if `x` is not
/// p-integral.
pub fn residue(x: &Rat, ctx: &PrimeCtx, k: u32) -> Option<i128> {
    if !is_integral(x, ctx) {
        return None;
    }
    let pk = BigInt::from(ctx.pi().pow(k));
    let dinv = x.denom().mod_floor(&pk).modinv(&pk)?;
    (x.numer() * dinv).mod_floor(&pk).to_i128()
}

/// Representatives of `prod_i p^{-N_i} Z_p / p^{M_i} Z_p`.
///
/// A representative is the vector of integer numerators `a_i` with
/// `0 <= a_i < p^{N_i + M_i}`; the point it stands for is `a_i / p^{N_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeQuotient {
    p: i128,
    lower: Vec<u32>,
    upper: Vec<u32>,
}

impl LatticeQuotient {
    pub fn new(ctx: &PrimeCtx, dim: usize, lower: u32, upper: u32) -> Self {
        Self::per_axis(ctx, vec![lower; dim], vec![upper; dim])
    }

    pub fn per_axis(ctx: &PrimeCtx, lower: Vec<u32>, upper: Vec<u32>) -> Self {
        assert_eq!(lower.len(), upper.len(), "axis count mismatch");
        Self { p: ctx.pi(), lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[u32] {
        &self.lower
    }

    pub fn upper(&self) -> &[u32] {
        &self.upper
    }

    /// The same quotient with every upper exponent raised by one.
    pub fn refined(&self) -> Self {
        Self { p: self.p, lower: self.lower.clone(), upper: self.upper.iter().map(|m| m + 1).collect() }
    }

    pub fn count(&self) -> u128 {
        self.lower.iter().zip(&self.upper).map(|(n, m)| self.p.pow(n + m) as u128).product()
    }

    /// Haar measure of a single representative's coset.
    pub fn cell_measure(&self) -> Rat {
        let total: i64 = self.upper.iter().map(|&m| m as i64).sum();
        p_pow(self.p as u64, -total)
    }

    /// Visit every representative in lexicographic order.
    pub fn for_each(&self, mut f: impl FnMut(&[i128])) {
        let sizes: Vec<i128> = self.lower.iter().zip(&self.upper).map(|(n, m)| self.p.pow(n + m)).collect();
        let mut a = vec![0i128; sizes.len()];
        loop {
            f(&a);
            let mut i = a.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                a[i] += 1;
                if a[i] < sizes[i] {
                    break;
                }
                a[i] = 0;
            }
        }
    }

    /// `#{reps : pred} * p^{-sum M}`.
    pub fn measure(&self, pred: impl Fn(&[i128]) -> bool) -> Rat {
        let mut n: u128 = 0;
        self.for_each(|a| {
            if pred(a) {
                n += 1;
            }
        });
        Rat::from_integer(BigInt::from(n)) * self.cell_measure()
    }

    /// `sum_reps f(rep) * p^{-sum M}`.
    pub fn char_sum(&self, f: impl Fn(&[i128]) -> Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        let mut comp = Complex64::zero();
        self.for_each(|a| {
            let y = f(a) - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        });
        acc * self.cell_measure().to_f64().unwrap_or(0.0)
    }

    /// `measure`, confirmed unchanged after one refinement step.
    pub fn measure_stable(&self, pred: impl Fn(&[i128]) -> bool) -> Result<Rat> {
        let coarse = self.measure(&pred);
        let fine = self.refined().measure(&pred);
        if coarse != fine {
            return Err(Error::ResolutionUnstable { coarse: format!("{coarse}"), fine: format!("{fine}") });
        }
        Ok(coarse)
    }

    /// `char_sum`, confirmed unchanged (to `1e-9`) after one refinement step.
    pub fn char_sum_stable(&self, f: impl Fn(&[i128]) -> Complex64) -> Result<Complex64> {
        let coarse = self.char_sum(&f);
        let fine = self.refined().char_sum(&f);
        if (coarse - fine).norm() > 1e-9 * coarse.norm().max(1.0) {
            return Err(Error::ResolutionUnstable { coarse: format!("{coarse}"), fine: format!("{fine}") });
        }
        Ok(coarse)
    }
}

/// Measure of `(c1 + p^e1 Z_p) ∩ (c2 + p^e2 Z_p)`. Two p-adic balls are
/// either disjoint or nested.
pub fn ball_intersection_measure(c1: &Rat, e1: i64, c2: &Rat, e2: i64, ctx: &PrimeCtx) -> Rat {
    let (small, big) = if e1 >= e2 { (e1, e2) } else { (e2, e1) };
    let d = c1 - c2;
    match val_p(&d, ctx) {
        Some(v) if v < big => Rat::zero(),
        _ => ctx.pow(-small),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongruenceVariant {
    /// `b^2 ≡ D`.
    Plain,
    /// `b^2 - b ≡ (D - 1)/4`.
    Shifted,
}

/// Number of residues `b mod p^alpha` solving the congruence.
pub fn count_sqrt_cong(d: i64, alpha: u32, variant: CongruenceVariant, ctx: &PrimeCtx) -> Result<u64> {
    if variant == CongruenceVariant::Shifted && d.rem_euclid(4) != 1 {
        return Err(Error::ShiftedNeedsOneMod4(d));
    }
    let pa = ctx.pi().pow(alpha);
    let target = match variant {
        CongruenceVariant::Plain => d as i128,
        CongruenceVariant::Shifted => ((d - 1) / 4) as i128,
    };
    let shift = if variant == CongruenceVariant::Shifted { 1 } else { 0 };
    Ok((0..pa).filter(|&b| (b * b - shift * b - target).rem_euclid(pa) == 0).count() as u64)
}

/// `1` if `x` is a unit and `0` otherwise, for `x` p-integral.
pub fn is_unit(x: &Rat, ctx: &PrimeCtx) -> bool {
    val_p(x, ctx) == Some(0)
}

/// Largest power `p^k` dividing every numerator is `k`; handy for
/// reducing rational data to machine integers.
pub fn min_val<'a>(xs: impl IntoIterator<Item = &'a Rat>, ctx: &PrimeCtx) -> Option<i64> {
    xs.into_iter().filter_map(|x| val_p(x, ctx)).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{int, rat};

    fn ctx(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    #[test]
    fn primes() {
        assert!(PrimeCtx::new(7).is_ok());
        assert_eq!(PrimeCtx::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeCtx::new(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn valuations() {
        let c = ctx(5);
        assert_eq!(val_p(&int(50), &c), Some(2));
        assert_eq!(val_p(&rat(3, 25), &c), Some(-2));
        assert_eq!(val_p(&int(0), &c), None);
    }

    #[test]
    fn character_values() {
        let c5 = ctx(5);
        assert!((psi_p(&int(7), &c5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((psi_p(&rat(1, 2), &ctx(2)) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let s: Complex64 = (0..5).map(|a| psi_p(&rat(a, 5), &c5)).sum();
        assert!(s.norm() < 1e-12);
        // 1/10 = 3/5 mod Z_5 since 1/2 ≡ 3 mod 5.
        assert_eq!(frac_p(&rat(1, 10), &c5), rat(3, 5));
    }

    #[test]
    fn measures() {
        let c3 = ctx(3);
        let lq = LatticeQuotient::new(&c3, 1, 1, 1);
        assert_eq!(lq.measure(|a| a[0] % 3 == 0), int(1));
        assert_eq!(lq.measure(|_| true), int(3));

        // x = a/4; x in 1/2 + Z_2 and x^2 in Z_2 never happen together.
        let c2 = ctx(2);
        let lq = LatticeQuotient::new(&c2, 1, 2, 2);
        let m = lq.measure(|a| {
            let x = rat(a[0] as i64, 4);
            is_integral(&(x.clone() - rat(1, 2)), &c2) && is_integral(&(&x * &x), &c2)
        });
        assert_eq!(m, int(0));
    }

    #[test]
    fn character_sums() {
        let c5 = ctx(5);
        let z = LatticeQuotient::new(&c5, 1, 0, 1).char_sum(|a| psi_int(a[0], 0, 5));
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let lq = LatticeQuotient::new(&c5, 1, 1, 1);
        assert!(lq.char_sum(|a| psi_int(a[0], 1, 5)).norm() < 1e-12);
        let one_coset = lq.char_sum(|a| if a[0] % 5 == 1 { psi_int(a[0], 1, 5) } else { Complex64::zero() });
        let want = Complex64::from_polar(1.0, -2.0 * PI / 5.0);
        assert!((one_coset - want).norm() < 1e-12);
    }

    #[test]
    fn stability_detects_coarse_grids() {
        let c3 = ctx(3);
        let lq = LatticeQuotient::new(&c3, 1, 0, 1);
        // x in 9 Z_3 needs M >= 2.
        let pred = |a: &[i128]| a[0] % 9 == 0;
        assert!(matches!(lq.measure_stable(pred), Err(Error::ResolutionUnstable { .. })));
        assert_eq!(lq.refined().measure_stable(pred).unwrap(), rat(1, 9));
    }

    #[test]
    fn congruence_counts() {
        let c5 = ctx(5);
        assert_eq!(count_sqrt_cong(-1, 1, CongruenceVariant::Plain, &c5).unwrap(), 2);
        assert_eq!(count_sqrt_cong(2, 1, CongruenceVariant::Plain, &c5).unwrap(), 0);
        assert_eq!(count_sqrt_cong(5, 1, CongruenceVariant::Shifted, &c5).unwrap(), 1);
        assert_eq!(count_sqrt_cong(-1, 0, CongruenceVariant::Plain, &c5).unwrap(), 1);
        assert_eq!(count_sqrt_cong(3, 1, CongruenceVariant::Shifted, &c5), Err(Error::ShiftedNeedsOneMod4(3)));
    }

    #[test]
    fn balls() {
        let c3 = ctx(3);
        assert_eq!(ball_intersection_measure(&int(0), 0, &int(1), 1, &c3), rat(1, 3));
        assert_eq!(ball_intersection_measure(&int(0), 1, &int(1), 1, &c3), int(0));
        assert_eq!(ball_intersection_measure(&rat(1, 3), -1, &int(0), 0, &c3), int(1));
        assert_eq!(ball_intersection_measure(&rat(1, 3), 0, &int(0), 0, &c3), int(0));
    }
}
