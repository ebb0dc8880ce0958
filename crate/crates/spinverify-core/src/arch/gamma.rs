//! Complex Gamma function.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation with reflection for `Re z < 1/2`.
pub fn gamma_fn(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::GammaPole(z.re));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    let pi = core::f64::consts::PI;
    if z.re < 0.5 {
        let s = (z * pi).sin();
        return Complex64::new(pi, 0.0) / (s * gamma_unchecked(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (k, c) in COEF.iter().enumerate().skip(1) {
        x += *c / (z + k as f64);
    }
    let t = z + G + 0.5;
    let two_pi_sqrt = (2.0 * pi).sqrt();
    x * two_pi_sqrt * t.powc(z + 0.5) * (-t).exp()
}

/// `Gamma(x)` for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma_fn(Complex64::new(x, 0.0))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn known_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_real(0.5).unwrap() - core::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(6.0).unwrap() - 120.0).abs() < 1e-10);
        assert!((gamma_real(2.0).unwrap() * gamma_real(6.0).unwrap() - 120.0).abs() < 1e-10);
        assert!((gamma_real(-0.5).unwrap() + 2.0 * core::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_real(x), Err(Error::GammaPole(_))));
        }
    }

    proptest! {
        #[test]
        fn functional_equation(re in -6.0f64..12.0, im in -5.0f64..5.0) {
            let z = Complex64::new(re, im);
            prop_assume!((z - z.re.round()).norm() > 1e-3 || z.re.round() > 0.0);
            let lhs = gamma_fn(z + 1.0).unwrap();
            let rhs = z * gamma_fn(z).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-12, "{lhs} {rhs}");
        }

        #[test]
        fn reflection(x in 0.05f64..0.95) {
            let pi = core::f64::consts::PI;
            let prod = gamma_real(x).unwrap() * gamma_real(1.0 - x).unwrap();
            prop_assert!((prod - pi / (pi * x).sin()).abs() / prod < 1e-13);
        }
    }
}
