use num_complex::Complex64;
use num_traits::One;
use spinverify_core::arch::quadrature::{integrate_to_inf, QuadConfig};
use spinverify_core::arch::{
    contour_closed, contour_integral_check, i_infty_gamma_check, q_v_eval, IInftyForm, SiegelPoint,
};
use spinverify_core::gsp4::{gsp4z_word, j4, make_gsp};
use spinverify_core::siegel::{enumerate_shell, modularity_check, pd_eval, ShellConvention};

#[test]
fn contour_matches_residue() {
    let cfg = QuadConfig::default();
    for r in [3u32, 4] {
        let c = contour_integral_check(r, 0.75, 120.0, &cfg).unwrap();
        assert!(c.rel_error < 1e-7, "r = {r}: {}", c.rel_error);
    }
    // (-2 pi i)^2 e^{-2 pi} / 1!
    let v = contour_closed(2, 1.0);
    let want = -4.0 * std::f64::consts::PI.powi(2) * (-2.0 * std::f64::consts::PI).exp();
    assert!((v - Complex64::new(want, 0.0)).norm() < 1e-15);
}

#[test]
fn gamma_profile_against_laplace_transform() {
    let cfg = QuadConfig::default();
    // int_0^inf t^{a-1} e^{-4 pi t} dt = Gamma(a) (4 pi)^{-a}, computed independently.
    let a: f64 = 2.0 * 1.25 + 6.0 - 2.0;
    let lt = integrate_to_inf(|t| t.powf(a - 1.0) * (-4.0 * std::f64::consts::PI * t).exp(), 0.0, &cfg).unwrap();
    let rep = i_infty_gamma_check(6, -1, &[1.25], IInftyForm::Trace, &cfg).unwrap();
    assert!((rep.closed[0] / lt - 1.0).abs() < 1e-10);
    let rep = i_infty_gamma_check(6, -7, &[0.75, 1.0, 1.25], IInftyForm::AsDisplayed, &cfg).unwrap();
    assert!(rep.spread < 1e-8);
}

#[test]
fn q_v_at_scaled_identity() {
    // Z = c i: Q_v = A c^2 - C + i c (B3 - B1).
    let z = SiegelPoint::i_scaled(2.0);
    let q = q_v_eval(&[1.0, 0.0, 0.0, 0.0, 0.0], &z);
    assert!((q - Complex64::new(4.0, 0.0)).norm() < 1e-14);
    let q = q_v_eval(&[0.0, 1.0, 0.0, 0.0, 0.0], &z);
    assert!((q - Complex64::new(0.0, -2.0)).norm() < 1e-14);
}

#[test]
fn lattice_sum_modular_under_words() {
    let z = SiegelPoint::new([0.1, 0.05, -0.2], [1.3, 0.2, 1.1]).unwrap();
    let shell = enumerate_shell(-1, 10.0, ShellConvention::Generic).unwrap();
    let value = pd_eval(&shell, 10, &z).unwrap();
    assert!(value.tail_bound.is_finite() && value.terms == shell.len());
    for word in [&[2usize, 5][..], &[7, 1, 3]] {
        let g = gsp4z_word(word);
        if !g.nu().is_one() {
            continue;
        }
        let rep = modularity_check(&shell, 10, &z, &g).unwrap();
        assert!(rep.abs_defect <= rep.abs_bound, "{word:?}: {} > {}", rep.abs_defect, rep.abs_bound);
        assert!(rep.transported_defect < 1e-9);
    }
    let inv = make_gsp(j4()).unwrap();
    let rep = modularity_check(&shell, 10, &z, &inv).unwrap();
    assert!(rep.within_bound());
}
