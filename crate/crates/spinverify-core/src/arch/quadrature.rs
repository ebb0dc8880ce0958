//! Adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Equal panels before any adaptive splitting.
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-12, initial_panels: 8, max_panels: 20_000 }
    }
}

impl QuadConfig {
    pub fn with_panels(mut self, n: usize) -> Self {
        self.initial_panels = n.max(1);
        self
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    Panel { a, b, value: k * h, error: ((k - g) * h).norm() }
}

fn pairwise(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::zero(),
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

/// `int_a^b f`. Panels are split worst-first and summed pairwise in
/// left-to-right order, so results are reproducible bit for bit.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let n = cfg.initial_panels.max(1);
    let h = (b - a) / n as f64;
    let mut panels: Vec<Panel> = (0..n).map(|i| gk15(&f, a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 })).collect();
    loop {
        let total = pairwise(&panels.iter().map(|p| p.value).collect::<Vec<_>>());
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Quadrature(f64::NAN));
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            return Ok(Estimate { value: total, error: err, panels: panels.len() });
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::Quadrature(err));
        }
        let worst = (0..panels.len()).fold(0, |w, i| if panels[i].error > panels[w].error { i } else { w });
        let Panel { a, b, .. } = panels[worst];
        let m = 0.5 * (a + b);
        panels[worst] = gk15(&f, a, m);
        panels.insert(worst + 1, gk15(&f, m, b));
    }
}

pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(integrate(|x| Complex64::new(f(x), 0.0), a, b, cfg)?.value.re)
}

/// `int_a^inf f` through `x = a + t / (1 - t)`.
pub fn integrate_to_inf(f: impl Fn(f64) -> f64, a: f64, cfg: &QuadConfig) -> Result<f64> {
    let g = |t: f64| {
        let u = 1.0 - t;
        f(a + t / u) / (u * u)
    };
    integrate_real(g, 0.0, 1.0, cfg)
}

/// `int_R f` through `x = t / (1 - t^2)`.
pub fn integrate_line(f: impl Fn(f64) -> f64, cfg: &QuadConfig) -> Result<f64> {
    let g = |t: f64| {
        let u = 1.0 - t * t;
        f(t / u) * (1.0 + t * t) / (u * u)
    };
    integrate_real(g, -1.0, 1.0, cfg)
}
