//! The lattice sum `P_D(Z) = sum_{v in V5(Z), q(v) = -|D|} Q_v(Z)^{-r}` on the
//! Siegel upper half space, with a rigorous truncation bound.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{SMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::arch::{act_h2, q_v_eval, RealGsp, SiegelPoint};
use crate::error::{Error, Result};
use crate::exact_algebra::{int, rat, Rat};
use crate::gsp4::{act_v5, Branch, GSpElement, QuadExt, V5Vector};

/// Which lattice and target value define the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShellConvention {
    /// All coordinates integral and `q(v) = -|D|`.
    Generic,
    /// `2 B2` integral and `q(v) = D/4`, the scaling of `v_D` when `D = 1 mod 4`.
    HalfIntegral,
}

impl ShellConvention {
    /// The convention matching `q(v_D)`.
    pub fn natural(ext: &QuadExt) -> Self {
        match ext.branch() {
            Branch::NotOneMod4 => Self::Generic,
            Branch::OneMod4 => Self::HalfIntegral,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::HalfIntegral => "half-integral",
        }
    }

    /// `4 q(v)` on the shell.
    fn target4(&self, d: i64) -> i64 {
        match self {
            Self::Generic => -4 * d.abs(),
            Self::HalfIntegral => d,
        }
    }

    fn q_abs(&self, d: i64) -> f64 {
        match self {
            Self::Generic => d.unsigned_abs() as f64,
            Self::HalfIntegral => d.unsigned_abs() as f64 / 4.0,
        }
    }

    /// Spacing of `B2`.
    fn b2_step(&self) -> f64 {
        match self {
            Self::Generic => 1.0,
            Self::HalfIntegral => 0.5,
        }
    }
}

/// Shell vectors stored as `(A, B1, 2 B2, B3, C)`.
pub type ScaledCoords = [i64; 5];

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeShell {
    d: i64,
    radius: f64,
    convention: ShellConvention,
    vectors: Vec<ScaledCoords>,
}

impl LatticeShell {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn convention(&self) -> ShellConvention {
        self.convention
    }

    pub fn scaled(&self) -> &[ScaledCoords] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = V5Vector> + '_ {
        self.vectors.iter().map(to_v5)
    }

    pub fn contains(&self, v: &V5Vector) -> bool {
        from_v5(v).is_some_and(|s| self.vectors.binary_search(&s).is_ok())
    }
}

pub fn to_v5(s: &ScaledCoords) -> V5Vector {
    V5Vector::new(int(s[0]), int(s[1]), rat(s[2], 2), int(s[3]), int(s[4]))
}

pub fn from_v5(v: &V5Vector) -> Option<ScaledCoords> {
    let two_b2 = v.b2() * int(2);
    let c = [v.a().clone(), v.b1().clone(), two_b2, v.b3().clone(), v.cc().clone()];
    let mut out = [0i64; 5];
    for (o, x) in out.iter_mut().zip(&c) {
        if !x.is_integer() {
            return None;
        }
        *o = i64::try_from(x.to_integer()).ok()?;
    }
    Some(out)
}

pub fn to_f64(s: &ScaledCoords) -> [f64; 5] {
    [s[0] as f64, s[1] as f64, s[2] as f64 / 2.0, s[3] as f64, s[4] as f64]
}

fn norm2_x4(s: &ScaledCoords) -> i64 {
    4 * (s[0] * s[0] + s[1] * s[1] + s[3] * s[3] + s[4] * s[4]) + 2 * s[2] * s[2]
}

fn validate(d: i64, convention: ShellConvention) -> Result<()> {
    if d >= 0 {
        return Err(Error::BadDiscriminant(d));
    }
    let ext = QuadExt::new(d)?;
    if convention == ShellConvention::HalfIntegral && ext.branch() != Branch::OneMod4 {
        return Err(Error::ShiftedNeedsOneMod4(d));
    }
    Ok(())
}

/// Shell vectors with first coordinate `a`, in lexicographic order.
pub fn enumerate_slab(d: i64, radius: f64, convention: ShellConvention, a: i64) -> Vec<ScaledCoords> {
    let lim4 = 4.0 * radius * radius;
    let fits = |n4: i64| (n4 as f64) <= lim4;
    let r = radius.floor() as i64;
    let target = convention.target4(d);
    let t_step = match convention {
        ShellConvention::Generic => 2,
        ShellConvention::HalfIntegral => 1,
    };
    let t_max = (radius * 2.0f64.sqrt()).floor() as i64;
    let mut out = Vec::new();
    if !fits(4 * a * a) {
        return out;
    }
    for b1 in -r..=r {
        for t in (-t_max..=t_max).filter(|t| t % t_step == 0) {
            for b3 in -r..=r {
                let partial = 4 * (a * a + b1 * b1 + b3 * b3) + 2 * t * t;
                if !fits(partial) {
                    continue;
                }
                let rest = target - 4 * b1 * b3 - t * t;
                if a != 0 {
                    if rest % (4 * a) == 0 {
                        let c = rest / (4 * a);
                        if fits(partial + 4 * c * c) {
                            out.push([a, b1, t, b3, c]);
                        }
                    }
                } else if rest == 0 {
                    for c in -r..=r {
                        if fits(partial + 4 * c * c) {
                            out.push([a, b1, t, b3, c]);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The slabs `a` that [`enumerate_shell`] visits.
pub fn slab_range(radius: f64) -> core::ops::RangeInclusive<i64> {
    let r = radius.floor() as i64;
    -r..=r
}

/// Assemble slabs computed elsewhere (possibly in parallel).
pub fn shell_from_slabs(d: i64, radius: f64, convention: ShellConvention, slabs: Vec<Vec<ScaledCoords>>) -> Result<LatticeShell> {
    validate(d, convention)?;
    let mut vectors: Vec<ScaledCoords> = slabs.into_iter().flatten().collect();
    vectors.sort_unstable();
    Ok(LatticeShell { d, radius, convention, vectors })
}

/// All `v` in the lattice with the convention's `q(v)` and `||v|| <= radius`.
pub fn enumerate_shell(d: i64, radius: f64, convention: ShellConvention) -> Result<LatticeShell> {
    validate(d, convention)?;
    if radius <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let slabs = slab_range(radius).map(|a| enumerate_slab(d, radius, convention, a)).collect();
    shell_from_slabs(d, radius, convention, slabs)
}

/// Compensated complex summation in the given order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// `u(X) diag(Y^{1/2}, Y^{-1/2})`, which sends `i` to `Z`, with `nu = 1`.
pub fn standard_g(z: &SiegelPoint) -> Result<RealGsp> {
    let [y11, y12, y22] = z.y();
    let x = [z.z()[0][0].re, z.z()[0][1].re, z.z()[1][1].re];
    let s = z.det_y().sqrt();
    let t = (y11 + y22 + 2.0 * s).sqrt();
    let h = [[(y11 + s) / t, y12 / t], [y12 / t, (y22 + s) / t]];
    let dh = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let hinv = [[h[1][1] / dh, -h[0][1] / dh], [-h[1][0] / dh, h[0][0] / dh]];
    let m = [
        [h[0][0], h[0][1], 0.0, 0.0],
        [h[1][0], h[1][1], 0.0, 0.0],
        [0.0, 0.0, hinv[0][0], hinv[0][1]],
        [0.0, 0.0, hinv[1][0], hinv[1][1]],
    ];
    let n = [[1.0, 0.0, x[0], x[1]], [0.0, 1.0, x[1], x[2]], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let prod: [[f64; 4]; 4] = core::array::from_fn(|i| core::array::from_fn(|j| (0..4).map(|k| n[i][k] * m[k][j]).sum()));
    RealGsp::new(prod)
}

/// The map `v -> v g` in coordinates orthonormal for `||.||`, i.e. with
/// `B2` scaled by `sqrt 2`.
pub fn orthonormal_action(g: &RealGsp) -> SMatrix<f64, 5, 5> {
    let s = [1.0, 1.0, 2.0f64.sqrt(), 1.0, 1.0];
    let mut n = SMatrix::<f64, 5, 5>::zeros();
    for k in 0..5 {
        let mut e = [Complex64::zero(); 5];
        e[k] = Complex64::new(1.0 / s[k], 0.0);
        let img = crate::arch::act_c5(&e, g);
        for i in 0..5 {
            n[(i, k)] = img[i].re * s[i];
        }
    }
    n
}

/// Smallest and largest singular values.
pub fn singular_range(n: &SMatrix<f64, 5, 5>) -> (f64, f64) {
    let ev = SymmetricEigen::new(n.transpose() * n).eigenvalues;
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let hi = ev.iter().cloned().fold(0.0, f64::max);
    (lo.sqrt(), hi.sqrt())
}

/// `sum_{t >= t0, lattice points with ||v||_* in [t, t+1)} (c t^2 + 2|q|)^{-r/2}`
/// for a Euclidean norm `||.||_*` in which the lattice has covolume `covol`
/// and its cells have circumradius `rho`.
fn annulus_sum(t0: f64, c: f64, q2: f64, rho: f64, covol: f64, r: u32) -> f64 {
    let ball = 8.0 * PI * PI / 15.0;
    let half_r = r as f64 / 2.0;
    let steps = (3.0 * t0).ceil() as usize + 64 + (2.0 * rho).ceil() as usize;
    let mut sum = 0.0;
    for m in 0..steps {
        let t = t0 + m as f64;
        let count = ball * ((t + 1.0 + rho).powi(5) - (t - rho).max(0.0).powi(5)) / covol;
        sum += count * (c * t * t + q2).powf(-half_r);
    }
    // Past T = t0 + steps >= 1 + rho: count <= 5 (1 + 2 rho) (2t)^4 ball / covol
    // and sum_{t >= T} t^{4-r} <= (T-1)^{5-r} / (r-5).
    let big_t = t0 + steps as f64;
    let rest = ball / covol * 5.0 * (1.0 + 2.0 * rho) * 16.0 * c.powf(-half_r) * (big_t - 1.0).powf(5.0 - r as f64) / (r as f64 - 5.0);
    sum + rest
}

/// `sum_{v in lattice, ||v|| > R} |Q_v(Z)|^{-r}` bounded from above.
///
/// With `g = standard_g(Z)`, `|Q_v(Z)|^2 = det(Y) (||v g||^2 + 2|q|)` and
/// `||v g|| >= sigma_min ||v||`. Lattice points are counted by the volume
/// of the annulus their cells fill, either in `||v||` or in `||v g||`; the
/// smaller of the two bounds is returned. See the README.
pub fn tail_bound(d: i64, convention: ShellConvention, r: u32, z: &SiegelPoint, radius: f64) -> Result<f64> {
    if r < 6 {
        return Err(Error::InvalidArgument("the lattice sum needs r >= 6".into()));
    }
    let g = standard_g(z)?;
    let n = orthonormal_action(&g);
    let (lo, hi) = singular_range(&n);
    if lo <= 0.0 {
        return Err(Error::Singular);
    }
    let q2 = 2.0 * convention.q_abs(d);
    let s = convention.b2_step();
    let covol = 2.0f64.sqrt() * s;
    let rho = 0.5 * (4.0 + 2.0 * s * s).sqrt();
    let plain = annulus_sum(radius, lo * lo, q2, rho, covol, r);
    let moved = annulus_sum(lo * radius, 1.0, q2, rho * hi, covol * n.determinant().abs(), r);
    Ok(z.det_y().powf(-(r as f64) / 2.0) * plain.min(moved))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Partial sum over the shell in stored order, with its tail bound.
pub fn pd_eval(shell: &LatticeShell, r: u32, z: &SiegelPoint) -> Result<PdValue> {
    let tail = tail_bound(shell.d, shell.convention, r, z, shell.radius)?;
    let mut acc = KahanC::default();
    for s in &shell.vectors {
        acc.add(q_v_eval(&to_f64(s), z).powi(-(r as i32)));
    }
    Ok(PdValue { value: acc.value(), tail_bound: tail, terms: shell.len() })
}

/// Smallest radius of the form `R 2^k` whose tail bound is below `tol`.
pub fn suggest_radius(d: i64, convention: ShellConvention, r: u32, z: &SiegelPoint, radius: f64, tol: f64) -> Result<f64> {
    let mut rad = radius.max(1.0);
    for _ in 0..24 {
        if tail_bound(d, convention, r, z, rad)? <= tol {
            return Ok(rad);
        }
        rad *= 2.0;
    }
    Err(Error::InvalidArgument("no radius reaches the requested tail tolerance".into()))
}

/// Like [`pd_eval`], failing when the tail bound exceeds `tol`.
pub fn pd_eval_within(shell: &LatticeShell, r: u32, z: &SiegelPoint, tol: f64) -> Result<PdValue> {
    let v = pd_eval(shell, r, z)?;
    if v.tail_bound > tol {
        let suggested = suggest_radius(shell.d, shell.convention, r, z, shell.radius, tol)?;
        return Err(Error::RadiusTooSmall { radius: shell.radius, bound: v.tail_bound, suggested });
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularityReport {
    /// `P_R(gamma Z) j(gamma, Z)^{-r}`.
    pub lhs: Complex64,
    /// `P_R(Z)`.
    pub rhs: Complex64,
    pub j: Complex64,
    pub defect: f64,
    /// `(tail(Z) + |j|^{-r} tail(gamma Z)) / |P_R(Z)|`.
    pub defect_bound: f64,
    /// `|lhs - rhs|` and the unnormalized bound.
    pub abs_defect: f64,
    pub abs_bound: f64,
    /// Same comparison with the shell moved by `gamma^{-1}`; zero up to rounding.
    pub transported_defect: f64,
    pub terms: usize,
}

impl ModularityReport {
    pub fn within_bound(&self) -> bool {
        self.defect <= self.defect_bound
    }
}

fn check_integral_sp4(gamma: &GSpElement) -> Result<()> {
    if !gamma.nu().is_one() || gamma.mat().iter().flatten().any(|x| !x.is_integer()) {
        return Err(Error::WrongShape("gamma must lie in Sp4(Z)".into()));
    }
    Ok(())
}

pub fn modularity_check(shell: &LatticeShell, r: u32, z: &SiegelPoint, gamma: &GSpElement) -> Result<ModularityReport> {
    check_integral_sp4(gamma)?;
    let g = RealGsp::from_gsp(gamma);
    let (gz, j) = act_h2(&g, z)?;
    let here = pd_eval(shell, r, z)?;
    let there = pd_eval(shell, r, &gz)?;
    let jr = j.powi(-(r as i32));
    let lhs = there.value * jr;
    let rhs = here.value;
    if rhs.norm() == 0.0 {
        return Err(Error::InvalidArgument("P_R(Z) vanishes".into()));
    }
    let abs_defect = (lhs - rhs).norm();
    let abs_bound = here.tail_bound + jr.norm() * there.tail_bound;
    let (defect, defect_bound) = (abs_defect / rhs.norm(), abs_bound / rhs.norm());
    let ginv = gamma.inverse();
    let mut moved = KahanC::default();
    for v in shell.vectors() {
        let u = act_v5(&v, &ginv).to_f64();
        moved.add(q_v_eval(&u, &gz).powi(-(r as i32)));
    }
    let transported_defect = (moved.value() * jr - rhs).norm() / rhs.norm();
    Ok(ModularityReport { lhs, rhs, j, defect, defect_bound, abs_defect, abs_bound, transported_defect, terms: shell.len() })
}

/// Operator norm of `v -> v gamma` for `||.||`.
pub fn op_norm(gamma: &GSpElement) -> f64 {
    singular_range(&orthonormal_action(&RealGsp::from_gsp(gamma))).1
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    /// Every image lies in the lattice with the same `q`.
    pub closed: bool,
    /// Images falling outside the radius.
    pub escaped: usize,
    /// Every escaping vector satisfies `||v|| >= R / ||gamma||_op`.
    pub annulus_ok: bool,
    pub op_norm: f64,
}

/// Move the shell by `gamma` and compare with itself.
pub fn shell_transport(shell: &LatticeShell, gamma: &GSpElement) -> Result<TransportReport> {
    check_integral_sp4(gamma)?;
    let op = op_norm(gamma);
    let inner = shell.radius / op;
    let r4 = 4.0 * shell.radius * shell.radius;
    let target = shell.convention.target4(shell.d);
    let (mut closed, mut escaped, mut annulus_ok) = (true, 0, true);
    for s in &shell.vectors {
        let u = act_v5(&to_v5(s), gamma);
        let Some(us) = from_v5(&u) else {
            closed = false;
            continue;
        };
        let step_ok = shell.convention == ShellConvention::HalfIntegral || us[2] % 2 == 0;
        if !step_ok || u.q() * int(4) != Rat::from_integer(target.into()) {
            closed = false;
        }
        if (norm2_x4(&us) as f64) > r4 {
            escaped += 1;
            let n = (norm2_x4(s) as f64 / 4.0).sqrt();
            if n < inner * (1.0 - 1e-12) {
                annulus_ok = false;
            }
        } else if shell.vectors.binary_search(&us).is_err() {
            closed = false;
        }
    }
    Ok(TransportReport { closed, escaped, annulus_ok, op_norm: op })
}

/// Translation invariance and inversion defect under one shell convention.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub convention: ShellConvention,
    pub shell_size: usize,
    /// The shell is carried into the lattice by the integral translations.
    pub translation_exact: bool,
    pub translation_defect: f64,
    pub translation_bound: f64,
    pub inversion: ModularityReport,
}

/// Run the diagnostics for each convention valid for `d`.
pub fn branch_conventions(d: i64, r: u32, z: &SiegelPoint, radius: f64) -> Result<Vec<BranchReport>> {
    let ext = QuadExt::new(d)?;
    let conventions: &[ShellConvention] = match ext.branch() {
        Branch::NotOneMod4 => &[ShellConvention::Generic],
        Branch::OneMod4 => &[ShellConvention::Generic, ShellConvention::HalfIntegral],
    };
    let translations = [[[1, 0], [0, 0]], [[0, 1], [1, 0]], [[0, 0], [0, 1]]].map(|x| {
        crate::gsp4::unipotent(&crate::gsp4::mat2(int(x[0][0]), int(x[0][1]), int(x[1][0]), int(x[1][1]))).expect("symmetric")
    });
    let inversion = crate::gsp4::make_gsp(crate::gsp4::j4())?;
    let mut out = Vec::new();
    for &c in conventions {
        let shell = enumerate_shell(d, radius, c)?;
        let mut exact = true;
        let (mut tdef, mut tbound) = (0.0f64, 0.0f64);
        for t in &translations {
            let rep = shell_transport(&shell, t)?;
            exact &= rep.closed && rep.annulus_ok;
            let m = modularity_check(&shell, r, z, t)?;
            tdef = tdef.max(m.defect);
            tbound = tbound.max(m.defect_bound);
        }
        out.push(BranchReport {
            convention: c,
            shell_size: shell.len(),
            translation_exact: exact,
            translation_defect: tdef,
            translation_bound: tbound,
            inversion: modularity_check(&shell, r, z, &inversion)?,
        });
    }
    Ok(out)
}
