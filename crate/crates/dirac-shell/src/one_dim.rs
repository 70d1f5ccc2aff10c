//! The one-dimensional delta-point theory: Weyl function, gamma-field,
//! Birman-Schwinger determinant, closed-form and numeric discrete spectra,
//! resolvent kernels, and a quadrature check of the abstract Green identity
//! for the boundary maps at the origin.

use ndarray::prelude::*;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{
    build_dirac_matrices, coupling_matrix, fundamental_solution, on_branch_cut,
    spectral_parameters, InteractionStrengths,
};
use crate::error::{Result, ShellError};
use crate::linalg;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Weyl function value M(z) = (i/2) diag(zeta, 1/zeta).
#[derive(Debug, Clone)]
pub struct WeylValue1D {
    pub z: Complex64,
    pub matrix: Array2<Complex64>,
}

pub fn weyl_1d(z: Complex64, m: f64) -> Result<WeylValue1D> {
    let sp = spectral_parameters(z, m)?;
    let half_i = c(0.0, 0.5);
    let matrix = array![
        [half_i * sp.zeta, c(0.0, 0.0)],
        [c(0.0, 0.0), half_i / sp.zeta],
    ];
    Ok(WeylValue1D { z, matrix })
}

/// gamma(z) applied to boundary data xi, evaluated at x != 0; this is the
/// matrix-vector product of the 1D fundamental solution with xi.
pub fn gamma_field_1d(
    z: Complex64,
    m: f64,
    xi: [Complex64; 2],
    x: f64,
) -> Result<[Complex64; 2]> {
    if x == 0.0 {
        return Err(ShellError::SingularPoint);
    }
    let sp = spectral_parameters(z, m)?;
    let sgn = if x > 0.0 { 1.0 } else { -1.0 };
    let pre = c(0.0, 0.5) * (c(0.0, 1.0) * sp.k * x.abs()).exp();
    Ok([
        pre * (sp.zeta * xi[0] + sgn * xi[1]),
        pre * (sgn * xi[0] + xi[1] / sp.zeta),
    ])
}

fn coupling_1d(s: &InteractionStrengths) -> Array2<Complex64> {
    let rep = build_dirac_matrices(1).expect("q = 1 representation");
    coupling_matrix(s, &rep, &[-1.0]).expect("unit normal")
}

/// det(I + P M(z)) for z anywhere off the essential spectrum.
pub fn bs_determinant_1d(z: Complex64, s: &InteractionStrengths) -> Result<Complex64> {
    let m = weyl_1d(z, s.m)?.matrix;
    let p = coupling_1d(s);
    let a = Array2::<Complex64>::eye(2) + p.dot(&m);
    Ok(a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]])
}

/// |det(I + P M(z))| on the gap; zero exactly at discrete eigenvalues.
pub fn bs_residual_1d(z: f64, s: &InteractionStrengths) -> Result<f64> {
    if s.m <= 0.0 {
        return Err(ShellError::EmptyGap(s.m));
    }
    if z.abs() >= s.m {
        return Err(ShellError::OnBranchCut(format!("{z}")));
    }
    Ok(bs_determinant_1d(c(z, 0.0), s)?.norm())
}

/// The rational eigenvalue equation (d/4 - 1) sqrt(m^2 - z^2) - (m tau + eta z);
/// vanishes exactly at the discrete eigenvalues and is numerically stable
/// near the branch points.
pub fn gap_equation_1d(z: f64, s: &InteractionStrengths) -> f64 {
    let kappa = (s.m * s.m - z * z).max(0.0).sqrt();
    (s.d() / 4.0 - 1.0) * kappa - (s.m * s.tau + s.eta * z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch1D {
    DEquals4,
    ZPlus,
    ZMinus,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eigenvalue1D {
    pub value: f64,
    pub branch: Branch1D,
    pub admissible: bool,
}

/// Crossover half-width around d = 4 below which the d = 4 branch is used;
/// the z_pm formula degenerates continuously to -m tau / eta there.
const D4_CROSSOVER: f64 = 1e-10;

/// Closed-form discrete spectrum. For d = 4 the single eigenvalue is
/// -m tau / eta; otherwise the two candidate roots are kept when they obey
/// the sign condition (d - 4)(m tau + eta z) > 0.
pub fn discrete_spectrum_1d_closed_form(s: &InteractionStrengths) -> Result<Vec<Eigenvalue1D>> {
    if s.m <= 0.0 {
        return Err(ShellError::EmptyGap(s.m));
    }
    if s.is_trivial() {
        return Ok(Vec::new());
    }
    let d = s.d();
    if (d - 4.0).abs() < D4_CROSSOVER {
        // d = 4 forces eta^2 = 4 + tau^2 + lambda^2 > 0
        return Ok(vec![Eigenvalue1D {
            value: -s.m * s.tau / s.eta,
            branch: Branch1D::DEquals4,
            admissible: true,
        }]);
    }
    let x = d / 4.0 - 1.0;
    let disc = (s.lambda * s.lambda + (d / 4.0 + 1.0).powi(2)).sqrt();
    let denom = s.eta * s.eta + x * x;
    let mut out = Vec::new();
    for (sign, branch) in [(1.0, Branch1D::ZPlus), (-1.0, Branch1D::ZMinus)] {
        let z = s.m * (-s.eta * s.tau + sign * x.abs() * disc) / denom;
        let admissible = (d - 4.0) * (s.m * s.tau + s.eta * z) > 0.0;
        if admissible && z.abs() < s.m {
            out.push(Eigenvalue1D { value: z, branch, admissible });
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out.dedup_by(|a, b| (a.value - b.value).abs() < 1e-12 * s.m);
    Ok(out)
}

/// Independent numeric spectrum: scan |det(I + P M(z))| on a uniform gap
/// grid, bracket the dips, and refine on the rational gap equation (sign
/// bisection where it changes sign, golden-section on |det| otherwise).
pub fn discrete_spectrum_1d_numeric(
    s: &InteractionStrengths,
    resolution: usize,
    tol: f64,
) -> Result<Vec<Eigenvalue1D>> {
    if s.m <= 0.0 {
        return Err(ShellError::EmptyGap(s.m));
    }
    if s.is_trivial() {
        return Ok(Vec::new());
    }
    let m = s.m;
    let n = resolution.max(64);
    let zs: Vec<f64> = (0..n).map(|i| -m + (i as f64 + 0.5) * (2.0 * m / n as f64)).collect();
    let vals: Vec<f64> = zs.iter().map(|&z| bs_residual_1d(z, s).unwrap()).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 1..n - 1 {
        let is_min = vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] < tol;
        if !is_min {
            continue;
        }
        let (lo, hi) = (zs[i - 1], zs[i + 1]);
        let root = refine_root(s, lo, hi, 1e-12 * m);
        if let Some(z) = root {
            if z.abs() < m {
                roots.push(z);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * m);

    // label by proximity to the analytic branches
    let closed = discrete_spectrum_1d_closed_form(s)?;
    let out = roots
        .into_iter()
        .map(|z| {
            let branch = closed
                .iter()
                .min_by(|a, b| (a.value - z).abs().total_cmp(&(b.value - z).abs()))
                .map(|e| e.branch)
                .unwrap_or(Branch1D::ZPlus);
            let admissible = (s.d() - 4.0) * (s.m * s.tau + s.eta * z) > 0.0
                || (s.d() - 4.0).abs() < D4_CROSSOVER;
            Eigenvalue1D { value: z, branch, admissible }
        })
        .collect();
    Ok(out)
}

fn refine_root(s: &InteractionStrengths, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let flo = gap_equation_1d(lo, s);
    let fhi = gap_equation_1d(hi, s);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo * fhi < 0.0 {
        let (mut a, mut b, mut fa) = (lo, hi, flo);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            let fm = gap_equation_1d(mid, s);
            if fm == 0.0 {
                return Some(mid);
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        return Some(0.5 * (a + b));
    }
    // tangential dip: golden-section on |det|
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = bs_residual_1d(x1, s).ok()?;
    let mut f2 = bs_residual_1d(x2, s).ok()?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = bs_residual_1d(x1, s).ok()?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = bs_residual_1d(x2, s).ok()?;
        }
    }
    let z = 0.5 * (a + b);
    let v = bs_residual_1d(z, s).ok()?;
    (v < 1e-6).then_some(z)
}

/// Correction kernel of the resolvent difference,
/// K(x, y) = -G_z(x) (I + P M(z))^{-1} P G_z(-y).
pub fn resolvent_correction_1d(
    z: Complex64,
    s: &InteractionStrengths,
    x: f64,
    y: f64,
) -> Result<Array2<Complex64>> {
    if on_branch_cut(z, s.m) {
        return Err(ShellError::OnBranchCut(format!("{z}")));
    }
    if x == 0.0 || y == 0.0 {
        return Err(ShellError::SingularPoint);
    }
    let det = bs_determinant_1d(z, s)?;
    if det.norm() < 1e-10 {
        return Err(ShellError::ResolventPole { z: z.re, margin: det.norm() });
    }
    let rep = build_dirac_matrices(1)?;
    let p = coupling_1d(s);
    let mw = weyl_1d(z, s.m)?.matrix;
    let a = Array2::eye(2) + p.dot(&mw);
    let ainv = linalg::inverse(&a)?;
    let gx = fundamental_solution(&rep, s.m, z, &[x])?;
    let gy = fundamental_solution(&rep, s.m, z, &[-y])?;
    Ok(gx.dot(&ainv).dot(&p).dot(&gy).mapv(|v| -v))
}

/// Full resolvent kernel G_z(x - y) plus the interaction correction.
pub fn resolvent_kernel_1d(
    z: Complex64,
    s: &InteractionStrengths,
    x: f64,
    y: f64,
) -> Result<Array2<Complex64>> {
    if x == y {
        return Err(ShellError::SingularPoint);
    }
    let rep = build_dirac_matrices(1)?;
    let free = fundamental_solution(&rep, s.m, z, &[x - y])?;
    Ok(free + resolvent_correction_1d(z, s, x, y)?)
}

/// A piecewise-smooth test function on the two half-lines, given by value and
/// derivative closures. Functions are expected to decay integrably.
pub struct PiecewiseFunction1D {
    pub value_minus: Box<dyn Fn(f64) -> [Complex64; 2]>,
    pub deriv_minus: Box<dyn Fn(f64) -> [Complex64; 2]>,
    pub value_plus: Box<dyn Fn(f64) -> [Complex64; 2]>,
    pub deriv_plus: Box<dyn Fn(f64) -> [Complex64; 2]>,
}

impl PiecewiseFunction1D {
    /// The explicit surjectivity witness with prescribed boundary data:
    /// Gamma_0 f = (c1, c2) and Gamma_1 f = (c3, c4). Each half-line closure
    /// carries the sign of its own side so the one-sided traces at 0 are the
    /// correct limits.
    pub fn witness(c1: Complex64, c2: Complex64, c3: Complex64, c4: Complex64) -> Self {
        let half_i = c(0.0, 0.5);
        let piece = move |sgn: f64, x: f64| -> [Complex64; 2] {
            let e = (-x.abs()).exp();
            [half_i * c2 * sgn * e + c3 * e, half_i * c1 * sgn * e + c4 * e]
        };
        let dpiece = move |sgn: f64, x: f64| -> [Complex64; 2] {
            // d/dx e^{-|x|} = -sgn(x) e^{-|x|} away from 0
            let v = piece(sgn, x);
            [-sgn * v[0], -sgn * v[1]]
        };
        PiecewiseFunction1D {
            value_minus: Box::new(move |x| piece(-1.0, x)),
            deriv_minus: Box::new(move |x| dpiece(-1.0, x)),
            value_plus: Box::new(move |x| piece(1.0, x)),
            deriv_plus: Box::new(move |x| dpiece(1.0, x)),
        }
    }

    fn gamma0(&self) -> [Complex64; 2] {
        // Gamma_0 f = -i sigma_1 (f(0+) - f(0-))
        let fp = (self.value_plus)(0.0);
        let fm = (self.value_minus)(0.0);
        let j = [fp[0] - fm[0], fp[1] - fm[1]];
        [c(0.0, -1.0) * j[1], c(0.0, -1.0) * j[0]]
    }

    fn gamma1(&self) -> [Complex64; 2] {
        let fp = (self.value_plus)(0.0);
        let fm = (self.value_minus)(0.0);
        [(fp[0] + fm[0]) * 0.5, (fp[1] + fm[1]) * 0.5]
    }
}

/// Quadrature layout for the half-line integrals.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature1D {
    pub half_length: f64,
    pub points_per_side: usize,
}

impl Default for Quadrature1D {
    fn default() -> Self {
        Quadrature1D { half_length: 40.0, points_per_side: 10_000 }
    }
}

fn apply_t(m: f64, v: [Complex64; 2], dv: [Complex64; 2]) -> [Complex64; 2] {
    // T f = -i sigma_1 f' + m sigma_3 f
    [c(0.0, -1.0) * dv[1] + m * v[0], c(0.0, -1.0) * dv[0] - m * v[1]]
}

fn dot2(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj()
}

/// Residual of the abstract Green identity
/// (Tf, g) - (f, Tg) - (Gamma_1 f, Gamma_0 g) + (Gamma_0 f, Gamma_1 g)
/// evaluated with composite Simpson quadrature on both half-lines.
pub fn green_identity_residual_1d(
    f: &PiecewiseFunction1D,
    g: &PiecewiseFunction1D,
    m: f64,
    quad: Quadrature1D,
) -> f64 {
    let n = quad.points_per_side | 1; // odd point count for Simpson
    let simpson_side = |minus: bool| -> (Complex64, Complex64) {
        let (a, b) = if minus { (-quad.half_length, 0.0) } else { (0.0, quad.half_length) };
        let h = (b - a) / (n - 1) as f64;
        let mut tf_g = c(0.0, 0.0);
        let mut f_tg = c(0.0, 0.0);
        for i in 0..n {
            let x = a + h * i as f64;
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let (fv, fd, gv, gd) = if minus {
                ((f.value_minus)(x), (f.deriv_minus)(x), (g.value_minus)(x), (g.deriv_minus)(x))
            } else {
                ((f.value_plus)(x), (f.deriv_plus)(x), (g.value_plus)(x), (g.deriv_plus)(x))
            };
            tf_g += dot2(apply_t(m, fv, fd), gv) * w;
            f_tg += dot2(fv, apply_t(m, gv, gd)) * w;
        }
        (tf_g * (h / 3.0), f_tg * (h / 3.0))
    };
    let (a1, a2) = simpson_side(true);
    let (b1, b2) = simpson_side(false);
    let boundary = dot2(f.gamma1(), g.gamma0()) - dot2(f.gamma0(), g.gamma1());
    ((a1 + b1) - (a2 + b2) - boundary).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(eta: f64, tau: f64, lambda: f64, m: f64) -> InteractionStrengths {
        InteractionStrengths::new(eta, tau, lambda, m)
    }

    #[test]
    fn weyl_values() {
        let m0 = weyl_1d(c(0.0, 0.0), 1.0).unwrap().matrix;
        assert!((m0[[0, 0]] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m0[[1, 1]] - c(-0.5, 0.0)).norm() < 1e-15);

        let m06 = weyl_1d(c(0.6, 0.0), 1.0).unwrap().matrix;
        assert!((m06[[0, 0]] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m06[[1, 1]] - c(-0.25, 0.0)).norm() < 1e-15);

        // conjugate symmetry M(z)* = M(conj z)
        let a = weyl_1d(c(0.0, 0.3), 1.0).unwrap().matrix;
        let b = weyl_1d(c(0.0, -0.3), 1.0).unwrap().matrix;
        let defect = linalg::max_norm(&(a.t().mapv(|x| x.conj()) - b));
        assert!(defect < 1e-15);

        assert!(weyl_1d(c(1.2, 0.0), 1.0).is_err());
    }

    #[test]
    fn nevanlinna_positivity() {
        // (M(z) - M(z)*)/(2i Im z) is PSD in the upper half-plane
        for i in 0..50 {
            let re = -2.0 + 4.0 * (i as f64) / 49.0;
            let im = 0.05 + 1.5 * ((i * 7) % 50) as f64 / 50.0;
            let z = c(re, im);
            let m = weyl_1d(z, 1.0).unwrap().matrix;
            let im_part = (&m - &m.t().mapv(|x| x.conj())).mapv(|x| x / c(0.0, 2.0 * im));
            // diagonal Weyl function: positivity of the two diagonal entries
            assert!(im_part[[0, 0]].re > -1e-14, "entry 00 at {z}");
            assert!(im_part[[1, 1]].re > -1e-14, "entry 11 at {z}");
            assert!(im_part[[0, 0]].im.abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_field_values() {
        let out = gamma_field_1d(c(0.0, 0.0), 1.0, [c(1.0, 0.0), c(0.0, 0.0)], 1.0).unwrap();
        let e = (-1.0f64).exp();
        assert!((out[0] - c(0.5 * e, 0.0)).norm() < 1e-15);
        assert!((out[1] - c(0.0, 0.5 * e)).norm() < 1e-15);

        // x -> -x flips the sgn entries
        let a = gamma_field_1d(c(0.2, 0.0), 1.0, [c(0.0, 0.0), c(1.0, 0.0)], 0.7).unwrap();
        let b = gamma_field_1d(c(0.2, 0.0), 1.0, [c(0.0, 0.0), c(1.0, 0.0)], -0.7).unwrap();
        assert!((a[0] + b[0]).norm() < 1e-15);
        assert!((a[1] - b[1]).norm() < 1e-15);

        // exponential decay factor
        let near = gamma_field_1d(c(0.0, 0.0), 1.0, [c(1.0, 0.0), c(1.0, 0.0)], 1.0).unwrap();
        let far = gamma_field_1d(c(0.0, 0.0), 1.0, [c(1.0, 0.0), c(1.0, 0.0)], 5.0).unwrap();
        let decay = (far[0].norm() / near[0].norm()).ln();
        assert!((decay + 4.0).abs() < 1e-12, "decay rate {decay}");
    }

    #[test]
    fn bs_residual_reference_points() {
        let free = s(0.0, 0.0, 0.0, 1.0);
        for z in [-0.9, -0.2, 0.0, 0.55] {
            assert!((bs_residual_1d(z, &free).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(bs_residual_1d(-0.6, &s(1.0, 0.0, 0.0, 1.0)).unwrap() <= 1e-12);
        assert!(bs_residual_1d(0.0, &s(2.0, 0.0, 0.0, 1.0)).unwrap() <= 1e-12);
        assert!(bs_residual_1d(1.0, &free).is_err());
        assert!(bs_residual_1d(0.0, &s(1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn closed_form_reference_spectra() {
        let ev = discrete_spectrum_1d_closed_form(&s(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].value + 0.6).abs() < 1e-14);

        let ev = discrete_spectrum_1d_closed_form(&s(-1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].value - 0.6).abs() < 1e-14);

        let ev = discrete_spectrum_1d_closed_form(&s(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].branch, Branch1D::DEquals4);
        assert_eq!(ev[0].value, 0.0);

        assert!(discrete_spectrum_1d_closed_form(&s(0.0, 0.0, 0.0, 1.0)).unwrap().is_empty());

        // eta = 0: eigenvalues only for tau < 0, symmetric pair +-5/13
        let ev = discrete_spectrum_1d_numeric(&s(0.0, -3.0, 0.0, 1.0), 20_000, 0.5).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].value + 5.0 / 13.0).abs() < 1e-10, "{}", ev[0].value);
        assert!((ev[1].value - 5.0 / 13.0).abs() < 1e-10);
        let cf = discrete_spectrum_1d_closed_form(&s(0.0, -3.0, 0.0, 1.0)).unwrap();
        assert_eq!(cf.len(), 2);

        assert!(discrete_spectrum_1d_closed_form(&s(0.0, 3.0, 0.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn closed_form_satisfies_quadratic_and_gap_equation() {
        let cases = [
            s(1.0, 0.5, -0.3, 1.0),
            s(-2.0, 1.0, 0.7, 2.0),
            s(0.5, -1.5, 1.1, 0.5),
            s(3.0, 0.2, 0.0, 1.0),
        ];
        for sc in cases {
            for ev in discrete_spectrum_1d_closed_form(&sc).unwrap() {
                let z = ev.value;
                assert!(z.abs() < sc.m);
                assert!(gap_equation_1d(z, &sc).abs() <= 1e-10 * sc.m, "gap eq at {z}");
                let d = sc.d();
                let x = d / 4.0 - 1.0;
                let quad = (sc.eta * sc.eta + x * x) * z * z
                    + 2.0 * sc.m * sc.tau * sc.eta * z
                    + sc.m * sc.m * (sc.tau * sc.tau - x * x);
                assert!(quad.abs() <= 1e-10 * sc.m * sc.m, "quadratic at {z}: {quad}");
            }
        }
    }

    #[test]
    fn numeric_agrees_with_closed_form() {
        let mut state = 42u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 4.0 - 2.0
        };
        let mut checked = 0;
        while checked < 40 {
            let sc = s(rnd(), rnd(), rnd(), 1.0);
            if (sc.d() - 4.0).abs() <= 1e-3 || sc.is_trivial() {
                continue;
            }
            let cf = discrete_spectrum_1d_closed_form(&sc).unwrap();
            let num = discrete_spectrum_1d_numeric(&sc, 20_000, 0.5).unwrap();
            assert_eq!(cf.len(), num.len(), "count mismatch for {sc:?}");
            for (a, b) in cf.iter().zip(&num) {
                assert!((a.value - b.value).abs() < 1e-10, "{} vs {}", a.value, b.value);
            }
            checked += 1;
        }
    }

    #[test]
    fn resolvent_kernel_properties() {
        // free case: correction vanishes
        let k = resolvent_correction_1d(c(0.3, 0.0), &s(0.0, 0.0, 0.0, 1.0), 0.4, -0.9).unwrap();
        assert_eq!(linalg::max_norm(&k), 0.0);

        // self-adjointness symmetry K(x,y)^H = K(y,x) for real z in the gap
        let sc = s(0.8, -0.3, 0.5, 1.0);
        let k1 = resolvent_correction_1d(c(0.25, 0.0), &sc, 0.7, -1.2).unwrap();
        let k2 = resolvent_correction_1d(c(0.25, 0.0), &sc, -1.2, 0.7).unwrap();
        let defect = linalg::max_norm(&(k1.t().mapv(|x| x.conj()) - k2));
        assert!(defect < 1e-13, "symmetry defect {defect}");

        // defect equation in x by finite differences, O(h^2)
        let z = c(0.25, 0.0);
        let resid = |h: f64| {
            let x = 0.7;
            let y = -1.2;
            let km = resolvent_correction_1d(z, &sc, x - h, y).unwrap();
            let kp = resolvent_correction_1d(z, &sc, x + h, y).unwrap();
            let k0 = resolvent_correction_1d(z, &sc, x, y).unwrap();
            let rep = build_dirac_matrices(1).unwrap();
            let dk = (kp - km).mapv(|v| v / (2.0 * h));
            let r = rep.alpha(1).dot(&dk).mapv(|v| v * c(0.0, -1.0))
                + rep.alpha0().dot(&k0).mapv(|v| v * sc.m)
                - k0.mapv(|v| v * z);
            linalg::fro_norm(&r)
        };
        let (r1, r2) = (resid(1e-3), resid(5e-4));
        assert!(r1 < 1e-5, "defect residual {r1}");
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "order ratio {ratio}");

        // pole rejection at an eigenvalue
        assert!(matches!(
            resolvent_correction_1d(c(-0.6, 0.0), &s(1.0, 0.0, 0.0, 1.0), 0.3, 0.9),
            Err(ShellError::ResolventPole { .. })
        ));
    }

    #[test]
    fn green_identity_for_witnesses() {
        let quad = Quadrature1D::default();
        // f = g: identity is purely antisymmetric
        let f = PiecewiseFunction1D::witness(c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0), c(0.0, -0.5));
        let r = green_identity_residual_1d(&f, &f, 1.0, quad);
        assert!(r <= 1e-8, "f = g residual {r}");

        let g = PiecewiseFunction1D::witness(c(0.0, 2.0), c(1.0, 0.0), c(-1.0, 0.3), c(0.7, 0.0));
        let r = green_identity_residual_1d(&f, &g, 1.0, quad);
        assert!(r <= 1e-8, "witness residual {r}");

        // continuous function with f(0+) = f(0-) = 0 reduces to symmetry of S
        let h = PiecewiseFunction1D {
            value_minus: Box::new(|x| [c(x * (x.abs().min(700.0) * -1.0).exp(), 0.0), c(0.0, 0.0)]),
            deriv_minus: Box::new(|x| {
                let e = (-x.abs()).exp();
                [c(e + x * e, 0.0), c(0.0, 0.0)]
            }),
            value_plus: Box::new(|x| [c(x * (-x).exp(), 0.0), c(0.0, 0.0)]),
            deriv_plus: Box::new(|x| {
                let e = (-x).exp();
                [c(e - x * e, 0.0), c(0.0, 0.0)]
            }),
        };
        let r = green_identity_residual_1d(&h, &h, 1.0, quad);
        assert!(r <= 1e-8, "symmetric-function residual {r}");
    }
}
