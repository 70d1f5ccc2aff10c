//! Algebra of the confinement case d = -4: jump matrix R, transmission
//! matrix Q, the decoupled boundary-condition matrices, and a numeric check
//! of the zigzag kernel elements.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::algebra::{coupling_matrix, DiracRepresentation, InteractionStrengths};
use crate::error::{Result, ShellError};
use crate::linalg;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pointwise transmission data at a boundary point with unit normal nu.
///
/// `r` is the jump matrix (i/2)(alpha.nu) P. For d != -4 the transmission
/// condition reads gamma^+ = Q gamma^-; for d = -4 it decouples into the
/// one-sided conditions bc_plus/bc_minus applied to the respective traces.
#[derive(Debug, Clone)]
pub struct TransmissionData {
    pub r: Array2<Complex64>,
    pub q: Option<Array2<Complex64>>,
    pub bc_plus: Option<Array2<Complex64>>,
    pub bc_minus: Option<Array2<Complex64>>,
}

/// Builds the transmission data for strengths `s` at normal `nu`.
///
/// Q is evaluated through the polynomial form 4/(d+4) (I + R)^2, which is
/// exact and avoids a matrix inversion.
pub fn transmission_data(
    s: &InteractionStrengths,
    rep: &DiracRepresentation,
    nu: &[f64],
) -> Result<TransmissionData> {
    let p = coupling_matrix(s, rep, nu)?;
    let adot = rep.alpha_dot(nu)?;
    let r = adot.dot(&p).mapv(|x| x * c(0.0, 0.5));
    let d = s.d();
    let id = rep.identity();
    if s.is_confinement() {
        let bc_plus = (&id.mapv(|x| x * 2.0) - &r.mapv(|x| x * 2.0)).to_owned();
        let bc_minus = (&id.mapv(|x| x * 2.0) + &r.mapv(|x| x * 2.0)).to_owned();
        Ok(TransmissionData { r, q: None, bc_plus: Some(bc_plus), bc_minus: Some(bc_minus) })
    } else {
        let ipr = &id + &r;
        let q = ipr.dot(&ipr).mapv(|x| x * (4.0 / (d + 4.0)));
        Ok(TransmissionData { r, q: Some(q), bc_plus: None, bc_minus: None })
    }
}

/// Numerical rank of a matrix via its singular values.
pub fn numerical_rank(a: &Array2<Complex64>, tol: f64) -> Result<usize> {
    let s = linalg::singular_values(a)?;
    let cut = tol * s.first().copied().unwrap_or(0.0).max(1e-300);
    Ok(s.iter().filter(|&&v| v > cut).count())
}

/// Finite-difference residual of (-i alpha.grad + m alpha_0) f_n + m f_n for
/// the anti-holomorphic kernel elements f_n(x) = (x1 - i x2 - conj(c))^{-n} e_N
/// of the zigzag operator (dimension two only). Returns the max residual over
/// the sample points; expected O(h^2).
pub fn zigzag_kernel_check(
    rep: &DiracRepresentation,
    m: f64,
    c_offset: Complex64,
    n: u32,
    samples: &[[f64; 2]],
    h: f64,
) -> Result<f64> {
    if rep.q != 2 {
        return Err(ShellError::DimensionOutOfRange(rep.q));
    }
    if n <= 2 {
        return Err(ShellError::BadConfig(format!("kernel exponent n = {n} must exceed 2")));
    }
    let pole = Complex64::new(c_offset.re, -c_offset.im);
    let f = |x: f64, y: f64| -> Result<Array1<Complex64>> {
        let w = Complex64::new(x, -y) - pole;
        if w.norm() < (10.0 * h).max(1e-8) {
            return Err(ShellError::NearPole(w.norm()));
        }
        let val = w.powi(-(n as i32));
        Ok(array![c(0.0, 0.0), val])
    };
    let mut worst = 0.0f64;
    for &[x, y] in samples {
        let fx = (f(x + h, y)? - f(x - h, y)?).mapv(|v| v / (2.0 * h));
        let fy = (f(x, y + h)? - f(x, y - h)?).mapv(|v| v / (2.0 * h));
        let grad = rep.alpha(1).dot(&fx) + rep.alpha(2).dot(&fy);
        let v0 = f(x, y)?;
        let resid = grad.mapv(|v| v * c(0.0, -1.0)) + rep.alpha0().dot(&v0).mapv(|v| v * m)
            + v0.mapv(|v| v * m);
        let norm = resid.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(norm);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_dirac_matrices;

    #[test]
    fn free_case_trivial_transmission() {
        let rep = build_dirac_matrices(2).unwrap();
        let s = InteractionStrengths::new(0.0, 0.0, 0.0, 1.0);
        let td = transmission_data(&s, &rep, &[1.0, 0.0]).unwrap();
        assert_eq!(linalg::max_norm(&td.r), 0.0);
        let q = td.q.unwrap();
        assert!(linalg::max_norm(&(q - rep.identity())) < 1e-15);
    }

    #[test]
    fn confinement_projectors_annihilate() {
        let rep = build_dirac_matrices(2).unwrap();
        let s = InteractionStrengths::new(0.0, 0.0, 2.0, 1.0);
        let td = transmission_data(&s, &rep, &[0.0, 1.0]).unwrap();
        assert!(td.q.is_none());
        let id = rep.identity();
        let prod_p = (&id - &td.r).dot(&(&id + &td.r));
        let prod_m = (&id + &td.r).dot(&(&id - &td.r));
        assert!(linalg::max_norm(&prod_p) < 1e-15);
        assert!(linalg::max_norm(&prod_m) < 1e-15);
    }

    #[test]
    fn transmission_identity_for_regular_d() {
        let rep = build_dirac_matrices(2).unwrap();
        let s = InteractionStrengths::new(1.0, 0.0, 0.0, 1.0);
        let td = transmission_data(&s, &rep, &[0.6, -0.8]).unwrap();
        let q = td.q.unwrap();
        let id = rep.identity();
        // (I - R) Q = (I + R)
        let lhs = (&id - &td.r).dot(&q);
        let rhs = &id + &td.r;
        assert!(linalg::max_norm(&(lhs - rhs)) < 1e-14);
        // Q invertible
        assert!(linalg::inverse(&q).is_ok());
    }

    #[test]
    fn r_squared_identity() {
        let rep = build_dirac_matrices(3).unwrap();
        let s = InteractionStrengths::new(0.7, -1.1, 0.4, 1.0);
        let nu = [2.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0];
        let td = transmission_data(&s, &rep, &nu).unwrap();
        let want = rep.identity().mapv(|x| x * (-s.d() / 4.0));
        assert!(linalg::max_norm(&(td.r.dot(&td.r) - want)) < 1e-14);
    }

    #[test]
    fn boundary_condition_rank_halves() {
        // d = -4 with lambda^2 != 4: the two block rows of bc_pm are
        // equivalent, so the rank drops to N/2.
        let rep = build_dirac_matrices(2).unwrap();
        let s = InteractionStrengths::new(2.0, 1.0, 7.0f64.sqrt(), 1.0);
        assert!(s.is_confinement() && !s.is_zigzag());
        let td = transmission_data(&s, &rep, &[0.8, 0.6]).unwrap();
        assert_eq!(numerical_rank(&td.bc_plus.unwrap(), 1e-10).unwrap(), 1);
        assert_eq!(numerical_rank(&td.bc_minus.unwrap(), 1e-10).unwrap(), 1);
    }

    #[test]
    fn zigzag_kernel_residual_small() {
        let rep = build_dirac_matrices(2).unwrap();
        let samples: Vec<[f64; 2]> = (0..8)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
                [2.0 * t.cos(), 2.0 * t.sin()]
            })
            .collect();
        let r = zigzag_kernel_check(&rep, 1.0, c(0.0, 0.0), 3, &samples, 1e-4).unwrap();
        assert!(r <= 1e-6, "zigzag residual {r}");

        // massless case stays in the kernel as well
        let r0 = zigzag_kernel_check(&rep, 0.0, c(0.0, 0.0), 3, &samples, 1e-4).unwrap();
        assert!(r0 <= 1e-6, "massless residual {r0}");

        // order check
        let a = zigzag_kernel_check(&rep, 1.0, c(0.3, -0.2), 4, &samples, 2e-3).unwrap();
        let b = zigzag_kernel_check(&rep, 1.0, c(0.3, -0.2), 4, &samples, 1e-3).unwrap();
        let ratio = a / b;
        assert!((3.5..=4.5).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn zigzag_kernel_guards() {
        let rep = build_dirac_matrices(2).unwrap();
        assert!(zigzag_kernel_check(&rep, 1.0, c(0.0, 0.0), 2, &[[2.0, 0.0]], 1e-4).is_err());
        let near = zigzag_kernel_check(&rep, 1.0, c(0.0, 0.0), 3, &[[1e-6, 0.0]], 1e-4);
        assert!(matches!(near, Err(ShellError::NearPole(_))));
        let rep3 = build_dirac_matrices(3).unwrap();
        assert!(zigzag_kernel_check(&rep3, 1.0, c(0.0, 0.0), 3, &[[2.0, 0.0]], 1e-4).is_err());
    }
}
