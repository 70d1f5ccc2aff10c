//! Exact finite-dimensional Dirac algebra: anti-commuting matrix
//! representations, interaction coupling matrices, spectral-parameter
//! functions, fundamental solutions, and the interaction-strength
//! classification (trivial / non-critical / critical, confinement, zigzag).

use ndarray::prelude::*;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ShellError};
use crate::linalg;
use crate::special;

pub const CRIT_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices; sigma[0] is the identity.
fn pauli() -> [Array2<Complex64>; 4] {
    [
        array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
        array![[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        array![[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
    ]
}

/// A concrete choice of anti-commuting Dirac matrices in dimension `q`.
///
/// `alphas[0]` is the mass matrix alpha_0; `alphas[j]`, j = 1..=q, multiply
/// the momentum components. Spinor size is 2 for q in {1,2} and 4 for q = 3.
#[derive(Debug, Clone)]
pub struct DiracRepresentation {
    pub q: usize,
    pub n: usize,
    pub alphas: Vec<Array2<Complex64>>,
}

impl DiracRepresentation {
    pub fn alpha0(&self) -> &Array2<Complex64> {
        &self.alphas[0]
    }

    pub fn alpha(&self, j: usize) -> &Array2<Complex64> {
        &self.alphas[j]
    }

    /// alpha . v = sum_j alpha_j v_j for a real vector of length q.
    pub fn alpha_dot(&self, v: &[f64]) -> Result<Array2<Complex64>> {
        if v.len() != self.q {
            return Err(ShellError::DimensionMismatch { expected: self.q, got: v.len() });
        }
        let mut out = Array2::<Complex64>::zeros((self.n, self.n));
        for (j, &vj) in v.iter().enumerate() {
            out = out + self.alphas[j + 1].mapv(|x| x * vj);
        }
        Ok(out)
    }

    pub fn identity(&self) -> Array2<Complex64> {
        Array2::eye(self.n)
    }
}

/// Builds the Pauli representation for q in {1,2} and the 4x4 Dirac
/// representation for q = 3. For q = 1 the set is (alpha_0, alpha_1) =
/// (sigma_3, sigma_1).
pub fn build_dirac_matrices(q: usize) -> Result<DiracRepresentation> {
    let s = pauli();
    match q {
        1 => Ok(DiracRepresentation { q, n: 2, alphas: vec![s[3].clone(), s[1].clone()] }),
        2 => Ok(DiracRepresentation {
            q,
            n: 2,
            alphas: vec![s[3].clone(), s[1].clone(), s[2].clone()],
        }),
        3 => {
            let mut alphas = Vec::with_capacity(4);
            let mut a0 = Array2::<Complex64>::zeros((4, 4));
            for i in 0..2 {
                a0[[i, i]] = c(1., 0.);
                a0[[i + 2, i + 2]] = c(-1., 0.);
            }
            alphas.push(a0);
            for j in 1..=3 {
                let mut aj = Array2::<Complex64>::zeros((4, 4));
                for r in 0..2 {
                    for col in 0..2 {
                        aj[[r, col + 2]] = s[j][[r, col]];
                        aj[[r + 2, col]] = s[j][[r, col]];
                    }
                }
                alphas.push(aj);
            }
            Ok(DiracRepresentation { q, n: 4, alphas })
        }
        _ => Err(ShellError::DimensionOutOfRange(q)),
    }
}

/// Max deviation over all pairs from alpha_k alpha_j + alpha_j alpha_k = 2 delta_kj I.
pub fn verify_anticommutation(rep: &DiracRepresentation) -> f64 {
    let id = rep.identity();
    let mut worst = 0.0f64;
    for k in 0..rep.alphas.len() {
        for j in 0..rep.alphas.len() {
            let anti = rep.alphas[k].dot(&rep.alphas[j]) + rep.alphas[j].dot(&rep.alphas[k]);
            let target = if k == j { id.mapv(|x| x * 2.0) } else { Array2::zeros((rep.n, rep.n)) };
            worst = worst.max(linalg::max_norm(&(anti - target)));
        }
    }
    worst
}

/// Residual of the symbol factorization
/// (alpha.xi + m alpha_0 - z)(alpha.xi + m alpha_0 + z) = (|xi|^2 + m^2 - z^2) I.
pub fn symbol_factorization_check(
    rep: &DiracRepresentation,
    m: f64,
    z: Complex64,
    xi: &[f64],
) -> Result<f64> {
    let symbol = rep.alpha_dot(xi)? + rep.alpha0().mapv(|x| x * m);
    let id = rep.identity();
    let minus = &symbol - &id.mapv(|x| x * z);
    let plus = &symbol + &id.mapv(|x| x * z);
    let xi2: f64 = xi.iter().map(|v| v * v).sum();
    let rhs = id.mapv(|x| x * (xi2 + m * m - z * z));
    Ok(linalg::max_norm(&(minus.dot(&plus) - rhs)))
}

/// Electrostatic, Lorentz scalar, and anomalous magnetic coupling constants
/// plus the mass. `d` and the criticality value are always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionStrengths {
    pub eta: f64,
    pub tau: f64,
    pub lambda: f64,
    pub m: f64,
}

impl InteractionStrengths {
    pub fn new(eta: f64, tau: f64, lambda: f64, m: f64) -> Self {
        InteractionStrengths { eta, tau, lambda, m }
    }

    /// d = eta^2 - tau^2 - lambda^2.
    pub fn d(&self) -> f64 {
        self.eta * self.eta - self.tau * self.tau - self.lambda * self.lambda
    }

    /// Criticality value c = (d/4 - 1)^2 - lambda^2; c = 0 is the critical case.
    pub fn criticality(&self) -> f64 {
        let x = self.d() / 4.0 - 1.0;
        x * x - self.lambda * self.lambda
    }

    pub fn is_trivial(&self) -> bool {
        self.eta == 0.0 && self.tau == 0.0 && self.lambda == 0.0
    }

    pub fn is_critical(&self) -> bool {
        let d = self.d();
        self.criticality().abs() <= CRIT_TOL * (d * d).max(1.0)
    }

    pub fn is_confinement(&self) -> bool {
        let scale = (self.eta * self.eta + self.tau * self.tau + self.lambda * self.lambda).max(1.0);
        (self.d() + 4.0).abs() <= CRIT_TOL * scale
    }

    pub fn is_zigzag(&self) -> bool {
        self.is_confinement() && (self.lambda * self.lambda - 4.0).abs() <= CRIT_TOL * 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Trivial,
    NonCritical,
    Critical,
}

/// Classifier output; `criticality` carries the raw value of c so borderline
/// decisions stay auditable.
#[derive(Debug, Clone, Serialize)]
pub struct StrengthClassification {
    pub regime: Regime,
    pub confinement: bool,
    pub zigzag: bool,
    pub criticality: f64,
    pub d: f64,
    pub extra_essential_point: Option<f64>,
    pub essential_spectrum: String,
    pub notes: Vec<String>,
}

/// Classifies interaction strengths per the spectral theory of the shell
/// operator: regime, confinement decoupling, zigzag degeneracy, and the
/// possible extra essential-spectrum point -m tau / eta in the critical case.
pub fn classify_strengths(s: &InteractionStrengths) -> StrengthClassification {
    let d = s.d();
    let c_val = s.criticality();
    let confinement = s.is_confinement();
    let zigzag = s.is_zigzag();
    let regime = if s.is_trivial() {
        Regime::Trivial
    } else if s.is_critical() {
        Regime::Critical
    } else {
        Regime::NonCritical
    };

    let mut notes = Vec::new();
    let extra = if regime == Regime::Critical && s.eta != 0.0 && !confinement {
        Some(-s.m * s.tau / s.eta)
    } else {
        None
    };

    let essential_spectrum = if s.m == 0.0 {
        notes.push("massless case: the gap is empty and the discrete spectrum is empty".into());
        "(-inf,inf)".to_string()
    } else {
        match extra {
            Some(p) => format!("(-inf,-{m}] ∪ {{{p}}} ∪ [{m},inf)", m = s.m, p = p),
            None => format!("(-inf,-{m}] ∪ [{m},inf)", m = s.m),
        }
    };

    if confinement {
        notes.push(
            "confinement (d = -4): the operator decouples into independent interior and exterior parts"
                .into(),
        );
        if zigzag {
            let sgn = if s.lambda > 0.0 { -1.0 } else { 1.0 };
            notes.push(format!(
                "zigzag case (lambda^2 = 4): the interior operator has the eigenvalue {} with infinite multiplicity; the rest of its spectrum is discrete",
                sgn * s.m
            ));
            if s.eta != 0.0 {
                notes.push(
                    "eta^2 = tau^2 != 0: one decoupled side is zigzag-type, the other equals a non-critical confinement operator for suitable redefined strengths"
                        .into(),
                );
            }
        } else {
            notes.push(
                "non-critical confinement (lambda^2 != 4): the interior operator has purely discrete spectrum"
                    .into(),
            );
        }
    }

    StrengthClassification {
        regime,
        confinement,
        zigzag,
        criticality: c_val,
        d,
        extra_essential_point: extra,
        essential_spectrum,
        notes,
    }
}

/// Square root with the branch fixed so that Im sqrt(w) > 0 off [0, inf);
/// for real negative w this returns i sqrt(|w|).
pub fn sqrt_upper(w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        if w.re < 0.0 {
            return c(0.0, (-w.re).sqrt());
        }
        return c(w.re.sqrt(), 0.0);
    }
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// k(z) = sqrt(z^2 - m^2) and zeta(z) = (z + m)/k(z) on the chosen branch.
#[derive(Debug, Clone, Copy)]
pub struct SpectralParameters {
    pub z: Complex64,
    pub k: Complex64,
    pub zeta: Complex64,
}

pub fn on_branch_cut(z: Complex64, m: f64) -> bool {
    z.im == 0.0 && z.re.abs() >= m
}

pub fn spectral_parameters(z: Complex64, m: f64) -> Result<SpectralParameters> {
    if on_branch_cut(z, m) {
        return Err(ShellError::OnBranchCut(format!("{z}")));
    }
    let k = sqrt_upper(z * z - m * m);
    let zeta = (z + m) / k;
    Ok(SpectralParameters { z, k, zeta })
}

/// Coupling matrix P = eta I + tau alpha_0 + lambda i (alpha . nu) alpha_0 at
/// a point with unit normal `nu`. In dimension one the convention nu = -1
/// yields eta I + tau sigma_3 - lambda sigma_2.
pub fn coupling_matrix(
    s: &InteractionStrengths,
    rep: &DiracRepresentation,
    nu: &[f64],
) -> Result<Array2<Complex64>> {
    let norm: f64 = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(ShellError::NonUnitNormal(norm));
    }
    let adot = rep.alpha_dot(nu)?;
    let id = rep.identity();
    let p = id.mapv(|x| x * s.eta)
        + rep.alpha0().mapv(|x| x * s.tau)
        + adot.dot(rep.alpha0()).mapv(|x| x * c(0.0, s.lambda));
    Ok(p)
}

/// Fundamental solution G_{z,q}(x) of the free Dirac operator, evaluated away
/// from the origin. For q = 2 the modified Bessel functions are evaluated at
/// -i k(z) |x|, which has positive real part everywhere off the essential
/// spectrum.
pub fn fundamental_solution(
    rep: &DiracRepresentation,
    m: f64,
    z: Complex64,
    x: &[f64],
) -> Result<Array2<Complex64>> {
    if x.len() != rep.q {
        return Err(ShellError::DimensionMismatch { expected: rep.q, got: x.len() });
    }
    let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(ShellError::SingularPoint);
    }
    let sp = spectral_parameters(z, m)?;
    let id = rep.identity();
    match rep.q {
        1 => {
            let sgn = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            let pre = c(0.0, 0.5) * (c(0.0, 1.0) * sp.k * r).exp();
            Ok(array![
                [pre * sp.zeta, pre * sgn],
                [pre * sgn, pre / sp.zeta],
            ])
        }
        2 => {
            let w = c(0.0, -1.0) * sp.k * r;
            let (k0v, k1v) = special::k0_k1(w)?;
            let adot = rep.alpha_dot(x)?;
            let t1 = adot.mapv(|a| a * (sp.k / (2.0 * std::f64::consts::PI) * k1v / r));
            let zm = id.mapv(|x| x * z) + rep.alpha0().mapv(|x| x * m);
            let t2 = zm.mapv(|a| a * (k0v / (2.0 * std::f64::consts::PI)));
            Ok(t1 + t2)
        }
        3 => {
            let adot = rep.alpha_dot(x)?;
            let zm = id.mapv(|x| x * z) + rep.alpha0().mapv(|x| x * m);
            let scal = (c(1.0, 0.0) - c(0.0, 1.0) * sp.k * r) * c(0.0, 1.0) / (r * r);
            let inner = zm + adot.mapv(|a| a * scal);
            let pre = (c(0.0, 1.0) * sp.k * r).exp() / (4.0 * std::f64::consts::PI * r);
            Ok(inner.mapv(|a| a * pre))
        }
        q => Err(ShellError::DimensionOutOfRange(q)),
    }
}

/// Central finite-difference residual of (-i alpha.grad + m alpha_0 - z) G_{z,q}
/// at `x`; second order in the step `h`.
pub fn fundamental_solution_residual(
    rep: &DiracRepresentation,
    m: f64,
    z: Complex64,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    let g = fundamental_solution(rep, m, z, x)?;
    let mut resid = rep.alpha0().dot(&g).mapv(|v| v * m) - g.mapv(|v| v * z);
    for j in 0..rep.q {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let gp = fundamental_solution(rep, m, z, &xp)?;
        let gm = fundamental_solution(rep, m, z, &xm)?;
        let dg = (gp - gm).mapv(|v| v / (2.0 * h));
        resid = resid + rep.alphas[j + 1].dot(&dg).mapv(|v| v * c(0.0, -1.0));
    }
    Ok(linalg::fro_norm(&resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_representations_anticommute_exactly() {
        for q in 1..=3 {
            let rep = build_dirac_matrices(q).unwrap();
            assert_eq!(verify_anticommutation(&rep), 0.0, "q = {q}");
            for a in &rep.alphas {
                // Hermitian and unitary
                let defect = linalg::max_norm(&(a - &a.t().mapv(|x| x.conj())));
                assert_eq!(defect, 0.0);
                let sq = a.dot(a);
                assert_eq!(linalg::max_norm(&(sq - rep.identity())), 0.0);
            }
        }
        assert!(matches!(build_dirac_matrices(4), Err(ShellError::DimensionOutOfRange(4))));
    }

    #[test]
    fn pauli_entries_match_convention() {
        let rep = build_dirac_matrices(2).unwrap();
        assert_eq!(rep.alpha(1)[[0, 1]], c(1., 0.));
        assert_eq!(rep.alpha(1)[[0, 0]], c(0., 0.));
        assert_eq!(rep.alpha(2)[[0, 1]], c(0., -1.));
        assert_eq!(rep.alpha0()[[1, 1]], c(-1., 0.));
        let rep3 = build_dirac_matrices(3).unwrap();
        for i in 0..4 {
            let want = if i < 2 { 1.0 } else { -1.0 };
            assert_eq!(rep3.alpha0()[[i, i]], c(want, 0.));
        }
    }

    #[test]
    fn perturbed_representation_detected() {
        let mut rep = build_dirac_matrices(2).unwrap();
        rep.alphas[1] = &rep.alphas[1] + &rep.identity().mapv(|x| x * 1e-3);
        // the k = j = 1 pair doubles the perturbation: 2(alpha_1 + eps)^2
        // deviates from 2I by 4 eps alpha_1 + 2 eps^2
        let dev = verify_anticommutation(&rep);
        assert!((dev - 4e-3).abs() < 1e-5, "deviation {dev}");
    }

    #[test]
    fn symbol_factorization_residuals() {
        let rep3 = build_dirac_matrices(3).unwrap();
        let r = symbol_factorization_check(&rep3, 1.0, c(0.0, 0.3), &[1.0, 2.0, 3.0]).unwrap();
        assert!(r <= 1e-13, "q=3 residual {r}");
        let rep2 = build_dirac_matrices(2).unwrap();
        let r = symbol_factorization_check(&rep2, 0.0, c(0.0, 0.0), &[0.0, 0.0]).unwrap();
        assert_eq!(r, 0.0);
        let r = symbol_factorization_check(&rep2, 1.0, c(0.5, 0.0), &[0.7, -0.2]).unwrap();
        assert!(r <= 1e-13, "q=2 residual {r}");
        assert!(symbol_factorization_check(&rep2, 1.0, c(0.5, 0.0), &[1.0]).is_err());
    }

    #[test]
    fn spectral_parameter_branch() {
        let sp = spectral_parameters(c(0.0, 0.0), 1.0).unwrap();
        assert!((sp.k - c(0.0, 1.0)).norm() < 1e-15);
        assert!((sp.zeta - c(0.0, -1.0)).norm() < 1e-15);

        let sp = spectral_parameters(c(0.6, 0.0), 1.0).unwrap();
        assert!((sp.k - c(0.0, 0.8)).norm() < 1e-15);
        assert!((sp.zeta - c(0.0, -2.0)).norm() < 1e-15);

        // massless: k(z) = z on the upper branch
        let sp = spectral_parameters(c(0.0, 1.0), 0.0).unwrap();
        assert!((sp.k - c(0.0, 1.0)).norm() < 1e-15);
        assert!((sp.zeta - c(1.0, 0.0)).norm() < 1e-15);

        assert!(spectral_parameters(c(1.0, 0.0), 1.0).is_err());
        assert!(spectral_parameters(c(-3.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn conjugation_symmetry_of_k() {
        for (re, im) in [(0.3, 0.7), (-1.2, 0.4), (0.0, 2.0), (2.5, 1.0)] {
            let z = c(re, im);
            let k1 = spectral_parameters(z, 1.0).unwrap().k;
            let k2 = spectral_parameters(z.conj(), 1.0).unwrap().k;
            assert!((k2 + k1.conj()).norm() < 1e-14, "k(conj z) = -conj(k(z)) at {z}");
        }
    }

    #[test]
    fn coupling_matrix_cases() {
        let s = InteractionStrengths::new(1.0, 0.0, 0.0, 1.0);
        let rep = build_dirac_matrices(2).unwrap();
        let p = coupling_matrix(&s, &rep, &[0.6, 0.8]).unwrap();
        assert!(linalg::max_norm(&(p - rep.identity())) < 1e-15);

        // 1D anomalous magnetic term: -sigma_2
        let rep1 = build_dirac_matrices(1).unwrap();
        let s = InteractionStrengths::new(0.0, 0.0, 1.0, 1.0);
        let p = coupling_matrix(&s, &rep1, &[-1.0]).unwrap();
        let minus_sigma2 = array![[c(0., 0.), c(0., 1.)], [c(0., -1.), c(0., 0.)]];
        assert!(linalg::max_norm(&(p - minus_sigma2)) < 1e-15);

        // Lorentz scalar gives alpha_0
        let s = InteractionStrengths::new(0.0, 1.0, 0.0, 1.0);
        let p = coupling_matrix(&s, &rep, &[1.0, 0.0]).unwrap();
        assert!(linalg::max_norm(&(p - rep.alpha0().clone())) < 1e-15);

        assert!(matches!(
            coupling_matrix(&s, &rep, &[0.5, 0.5]),
            Err(ShellError::NonUnitNormal(_))
        ));
    }

    #[test]
    fn coupling_product_identity() {
        // P_{eta,-tau,-lambda} P_{eta,tau,lambda} = d I, random strengths and normals
        let rep = build_dirac_matrices(2).unwrap();
        let mut state = 11u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 4.0 - 2.0
        };
        for _ in 0..100 {
            let (eta, tau, lambda) = (rnd(), rnd(), rnd());
            let t = rnd();
            let nu = [t.cos(), t.sin()];
            let s = InteractionStrengths::new(eta, tau, lambda, 1.0);
            let sflip = InteractionStrengths::new(eta, -tau, -lambda, 1.0);
            let p = coupling_matrix(&s, &rep, &nu).unwrap();
            let pf = coupling_matrix(&sflip, &rep, &nu).unwrap();
            let d = s.d();
            let err = linalg::max_norm(&(pf.dot(&p) - rep.identity().mapv(|x| x * d)));
            assert!(err < 1e-12, "product identity failed: {err}");
            let herm = linalg::max_norm(&(&p - &p.t().mapv(|x| x.conj())));
            assert!(herm < 1e-15);
        }
    }

    #[test]
    fn classification_table() {
        let free = classify_strengths(&InteractionStrengths::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(free.regime, Regime::Trivial);
        assert!(!free.confinement && !free.zigzag);
        assert_eq!(free.essential_spectrum, "(-inf,-1] ∪ [1,inf)");

        let crit = classify_strengths(&InteractionStrengths::new(2.0, 0.0, 0.0, 1.0));
        assert_eq!(crit.regime, Regime::Critical);
        assert_eq!(crit.extra_essential_point, Some(0.0));
        assert!((crit.criticality).abs() < 1e-15);

        let zig = classify_strengths(&InteractionStrengths::new(0.0, 0.0, 2.0, 1.0));
        assert_eq!(zig.regime, Regime::Critical);
        assert!(zig.confinement && zig.zigzag);
        assert_eq!(zig.extra_essential_point, None);
        assert!(zig.notes.iter().any(|n| n.contains("infinite multiplicity")));
        assert!(zig.notes.iter().any(|n| n.contains("-1")));

        let conf = classify_strengths(&InteractionStrengths::new(2.0, 1.0, 7.0f64.sqrt(), 1.0));
        assert!((conf.d + 4.0).abs() < 1e-12);
        assert!(conf.confinement && !conf.zigzag);
        assert!(conf.notes.iter().any(|n| n.contains("purely discrete")));

        // lambda -> -lambda leaves flags invariant
        let a = classify_strengths(&InteractionStrengths::new(0.3, -0.7, 1.9, 1.0));
        let b = classify_strengths(&InteractionStrengths::new(0.3, -0.7, -1.9, 1.0));
        assert_eq!(a.regime, b.regime);
        assert_eq!(a.confinement, b.confinement);
        assert_eq!(a.zigzag, b.zigzag);
    }

    #[test]
    fn fundamental_solution_1d_value() {
        let rep = build_dirac_matrices(1).unwrap();
        let g = fundamental_solution(&rep, 1.0, c(0.0, 0.0), &[1.0]).unwrap();
        let e = (-1.0f64).exp();
        // (i/2) e^{-1} [[-i, 1], [1, i]]
        let want = array![
            [c(0.5 * e, 0.0), c(0.0, 0.5 * e)],
            [c(0.0, 0.5 * e), c(-0.5 * e, 0.0)],
        ];
        assert!(linalg::max_norm(&(g - want)) < 1e-15);
    }

    #[test]
    fn fundamental_solution_1d_sign_flip() {
        let rep = build_dirac_matrices(1).unwrap();
        let gp = fundamental_solution(&rep, 1.0, c(0.2, 0.0), &[0.7]).unwrap();
        let gm = fundamental_solution(&rep, 1.0, c(0.2, 0.0), &[-0.7]).unwrap();
        assert_eq!(gp[[0, 0]], gm[[0, 0]]);
        assert_eq!(gp[[1, 1]], gm[[1, 1]]);
        assert_eq!(gp[[0, 1]], -gm[[0, 1]]);
        assert_eq!(gp[[1, 0]], -gm[[1, 0]]);
    }

    #[test]
    fn fundamental_solution_3d_on_axis() {
        let rep = build_dirac_matrices(3).unwrap();
        let r = 1.3f64;
        let g = fundamental_solution(&rep, 1.0, c(0.0, 0.0), &[r, 0.0, 0.0]).unwrap();
        let pre = (-r).exp() / (4.0 * std::f64::consts::PI * r);
        let want = (rep.alpha0()
            + &rep.alpha(1).mapv(|x| x * c(0.0, (1.0 + r) / r)))
            .mapv(|x| x * pre);
        assert!(linalg::max_norm(&(g - want)) < 1e-15);
    }

    #[test]
    fn fundamental_solution_rejects_origin() {
        let rep = build_dirac_matrices(2).unwrap();
        assert!(matches!(
            fundamental_solution(&rep, 1.0, c(0.0, 0.0), &[0.0, 0.0]),
            Err(ShellError::SingularPoint)
        ));
    }

    #[test]
    fn defect_residual_orders() {
        let rep1 = build_dirac_matrices(1).unwrap();
        let r1 = fundamental_solution_residual(&rep1, 1.0, c(0.0, 0.0), &[2.0], 1e-4).unwrap();
        assert!(r1 <= 1e-6, "q=1 residual {r1}");

        let rep2 = build_dirac_matrices(2).unwrap();
        let r2 = fundamental_solution_residual(&rep2, 1.0, c(0.3, 0.0), &[1.0, 0.0], 1e-3).unwrap();
        assert!(r2 <= 1e-4, "q=2 residual {r2}");

        // halving h shrinks the residual ~4x
        let rep3 = build_dirac_matrices(3).unwrap();
        let h = 1e-2;
        let a = fundamental_solution_residual(&rep3, 1.0, c(0.4, 0.0), &[0.8, -0.5, 0.3], h).unwrap();
        let b = fundamental_solution_residual(&rep3, 1.0, c(0.4, 0.0), &[0.8, -0.5, 0.3], h / 2.0).unwrap();
        let ratio = a / b;
        assert!((3.5..=4.5).contains(&ratio), "order-2 ratio {ratio}");
    }
}
