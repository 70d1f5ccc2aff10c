//! Command-line front end: configuration parsing, orchestration of the
//! algebra/1D/2D modules, and JSON/CSV report emission.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::algebra::{
    build_dirac_matrices, classify_strengths, fundamental_solution_residual,
    symbol_factorization_check, verify_anticommutation, InteractionStrengths,
};
use crate::bem;
use crate::confinement;
use crate::error::{Result, ShellError};
use crate::geometry::{build_grid, parse_curve};
use crate::linalg;
use crate::one_dim;
use crate::spectral;

const SCHEMA: &str = "dirac-shell/1";

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Parser, Debug)]
#[command(
    name = "dirac-shell",
    about = "Spectral analysis of Dirac operators with delta-shell interactions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct StrengthArgs {
    /// Electrostatic coupling constant eta
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    /// Lorentz scalar coupling constant tau
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Anomalous magnetic coupling constant lambda
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Mass (natural units)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub m: f64,
}

impl StrengthArgs {
    fn strengths(&self) -> InteractionStrengths {
        InteractionStrengths::new(self.eta, self.tau, self.lambda, self.m)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output directory for report files
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stdout payload format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    pub format: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify interaction strengths and evaluate self-adjointness conditions
    Classify {
        #[command(flatten)]
        strengths: StrengthArgs,
        /// Space dimension for the coupling/transmission matrices
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Optional curve for geometry-based omega bounds
        #[arg(long)]
        curve: Option<String>,
        /// Grid size for the omega-bound estimate
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One-dimensional discrete spectrum (closed form and numeric)
    Spec1d {
        #[command(flatten)]
        strengths: StrengthArgs,
        /// Gap-scan resolution
        #[arg(long, default_value_t = 20_000)]
        zgrid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-dimensional Birman-Schwinger eigenvalue computation on a curve
    Spec2d {
        #[command(flatten)]
        strengths: StrengthArgs,
        /// Curve spec, e.g. circle:r=1.0, ellipse:a=2,b=1, kite, star:eps=0.2,k=5
        #[arg(long, default_value = "circle:r=1.0")]
        curve: String,
        /// Quadrature node count (even)
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        /// Gap-scan resolution
        #[arg(long, default_value_t = 400)]
        zgrid: usize,
        ///

        /// Acceptance threshold on sigma_min at a refined eigenvalue
        #[arg(long = "tol-bs", default_value_t = 1e-6)]
        tol_bs: f64,
        /// Acceptance threshold on grid-doubling stability (relative to m)
        #[arg(long = "tol-conv", default_value_t = 1e-6)]
        tol_conv: f64,
        /// Acceptance threshold on the jump-condition residual
        #[arg(long = "tol-jump", default_value_t = 1e-4)]
        tol_jump: f64,
        /// Run only the discretization oracles, no scan
        #[arg(long)]
        verify_only: bool,
        /// Smaller grid and relaxed tolerances
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full identity suite
    Verify {
        /// Curve for the 2D identities
        #[arg(long, default_value = "circle:r=1.0")]
        curve: String,
        /// Grid size for the 2D identities
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        /// Smaller grid (N = 64) and tolerances relaxed by 100x
        #[arg(long)]
        quick: bool,
        /// Corrupt the q = 2 representation to exercise the failure path
        #[arg(long, hide = true)]
        corrupt_test_hook: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Classify { strengths, q, curve, n, output } => {
            let report = cmd_classify(&strengths.strengths(), q, curve.as_deref(), n)?;
            emit(&output, "classify.json", &report)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(0)
        }
        Command::Spec1d { strengths, zgrid, output } => {
            let report = cmd_spec1d(&strengths.strengths(), zgrid)?;
            emit(&output, "spec1d.json", &report)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(0)
        }
        Command::Spec2d {
            strengths,
            curve,
            n,
            zgrid,
            tol_bs,
            tol_conv,
            tol_jump,
            verify_only,
            quick,
            output,
        } => {
            let (n, zgrid, tol_bs, tol_conv, tol_jump) = if quick {
                (64, zgrid.min(100), tol_bs * 100.0, tol_conv * 100.0, tol_jump * 100.0)
            } else {
                (n, zgrid, tol_bs, tol_conv, tol_jump)
            };
            let (report, scan_csv) = cmd_spec2d(
                &strengths.strengths(),
                &curve,
                n,
                zgrid,
                tol_bs,
                tol_conv,
                tol_jump,
                verify_only,
            )?;
            emit(&output, "spec2d.json", &report)?;
            if let (Some(dir), Some(csv)) = (&output.out, &scan_csv) {
                std::fs::create_dir_all(dir).map_err(|e| ShellError::BadConfig(e.to_string()))?;
                std::fs::write(dir.join("scan.csv"), csv)
                    .map_err(|e| ShellError::BadConfig(e.to_string()))?;
            }
            if output.format == "csv" {
                if let Some(csv) = &scan_csv {
                    print!("{csv}");
                } else {
                    eprintln!("note: no scan was produced (verify-only run)");
                }
            } else {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            }
            Ok(0)
        }
        Command::Verify { curve, n, quick, corrupt_test_hook, output } => {
            let (report, pass) = cmd_verify(&curve, n, quick, corrupt_test_hook)?;
            emit(&output, "verify.json", &report)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn emit(output: &OutputArgs, name: &str, report: &Value) -> Result<()> {
    if let Some(dir) = &output.out {
        std::fs::create_dir_all(dir).map_err(|e| ShellError::BadConfig(e.to_string()))?;
        let mut f = std::fs::File::create(dir.join(name))
            .map_err(|e| ShellError::BadConfig(e.to_string()))?;
        writeln!(f, "{}", serde_json::to_string_pretty(report).unwrap())
            .map_err(|e| ShellError::BadConfig(e.to_string()))?;
    }
    Ok(())
}

pub fn cmd_classify(
    s: &InteractionStrengths,
    q: usize,
    curve: Option<&str>,
    n: usize,
) -> Result<Value> {
    let class = classify_strengths(s);
    let rep = build_dirac_matrices(q)?;
    let nu: Vec<f64> = match q {
        1 => vec![-1.0],
        2 => vec![1.0, 0.0],
        _ => vec![1.0, 0.0, 0.0],
    };
    let td = confinement::transmission_data(s, &rep, &nu)?;
    let r2_defect = {
        let want = rep.identity().mapv(|x| x * (-s.d() / 4.0));
        linalg::max_norm(&(td.r.dot(&td.r) - want))
    };

    // omega bounds: from the curve when provided, else the smooth-curve value
    let (bounds, norm_c, omega_source) = match curve {
        Some(spec) if s.m > 0.0 => {
            let cv = parse_curve(spec)?;
            let grid = build_grid(&cv, n)?;
            let b = bem::omega_bounds(&grid, bem::default_outlier_budget(n))?;
            let cop = bem::assemble_c(c(0.0, 0.0), s.m, &grid)?;
            let nc = linalg::spectral_norm(&cop.matrix)?;
            (b, nc, format!("estimated on {spec} at N={n}"))
        }
        _ => (
            bem::OmegaBounds {
                omega_min: 0.5,
                omega_max: 0.5,
                spectrum: vec![],
                outliers_removed: 0,
            },
            f64::NAN,
            "smooth-curve reference value 1/2".to_string(),
        ),
    };
    let sa = bem::check_selfadjointness_conditions(s, &bounds, norm_c);

    Ok(json!({
        "schema": SCHEMA,
        "command": "classify",
        "config": { "eta": s.eta, "tau": s.tau, "lambda": s.lambda, "m": s.m, "q": q,
                    "curve": curve, "n": n },
        "regime": class.regime,
        "confinement": class.confinement,
        "zigzag": class.zigzag,
        "d": class.d,
        "criticality": class.criticality,
        "extra_essential_point": class.extra_essential_point,
        "essential_spectrum": class.essential_spectrum,
        "notes": class.notes,
        "transmission": {
            "r_squared_defect": r2_defect,
            "q_present": td.q.is_some(),
            "decoupled_boundary_conditions": td.bc_plus.is_some(),
        },
        "selfadjointness": {
            "omega_source": omega_source,
            "omega_min": sa.omega_min,
            "omega_max": sa.omega_max,
            "norm_c": if sa.norm_c.is_nan() { Value::Null } else { json!(sa.norm_c) },
            "certified": sa.certified,
            "conditions": sa.conditions.iter().map(|cd| json!({
                "name": cd.name, "holds": cd.holds, "detail": cd.detail,
            })).collect::<Vec<_>>(),
        },
    }))
}

pub fn cmd_spec1d(s: &InteractionStrengths, zgrid: usize) -> Result<Value> {
    if s.m <= 0.0 {
        return Err(ShellError::EmptyGap(s.m));
    }
    let closed = one_dim::discrete_spectrum_1d_closed_form(s)?;
    let numeric = one_dim::discrete_spectrum_1d_numeric(s, zgrid, 0.5)?;
    let ev_json = |e: &one_dim::Eigenvalue1D| -> Value {
        json!({
            "value": e.value,
            "branch": e.branch,
            "admissible": e.admissible,
            "gap_equation_residual": one_dim::gap_equation_1d(e.value, s).abs(),
            "bs_residual": one_dim::bs_residual_1d(e.value, s).unwrap_or(f64::NAN),
        })
    };
    let agreement: Vec<f64> = closed
        .iter()
        .zip(numeric.iter())
        .map(|(a, b)| (a.value - b.value).abs())
        .collect();
    Ok(json!({
        "schema": SCHEMA,
        "command": "spec1d",
        "config": { "eta": s.eta, "tau": s.tau, "lambda": s.lambda, "m": s.m, "q": 1,
                    "zgrid": zgrid },
        "classification": classify_strengths(s),
        "eigenvalues": closed.iter().map(ev_json).collect::<Vec<_>>(),
        "eigenvalues_numeric": numeric.iter().map(ev_json).collect::<Vec<_>>(),
        "closed_numeric_agreement": agreement,
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_spec2d(
    s: &InteractionStrengths,
    curve_spec: &str,
    n: usize,
    zgrid: usize,
    tol_bs: f64,
    tol_conv: f64,
    tol_jump: f64,
    verify_only: bool,
) -> Result<(Value, Option<String>)> {
    if s.m <= 0.0 {
        return Err(ShellError::EmptyGap(s.m));
    }
    if tol_bs <= 0.0 || tol_conv <= 0.0 || tol_jump <= 0.0 {
        return Err(ShellError::BadConfig("tolerances must be positive".into()));
    }
    let curve = parse_curve(curve_spec)?;
    let grid = build_grid(&curve, n)?;

    // discretization oracles, embedded for reproducibility
    let cinv = bem::cinv_residual(c(0.0, 0.0), s.m, &grid)?;
    let riesz = bem::riesz_square_residual(&grid)?;
    let herm = {
        let cop = bem::assemble_c(c(0.0, 0.0), s.m, &grid)?;
        linalg::hermiticity_defect(&cop.matrix)?
    };
    let oracles = json!({
        "cinv_residual": cinv,
        "riesz_square_residual": riesz,
        "c_hermiticity_defect": herm,
    });
    let config = json!({
        "eta": s.eta, "tau": s.tau, "lambda": s.lambda, "m": s.m, "q": 2,
        "curve": curve_spec, "n": n, "zgrid": zgrid,
        "tol_bs": tol_bs, "tol_conv": tol_conv, "tol_jump": tol_jump,
        "verify_only": verify_only,
    });

    if verify_only {
        let report = json!({
            "schema": SCHEMA,
            "command": "spec2d",
            "config": config,
            "oracles": oracles,
        });
        return Ok((report, None));
    }

    let opts = spectral::SolveOptions {
        scan_points: zgrid,
        tol_sigma: tol_bs,
        tol_conv,
        tol_jump,
        ..Default::default()
    };
    let (reports, scan, class) = spectral::find_eigenvalues(s, &curve, n, opts)?;

    let mut csv = String::from("z,sigma_min\n");
    for (z, sig) in scan.zs.iter().zip(&scan.sigma_min) {
        csv.push_str(&format!("{z:.17e},{sig:.17e}\n"));
    }

    let report = json!({
        "schema": SCHEMA,
        "command": "spec2d",
        "config": config,
        "classification": class,
        "oracles": oracles,
        "eigenvalues": reports.iter().map(|r| json!({
            "eigenvalue": r.eigenvalue,
            "sigma_min": r.sigma_min,
            "doubling_delta": r.doubling_delta,
            "jump_residual": r.jump_residual,
            "multiplicity": r.multiplicity,
            "n": r.n,
            "flags": r.flags,
        })).collect::<Vec<_>>(),
        "scan_points": scan.zs.len(),
    });
    Ok((report, Some(csv)))
}

struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
}

/// The full identity suite; returns the JSON report and the overall verdict.
pub fn cmd_verify(curve_spec: &str, n: usize, quick: bool, corrupt: bool) -> Result<(Value, bool)> {
    let n = if quick { 64 } else { n };
    let relax = if quick { 100.0 } else { 1.0 };
    let mut checks: Vec<Check> = Vec::new();

    // exact algebra
    for q in 1..=3 {
        let mut rep = build_dirac_matrices(q)?;
        if corrupt && q == 2 {
            rep.alphas[1] = &rep.alphas[1] + &rep.identity().mapv(|x| x * 1e-3);
        }
        checks.push(Check {
            name: match q {
                1 => "anticommutation_q1",
                2 => "anticommutation_q2",
                _ => "anticommutation_q3",
            },
            residual: verify_anticommutation(&rep),
            tolerance: 1e-13,
        });
    }
    {
        let rep = build_dirac_matrices(3)?;
        let r = symbol_factorization_check(&rep, 1.0, c(0.1, 0.3), &[0.7, -1.1, 0.4])?;
        checks.push(Check { name: "symbol_factorization", residual: r, tolerance: 1e-13 });
    }

    // fundamental-solution defect, all dimensions
    {
        let r1 = fundamental_solution_residual(&build_dirac_matrices(1)?, 1.0, c(0.0, 0.0), &[2.0], 1e-4)?;
        checks.push(Check { name: "defect_q1", residual: r1, tolerance: 1e-6 * relax });
        let r2 = fundamental_solution_residual(
            &build_dirac_matrices(2)?,
            1.0,
            c(0.3, 0.0),
            &[1.0, 0.0],
            1e-3,
        )?;
        checks.push(Check { name: "defect_q2", residual: r2, tolerance: 1e-4 * relax });
        let r3 = fundamental_solution_residual(
            &build_dirac_matrices(3)?,
            1.0,
            c(0.3, 0.0),
            &[0.8, -0.5, 0.3],
            1e-3,
        )?;
        checks.push(Check { name: "defect_q3", residual: r3, tolerance: 1e-4 * relax });
    }

    // 1D Green identity and closed-form agreement
    {
        let f = one_dim::PiecewiseFunction1D::witness(c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0), c(0.0, -0.5));
        let g = one_dim::PiecewiseFunction1D::witness(c(0.0, 2.0), c(1.0, 0.0), c(-1.0, 0.3), c(0.7, 0.0));
        let r = one_dim::green_identity_residual_1d(&f, &g, 1.0, one_dim::Quadrature1D::default());
        checks.push(Check { name: "green_identity_1d", residual: r, tolerance: 1e-8 * relax });

        let s1 = InteractionStrengths::new(1.0, 0.0, 0.0, 1.0);
        let cf = one_dim::discrete_spectrum_1d_closed_form(&s1)?;
        let nm = one_dim::discrete_spectrum_1d_numeric(&s1, 20_000, 0.5)?;
        let agree = cf
            .iter()
            .zip(&nm)
            .map(|(a, b)| (a.value - b.value).abs())
            .fold(0.0f64, f64::max)
            .max(if cf.len() == nm.len() { 0.0 } else { 1.0 });
        checks.push(Check { name: "spectrum_1d_agreement", residual: agree, tolerance: 1e-10 });
    }

    // 2D identities
    {
        let curve = parse_curve(curve_spec)?;
        let grid = build_grid(&curve, n)?;
        let cinv = bem::cinv_residual(c(0.0, 0.0), 1.0, &grid)?;
        checks.push(Check { name: "cinv_identity", residual: cinv, tolerance: 1e-6 * relax });
        let riesz = bem::riesz_square_residual(&grid)?;
        checks.push(Check { name: "riesz_square", residual: riesz, tolerance: 1e-6 * relax });
        let cop = bem::assemble_c(c(0.0, 0.0), 1.0, &grid)?;
        let herm = linalg::hermiticity_defect(&cop.matrix)?;
        checks.push(Check { name: "c_hermiticity", residual: herm, tolerance: 1e-8 * relax });

        let density = ndarray::Array1::from_shape_fn(2 * grid.n, |idx| {
            let t = (idx / 2) as f64 / grid.n as f64;
            if idx % 2 == 0 {
                c(1.0 + 0.3 * (2.0 * std::f64::consts::PI * t).cos(), 0.0)
            } else {
                c(0.0, 0.2 * (2.0 * std::f64::consts::PI * t).sin())
            }
        });
        let jump = bem::jump_relation_residual(c(0.0, 0.0), 1.0, &grid, &density)?;
        checks.push(Check { name: "jump_relation", residual: jump, tolerance: 1e-4 * relax });

        let b = bem::omega_bounds(&grid, bem::default_outlier_budget(grid.n))?;
        let omega_dev = (b.omega_min - 0.5).abs().max((b.omega_max - 0.5).abs());
        checks.push(Check { name: "omega_half", residual: omega_dev, tolerance: 0.05 * relax.min(2.0) });
    }

    // confinement identities
    {
        let rep = build_dirac_matrices(2)?;
        let mut worst_conf = 0.0f64;
        let mut worst_trans = 0.0f64;
        let mut state = 7u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0
        };
        for _ in 0..100 {
            let t = rnd() * std::f64::consts::PI;
            let nu = [t.cos(), t.sin()];
            // random d = -4 triple: pick tau, lambda, solve eta^2 = tau^2 + lambda^2 - 4 >= 0
            let tau = 2.0 + rnd().abs() * 2.0;
            let lambda = 1.0 + rnd().abs();
            let eta = (tau * tau + lambda * lambda - 4.0).max(0.0).sqrt();
            let s = InteractionStrengths::new(eta, tau, lambda, 1.0);
            let td = confinement::transmission_data(&s, &rep, &nu)?;
            let id = rep.identity();
            let p1 = (&id - &td.r).dot(&(&id + &td.r));
            worst_conf = worst_conf.max(linalg::max_norm(&p1));

            let s2 = InteractionStrengths::new(rnd() * 2.0, rnd() * 2.0, rnd() * 2.0, 1.0);
            if !s2.is_confinement() {
                let td2 = confinement::transmission_data(&s2, &rep, &nu)?;
                let q = td2.q.unwrap();
                let lhs = (&id - &td2.r).dot(&q);
                let rhs = &id + &td2.r;
                worst_trans = worst_trans.max(linalg::max_norm(&(lhs - rhs)));
            }
        }
        checks.push(Check { name: "confinement_decoupling", residual: worst_conf, tolerance: 1e-12 });
        checks.push(Check { name: "transmission_identity", residual: worst_trans, tolerance: 1e-12 });

        let samples: Vec<[f64; 2]> = (0..8)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
                [2.0 * t.cos(), 2.0 * t.sin()]
            })
            .collect();
        let zz = confinement::zigzag_kernel_check(&rep, 1.0, c(0.0, 0.0), 3, &samples, 1e-4)?;
        checks.push(Check { name: "zigzag_kernel", residual: zz, tolerance: 1e-6 * relax });
    }

    let pass = checks.iter().all(|ch| ch.residual <= ch.tolerance);
    let report = json!({
        "schema": SCHEMA,
        "command": "verify",
        "config": { "curve": curve_spec, "n": n, "quick": quick },
        "pass": pass,
        "checks": checks.iter().map(|ch| json!({
            "name": ch.name,
            "residual": ch.residual,
            "tolerance": ch.tolerance,
            "pass": ch.residual <= ch.tolerance,
        })).collect::<Vec<_>>(),
    });
    Ok((report, pass))
}
