//! Smooth closed planar curves with analytic derivatives, outward normals,
//! and the 1-periodic quadrature grids consumed by the boundary-element
//! assembly. Parametrizations live on [0,1) and run counter-clockwise, so
//! the outward normal is (gamma_2', -gamma_1')/|gamma'|.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Result, ShellError};

type CurveFn = dyn Fn(f64) -> [f64; 2] + Send + Sync;

/// A smooth 1-periodic closed curve with first and second derivatives.
#[derive(Clone)]
pub struct ClosedCurve {
    pub label: String,
    point: Arc<CurveFn>,
    d1: Arc<CurveFn>,
    d2: Arc<CurveFn>,
}

impl std::fmt::Debug for ClosedCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClosedCurve({})", self.label)
    }
}

impl ClosedCurve {
    pub fn new(
        label: impl Into<String>,
        point: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        d1: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        d2: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        ClosedCurve {
            label: label.into(),
            point: Arc::new(point),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        (self.point)(t)
    }

    pub fn deriv(&self, t: f64) -> [f64; 2] {
        (self.d1)(t)
    }

    pub fn deriv2(&self, t: f64) -> [f64; 2] {
        (self.d2)(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        let d = self.deriv(t);
        d[0].hypot(d[1])
    }

    /// Outward unit normal for the counter-clockwise orientation.
    pub fn normal(&self, t: f64) -> [f64; 2] {
        let d = self.deriv(t);
        let s = d[0].hypot(d[1]);
        [d[1] / s, -d[0] / s]
    }

    /// Arc length by fine trapezoid quadrature (spectrally accurate for the
    /// analytic built-ins).
    pub fn length(&self, nodes: usize) -> f64 {
        let n = nodes.max(64);
        (0..n).map(|j| self.speed(j as f64 / n as f64)).sum::<f64>() / n as f64
    }

    /// The same curve rotated by `angle` and then translated; used by the
    /// rigid-motion invariance checks.
    pub fn rigid_motion(&self, angle: f64, shift: [f64; 2]) -> ClosedCurve {
        let (s, c) = angle.sin_cos();
        let rot = move |p: [f64; 2]| [c * p[0] - s * p[1], s * p[0] + c * p[1]];
        let p0 = self.point.clone();
        let p1 = self.d1.clone();
        let p2 = self.d2.clone();
        ClosedCurve {
            label: format!("{}+rigid", self.label),
            point: Arc::new(move |t| {
                let q = rot(p0(t));
                [q[0] + shift[0], q[1] + shift[1]]
            }),
            d1: Arc::new(move |t| rot(p1(t))),
            d2: Arc::new(move |t| rot(p2(t))),
        }
    }

    /// The same geometry parametrized from a shifted starting point; grid
    /// matrices built on it are index-permutations of the original.
    pub fn with_parameter_shift(&self, shift: f64) -> ClosedCurve {
        let p0 = self.point.clone();
        let p1 = self.d1.clone();
        let p2 = self.d2.clone();
        ClosedCurve {
            label: format!("{}+shift", self.label),
            point: Arc::new(move |t| p0(t + shift)),
            d1: Arc::new(move |t| p1(t + shift)),
            d2: Arc::new(move |t| p2(t + shift)),
        }
    }
}

/// Built-in analytic test shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    Kite,
    Star { eps: f64, k: usize },
}

pub fn builtin_curve(kind: CurveKind) -> Result<ClosedCurve> {
    let tau = 2.0 * PI;
    match kind {
        CurveKind::Circle { r } => {
            if r <= 0.0 {
                return Err(ShellError::DegenerateCurve(format!("circle radius {r}")));
            }
            Ok(ClosedCurve::new(
                format!("circle:r={r}"),
                move |t| [r * (tau * t).cos(), r * (tau * t).sin()],
                move |t| [-r * tau * (tau * t).sin(), r * tau * (tau * t).cos()],
                move |t| [-r * tau * tau * (tau * t).cos(), -r * tau * tau * (tau * t).sin()],
            ))
        }
        CurveKind::Ellipse { a, b } => {
            if a <= 0.0 || b <= 0.0 {
                return Err(ShellError::DegenerateCurve(format!("ellipse axes {a}, {b}")));
            }
            Ok(ClosedCurve::new(
                format!("ellipse:a={a},b={b}"),
                move |t| [a * (tau * t).cos(), b * (tau * t).sin()],
                move |t| [-a * tau * (tau * t).sin(), b * tau * (tau * t).cos()],
                move |t| [-a * tau * tau * (tau * t).cos(), -b * tau * tau * (tau * t).sin()],
            ))
        }
        CurveKind::Kite => Ok(ClosedCurve::new(
            "kite",
            move |t| {
                let u = tau * t;
                [u.cos() + 0.65 * (2.0 * u).cos() - 0.65, 1.5 * u.sin()]
            },
            move |t| {
                let u = tau * t;
                [tau * (-u.sin() - 1.3 * (2.0 * u).sin()), 1.5 * tau * u.cos()]
            },
            move |t| {
                let u = tau * t;
                [-tau * tau * (u.cos() + 2.6 * (2.0 * u).cos()), -1.5 * tau * tau * u.sin()]
            },
        )),
        CurveKind::Star { eps, k } => {
            if eps < 0.0 || k == 0 || eps > 1.0 / k as f64 {
                return Err(ShellError::DegenerateCurve(format!(
                    "star requires 0 <= eps <= 1/k, got eps={eps}, k={k}"
                )));
            }
            let kf = k as f64;
            let rad = move |t: f64| 1.0 + eps * (tau * kf * t).cos();
            let drad = move |t: f64| -eps * tau * kf * (tau * kf * t).sin();
            let ddrad = move |t: f64| -eps * tau * tau * kf * kf * (tau * kf * t).cos();
            Ok(ClosedCurve::new(
                format!("star:eps={eps},k={k}"),
                move |t| {
                    let r = rad(t);
                    [r * (tau * t).cos(), r * (tau * t).sin()]
                },
                move |t| {
                    let (r, dr) = (rad(t), drad(t));
                    let (sn, cs) = (tau * t).sin_cos();
                    [dr * cs - r * tau * sn, dr * sn + r * tau * cs]
                },
                move |t| {
                    let (r, dr, ddr) = (rad(t), drad(t), ddrad(t));
                    let (sn, cs) = (tau * t).sin_cos();
                    [
                        ddr * cs - 2.0 * dr * tau * sn - r * tau * tau * cs,
                        ddr * sn + 2.0 * dr * tau * cs - r * tau * tau * sn,
                    ]
                },
            ))
        }
    }
}

/// Parses CLI curve specs such as "circle:r=1.0", "ellipse:a=2,b=1", "kite",
/// "star:eps=0.2,k=5".
pub fn parse_curve(spec: &str) -> Result<ClosedCurve> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), a.trim()),
        None => (spec.trim(), ""),
    };
    let mut kv = std::collections::HashMap::new();
    for part in args.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| ShellError::CurveParse(format!("expected key=value in `{part}`")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| ShellError::CurveParse(format!("bad number `{v}` in `{spec}`")))?;
        kv.insert(k.trim().to_string(), val);
    }
    let get = |k: &str, default: Option<f64>| -> Result<f64> {
        kv.get(k)
            .copied()
            .or(default)
            .ok_or_else(|| ShellError::CurveParse(format!("missing parameter `{k}` in `{spec}`")))
    };
    let kind = match name {
        "circle" => CurveKind::Circle { r: get("r", Some(1.0))? },
        "ellipse" => CurveKind::Ellipse { a: get("a", None)?, b: get("b", None)? },
        "kite" => CurveKind::Kite,
        "star" => CurveKind::Star { eps: get("eps", Some(0.2))?, k: get("k", Some(5.0))? as usize },
        other => return Err(ShellError::CurveParse(format!("unknown curve `{other}`"))),
    };
    builtin_curve(kind)
}

/// Uniform periodic quadrature grid: nodes t_j = j/N, arc-length trapezoid
/// weights w_j = |gamma'(t_j)|/N.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub curve: Arc<ClosedCurve>,
    pub n: usize,
    pub ts: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub derivs: Vec<[f64; 2]>,
    pub derivs2: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub speeds: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn build_grid(curve: &ClosedCurve, n: usize) -> Result<QuadratureGrid> {
    if n < 16 || n % 2 != 0 {
        return Err(ShellError::BadGridSize(n));
    }
    let ts: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let points: Vec<_> = ts.iter().map(|&t| curve.point(t)).collect();
    let derivs: Vec<_> = ts.iter().map(|&t| curve.deriv(t)).collect();
    let derivs2: Vec<_> = ts.iter().map(|&t| curve.deriv2(t)).collect();
    let speeds: Vec<f64> = derivs.iter().map(|d| d[0].hypot(d[1])).collect();
    if speeds.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(ShellError::DegenerateCurve("vanishing tangent".into()));
    }
    let normals: Vec<_> = derivs
        .iter()
        .zip(&speeds)
        .map(|(d, &s)| [d[1] / s, -d[0] / s])
        .collect();
    let weights: Vec<f64> = speeds.iter().map(|s| s / n as f64).collect();
    Ok(QuadratureGrid {
        curve: Arc::new(curve.clone()),
        n,
        ts,
        points,
        derivs,
        derivs2,
        normals,
        speeds,
        weights,
    })
}

impl QuadratureGrid {
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn signed_area(&self) -> f64 {
        // (1/2) oint (x dy - y dx)
        let mut acc = 0.0;
        for j in 0..self.n {
            acc += self.points[j][0] * self.derivs[j][1] - self.points[j][1] * self.derivs[j][0];
        }
        0.5 * acc / self.n as f64
    }

    /// Minimal distance from an off-curve point to the grid nodes.
    pub fn distance_to_nodes(&self, x: [f64; 2]) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (j, p) in self.points.iter().enumerate() {
            let d = (x[0] - p[0]).hypot(x[1] - p[1]);
            if d < best.0 {
                best = (d, j);
            }
        }
        best
    }
}
