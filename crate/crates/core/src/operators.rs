//! Evaluable operators Φ: ℝᵈ → ℝᵈ with Jacobians, the built-in catalog, and
//! Lipschitz-constant machinery for Φ and Φ′.
//!
//! Catalog (name → map, Lipschitz constant `L` of Φ′ in operator norm):
//!
//! | name            | Φ(x)                                        | L                           |
//! |-----------------|---------------------------------------------|-----------------------------|
//! | `example11`     | `(sin h(x₀), cos h(x₀))`, `h(t) = π sin(2πt²)` | none (Φ′ is not Lipschitz) |
//! | `prop11_circle` | `sin θ(x)·u + cos θ(x)·v`, `θ(x) = π⟨w, x−x₁⟩/⟨w, x₂−x₁⟩` | `π²‖w‖²/⟨w, x₂−x₁⟩²` |
//! | `affine`        | `A x + b`                                   | 0                           |
//! | `square_map`    | `s·(x₀² − x₁, x₁² − x₀)`                    | `2|s|`                      |
//! | `identity`      | `x`                                         | 0                           |
//! | `translation`   | `x + c`                                     | 0                           |
//!
//! For `prop11_circle` write `κ = π/⟨w, x₂−x₁⟩`. Then
//! `Φ′(x) = κ (cos θ·u − sin θ·v) wᵀ`, and with `u ⟂ v` unit vectors
//! `‖Φ′(x) − Φ′(y)‖ = κ‖w‖·|2 sin((θ(x) − θ(y))/2)| ≤ κ‖w‖·|θ(x) − θ(y)|
//! ≤ κ²‖w‖²·‖x − y‖`, so `L = κ²‖w‖²`. The same formula gives
//! `‖Φ′(x)‖ = κ‖w‖` everywhere.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_uniform, ConvexBody, SampleGrid};
use crate::linalg::{Matrix, Vector};

/// A catalog parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference { step: f64 },
}

/// Where the derivative's Lipschitz constant comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzProvenance {
    /// Derived in closed form for the catalog entry.
    Known,
    /// Supplied by the user; results are conditional on it.
    Asserted,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Example11,
    Circle {
        x1: Vector,
        w: Vector,
        u: Vector,
        v: Vector,
        kappa: f64,
    },
    Affine {
        a: Matrix,
        b: Vector,
    },
    SquareMap {
        scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorHandle {
    name: String,
    params: Params,
    kind: Kind,
    dim: usize,
    domain: Option<ConvexBody>,
    grad_lipschitz: Option<(f64, LipschitzProvenance)>,
    jacobian_mode: JacobianMode,
}

/// Serializable description of an operator handle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSummary {
    pub name: String,
    pub params: Params,
    pub dim: usize,
    pub grad_lipschitz: Option<f64>,
    pub lipschitz_provenance: Option<LipschitzProvenance>,
    pub jacobian_mode: JacobianMode,
    /// `false` for catalog entries whose derivative is known not to be Lipschitz.
    pub derivative_lipschitz: bool,
}

fn param_vector(params: &Params, name: &str, default: Option<Vec<f64>>) -> Result<Vector> {
    match params.get(name) {
        Some(ParamValue::Vector(v)) => Ok(Vector::new(v.clone())),
        Some(_) => Err(Error::InvalidParameter {
            name: name.into(),
            reason: "expected a vector".into(),
        }),
        None => default.map(Vector::new).ok_or_else(|| Error::InvalidParameter {
            name: name.into(),
            reason: "missing".into(),
        }),
    }
}

fn param_scalar(params: &Params, name: &str, default: f64) -> Result<f64> {
    match params.get(name) {
        Some(ParamValue::Scalar(s)) if s.is_finite() => Ok(*s),
        Some(_) => Err(Error::InvalidParameter {
            name: name.into(),
            reason: "expected a finite number".into(),
        }),
        None => Ok(default),
    }
}

fn check_allowed(params: &Params, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::InvalidParameter {
                name: key.clone(),
                reason: format!("not a parameter of this operator; expected one of {allowed:?}"),
            });
        }
    }
    Ok(())
}

fn check_finite_dim(v: &Vector, name: &str, dim: usize) -> Result<()> {
    if v.dim() != dim {
        return Err(Error::InvalidParameter {
            name: name.into(),
            reason: format!("expected dimension {dim}, found {}", v.dim()),
        });
    }
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            name: name.into(),
            reason: "non-finite entries".into(),
        });
    }
    Ok(())
}

pub const CATALOG: [&str; 6] = [
    "example11",
    "prop11_circle",
    "affine",
    "square_map",
    "identity",
    "translation",
];

/// Builds a catalog operator from its name and parameter record.
pub fn make_catalog_operator(name: &str, params: &Params) -> Result<OperatorHandle> {
    let (kind, dim, lip) = match name {
        "example11" => {
            check_allowed(params, &[])?;
            (Kind::Example11, 2, None)
        }
        "prop11_circle" => {
            check_allowed(params, &["x1", "x2", "w", "u", "v"])?;
            let x1 = param_vector(params, "x1", Some(vec![0.0, 0.0]))?;
            let d = x1.dim();
            let x2 = param_vector(params, "x2", Some(unit(d, 0)))?;
            let w = param_vector(params, "w", Some(unit(d, 0)))?;
            let u = param_vector(params, "u", Some(unit(d, 0)))?;
            let v = param_vector(params, "v", Some(unit(d, 1.min(d - 1))))?;
            for (n, p) in [("x1", &x1), ("x2", &x2), ("w", &w), ("u", &u), ("v", &v)] {
                check_finite_dim(p, n, d)?;
            }
            if (u.norm() - 1.0).abs() > 1e-12 || (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "u, v".into(),
                    reason: "must be unit vectors".into(),
                });
            }
            if u.dot(&v).abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "u, v".into(),
                    reason: "must be orthogonal".into(),
                });
            }
            let denom = w.dot(&(&x2 - &x1));
            if denom.abs() < 1e-12 * w.norm() * x2.dist(&x1).max(1.0) || denom == 0.0 {
                return Err(Error::InvalidParameter {
                    name: "w".into(),
                    reason: "⟨w, x2 − x1⟩ must be nonzero".into(),
                });
            }
            let kappa = PI / denom;
            let lip = kappa * kappa * w.norm_sq();
            (Kind::Circle { x1, w, u, v, kappa }, d, Some(lip))
        }
        "affine" => {
            check_allowed(params, &["A", "b"])?;
            let a = match params.get("A") {
                Some(ParamValue::Matrix(rows)) => Matrix::from_rows(rows).map_err(|e| {
                    Error::InvalidParameter {
                        name: "A".into(),
                        reason: e.to_string(),
                    }
                })?,
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "A".into(),
                        reason: "expected a square matrix".into(),
                    })
                }
            };
            let d = a.dim();
            if !a.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "A".into(),
                    reason: "non-finite entries".into(),
                });
            }
            let b = param_vector(params, "b", Some(vec![0.0; d]))?;
            check_finite_dim(&b, "b", d)?;
            (Kind::Affine { a, b }, d, Some(0.0))
        }
        "square_map" => {
            check_allowed(params, &["scale"])?;
            let scale = param_scalar(params, "scale", 1.0)?;
            (Kind::SquareMap { scale }, 2, Some(2.0 * scale.abs()))
        }
        "identity" => {
            check_allowed(params, &["dim"])?;
            let d = param_scalar(params, "dim", 2.0)?;
            if d.fract() != 0.0 || !(2.0..=16.0).contains(&d) {
                return Err(Error::InvalidParameter {
                    name: "dim".into(),
                    reason: "expected an integer in 2..=16".into(),
                });
            }
            let d = d as usize;
            (
                Kind::Affine {
                    a: Matrix::identity(d),
                    b: Vector::zeros(d),
                },
                d,
                Some(0.0),
            )
        }
        "translation" => {
            check_allowed(params, &["c"])?;
            let c = param_vector(params, "c", None)?;
            let d = c.dim();
            check_finite_dim(&c, "c", d)?;
            (
                Kind::Affine {
                    a: Matrix::identity(d),
                    b: c,
                },
                d,
                Some(0.0),
            )
        }
        other => return Err(Error::UnknownOperator(other.to_string())),
    };
    if !(2..=16).contains(&dim) {
        return Err(Error::InvalidParameter {
            name: name.into(),
            reason: format!("dimension {dim} outside 2..=16"),
        });
    }
    Ok(OperatorHandle {
        name: name.to_string(),
        params: params.clone(),
        kind,
        dim,
        domain: None,
        grad_lipschitz: lip.map(|l| (l, LipschitzProvenance::Known)),
        jacobian_mode: JacobianMode::Analytic,
    })
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

/// `h(t) = π sin(2πt²)` and its derivative.
fn example11_h(t: f64) -> (f64, f64) {
    let arg = 2.0 * PI * t * t;
    (PI * arg.sin(), 4.0 * PI * PI * t * arg.cos())
}

impl OperatorHandle {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Option<&ConvexBody> {
        self.domain.as_ref()
    }

    pub fn jacobian_mode(&self) -> JacobianMode {
        self.jacobian_mode
    }

    /// Lipschitz constant of Φ′ if known or asserted.
    pub fn grad_lipschitz(&self) -> Option<f64> {
        self.grad_lipschitz.map(|(l, _)| l)
    }

    pub fn lipschitz_provenance(&self) -> Option<LipschitzProvenance> {
        self.grad_lipschitz.map(|(_, p)| p)
    }

    pub fn derivative_lipschitz(&self) -> bool {
        !matches!(self.kind, Kind::Example11)
    }

    /// Restricts the domain to a convex body.
    pub fn with_domain(mut self, domain: ConvexBody) -> Result<Self> {
        domain.validate()?;
        if domain.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: domain.dim(),
            });
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn with_jacobian_mode(mut self, mode: JacobianMode) -> Self {
        self.jacobian_mode = mode;
        self
    }

    /// Replaces the derivative's Lipschitz constant with a user-asserted one.
    pub fn with_asserted_lipschitz(mut self, l: f64) -> Result<Self> {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "L".into(),
                reason: format!("expected a nonnegative finite value, got {l}"),
            });
        }
        self.grad_lipschitz = Some((l, LipschitzProvenance::Asserted));
        Ok(self)
    }

    pub fn summary(&self) -> OperatorSummary {
        OperatorSummary {
            name: self.name.clone(),
            params: self.params.clone(),
            dim: self.dim,
            grad_lipschitz: self.grad_lipschitz(),
            lipschitz_provenance: self.lipschitz_provenance(),
            jacobian_mode: self.jacobian_mode,
            derivative_lipschitz: self.derivative_lipschitz(),
        }
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        x.check_dim(self.dim)?;
        if !x.is_finite() {
            return Err(Error::OutOfDomain { point: x.clone() });
        }
        if let Some(dom) = &self.domain {
            if !crate::geometry::contains(dom, x, 1e-9) {
                return Err(Error::OutOfDomain { point: x.clone() });
            }
        }
        Ok(())
    }

    fn eval_raw(&self, x: &Vector) -> Vector {
        match &self.kind {
            Kind::Example11 => {
                let (h, _) = example11_h(x[0]);
                Vector::new(vec![h.sin(), h.cos()])
            }
            Kind::Circle { x1, w, u, v, kappa } => {
                let theta = kappa * w.dot(&(x - x1));
                &(u * theta.sin()) + &(v * theta.cos())
            }
            Kind::Affine { a, b } => &a.mul_vec(x) + b,
            Kind::SquareMap { scale } => Vector::new(vec![
                scale * (x[0] * x[0] - x[1]),
                scale * (x[1] * x[1] - x[0]),
            ]),
        }
    }

    fn jacobian_analytic(&self, x: &Vector) -> Matrix {
        match &self.kind {
            Kind::Example11 => {
                let (h, dh) = example11_h(x[0]);
                let mut j = Matrix::zeros(2);
                j.set(0, 0, h.cos() * dh);
                j.set(1, 0, -h.sin() * dh);
                j
            }
            Kind::Circle { x1, w, u, v, kappa } => {
                let theta = kappa * w.dot(&(x - x1));
                let col = &(u * (kappa * theta.cos())) - &(v * (kappa * theta.sin()));
                let mut j = Matrix::zeros(self.dim);
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        j.set(r, c, col[r] * w[c]);
                    }
                }
                j
            }
            Kind::Affine { a, .. } => a.clone(),
            Kind::SquareMap { scale } => Matrix::from_rows(&[
                vec![scale * 2.0 * x[0], -scale],
                vec![-scale, scale * 2.0 * x[1]],
            ])
            .expect("2x2"),
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        self.check_point(x)?;
        Ok(self.eval_raw(x))
    }

    pub fn jacobian(&self, x: &Vector) -> Result<Matrix> {
        self.check_point(x)?;
        Ok(match self.jacobian_mode {
            JacobianMode::Analytic => self.jacobian_analytic(x),
            JacobianMode::FiniteDifference { step } => self.jacobian_fd(x, step),
        })
    }

    /// Central-difference Jacobian with step `step`.
    pub fn jacobian_fd(&self, x: &Vector, step: f64) -> Matrix {
        let d = self.dim;
        let mut j = Matrix::zeros(d);
        for c in 0..d {
            let e = Vector::unit(d, c);
            let fp = self.eval_raw(&x.add_scaled(step, &e));
            let fm = self.eval_raw(&x.add_scaled(-step, &e));
            for r in 0..d {
                j.set(r, c, (fp[r] - fm[r]) / (2.0 * step));
            }
        }
        j
    }
}

const POWER_MAX_ITERATIONS: usize = 100_000;

/// Spectral norm by power iteration on `MᵀM`, stopping when the Rayleigh
/// quotient changes by at most `rel_tol` relative.
pub fn operator_norm_with(m: &Matrix, rel_tol: f64) -> Result<f64> {
    let d = m.dim();
    if !m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "matrix".into(),
            reason: "non-finite entries".into(),
        });
    }
    if m.frobenius() == 0.0 {
        return Ok(0.0);
    }
    // Deterministic start with no special alignment to coordinate axes.
    let golden = 0.618_033_988_749_894_9;
    let mut x = Vector::new((0..d).map(|i| 1.0 + ((i as f64 + 1.0) * golden).fract()).collect());
    let n = x.norm();
    x = &x * (1.0 / n);
    let mut lambda = 0.0_f64;
    let mut previous;
    for it in 0..POWER_MAX_ITERATIONS {
        let y = m.tr_mul_vec(&m.mul_vec(&x));
        previous = lambda;
        lambda = x.dot(&y);
        let ny = y.norm();
        if ny == 0.0 {
            // Start vector in the kernel; restart along a coordinate axis.
            x = Vector::unit(d, it % d);
            continue;
        }
        x = &y * (1.0 / ny);
        if it > 0 && (lambda - previous).abs() <= rel_tol * lambda {
            let mx = m.mul_vec(&x).norm();
            return Ok(mx.max(lambda.sqrt()));
        }
    }
    Err(Error::PowerIteration {
        iterations: POWER_MAX_ITERATIONS,
        last: lambda.sqrt(),
        previous: lambda.sqrt(),
    })
}

pub fn operator_norm(m: &Matrix) -> Result<f64> {
    operator_norm_with(m, 1e-10)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    /// Largest sampled quotient; a lower estimate of the true constant.
    pub value: f64,
    pub n_pairs: usize,
    pub argmax_pair: (Vector, Vector),
    pub is_lower_estimate: bool,
}

/// Max over seeded uniform pairs `(x, y)` in `region` of
/// `‖Φ′(x) − Φ′(y)‖ / ‖x − y‖`.
pub fn estimate_grad_lipschitz(
    op: &OperatorHandle,
    region: &ConvexBody,
    n_pairs: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    region.validate()?;
    if region.is_singleton() || crate::geometry::diameter(region) == 0.0 {
        return Err(Error::UndefinedQuotient("region is a single point".into()));
    }
    if n_pairs == 0 {
        return Err(Error::UndefinedQuotient("no pairs requested".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = LipschitzEstimate {
        value: 0.0,
        n_pairs,
        argmax_pair: (Vector::zeros(op.dim), Vector::zeros(op.dim)),
        is_lower_estimate: true,
    };
    let mut first = true;
    for _ in 0..n_pairs {
        let x = sample_uniform(region, &mut rng)?;
        let y = sample_uniform(region, &mut rng)?;
        let dist = x.dist(&y);
        if dist == 0.0 {
            continue;
        }
        let q = operator_norm(&op.jacobian(&x)?.sub(&op.jacobian(&y)?))? / dist;
        if first || q > best.value {
            best.value = q;
            best.argmax_pair = (x, y);
            first = false;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapLipschitz {
    /// `max_grid ‖Φ′‖ + L·covering_radius` when L is available.
    pub value: f64,
    pub max_jacobian_norm: f64,
    pub covering_radius: f64,
    /// `true` when the value is a guaranteed upper bound on the region.
    pub certified: bool,
}

/// Upper bound on the Lipschitz constant of Φ over the body sampled by `grid`.
pub fn estimate_map_lipschitz(op: &OperatorHandle, grid: &SampleGrid) -> Result<MapLipschitz> {
    let mut max_norm = 0.0_f64;
    for x in &grid.points {
        max_norm = max_norm.max(operator_norm(&op.jacobian(x)?)?);
    }
    let (value, certified) = match op.grad_lipschitz() {
        Some(l) => (max_norm + l * grid.covering_radius, true),
        None => (max_norm, grid.covering_radius == 0.0),
    };
    Ok(MapLipschitz {
        value,
        max_jacobian_norm: max_norm,
        covering_radius: grid.covering_radius,
        certified,
    })
}
