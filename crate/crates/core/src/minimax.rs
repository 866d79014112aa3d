//! Hull certificates for `0 ∈ conv Φ(X)` and sampled minimax values of
//! `f(x, y) = ⟨Φ(x), y⟩` over `X × Y`, `Y` the closed unit ball.
//!
//! The ball `Y` is never sampled:
//!
//! * `sup_{y∈Y} ⟨s, y⟩ = ‖s‖` (Cauchy–Schwarz, equality at `y = s/‖s‖`), so
//!   `inf_X sup_Y f = inf_X ‖Φ(x)‖`;
//! * for a finite image set `S`, `sup_{y∈Y} min_{s∈S} ⟨s, y⟩ = dist(0, conv S)`:
//!   `min_S ⟨s, y⟩ = min_{conv S} ⟨p, y⟩ ≤ ⟨p*, y⟩ ≤ ‖p*‖` for the nearest
//!   point `p*`, and `y = p*/‖p*‖` attains it by the projection inequality
//!   `⟨s − p*, p*⟩ ≥ 0` (or `y = 0` when `p* = 0`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delta::{delta_upper_extension, PsiData};
use crate::error::{Error, Result};
use crate::geometry::{random_unit_vector, sample_uniform, ConvexBody, SampleGrid};
use crate::linalg::Vector;
use crate::operators::{estimate_map_lipschitz, MapLipschitz, OperatorHandle};
use crate::optim::{min_norm_point, MinNormResult};

/// Frank–Wolfe gap target used for all hull computations here.
const FW_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HullWitness {
    /// `‖Σ λᵢ Φ(xᵢ)‖ = residual ≤ tol` with λ on the simplex.
    Membership { weights: Vec<f64>, residual: f64 },
    /// `⟨Φ(xᵢ), direction⟩ ≥ margin > 0` for every sample. Says nothing about
    /// points of `Φ(X)` between samples.
    SampleSeparation {
        direction: Vector,
        margin: f64,
        scope: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullCertificate {
    pub witness: HullWitness,
    pub tol: f64,
    pub sample_points: Vec<Vector>,
    pub images: Vec<Vector>,
}

pub const SAMPLE_SCOPE: &str = "sample hull only";

impl HullCertificate {
    pub fn is_membership(&self) -> bool {
        matches!(self.witness, HullWitness::Membership { .. })
    }

    /// Residual for memberships, `None` for separations.
    pub fn residual(&self) -> Option<f64> {
        match self.witness {
            HullWitness::Membership { residual, .. } => Some(residual),
            _ => None,
        }
    }

    /// Recomputes the witness from the stored images.
    pub fn validate(&self) -> Result<()> {
        match &self.witness {
            HullWitness::Membership { weights, residual } => {
                if weights.len() != self.images.len() || weights.iter().any(|&w| w < 0.0) {
                    return Err(Error::Inconsistent("membership weights malformed".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::Inconsistent(format!("weights sum to {total}")));
                }
                let r = Vector::combination(&self.images, weights).norm();
                if (r - residual).abs() > 1e-10 || r > self.tol {
                    return Err(Error::Inconsistent(format!(
                        "membership residual {r:e} (stored {residual:e}, tol {:e})",
                        self.tol
                    )));
                }
            }
            HullWitness::SampleSeparation {
                direction, margin, ..
            } => {
                if *margin <= 0.0 {
                    return Err(Error::Inconsistent("non-positive margin".into()));
                }
                for s in &self.images {
                    let m = s.dot(direction);
                    if m < margin - 1e-10 {
                        return Err(Error::Inconsistent(format!(
                            "sample {s:?} has margin {m:e} < {margin:e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn images_of(op: &OperatorHandle, points: &[Vector]) -> Result<Vec<Vector>> {
    points.iter().map(|x| op.eval(x)).collect()
}

/// Decides `0 ∈ conv{Φ(xᵢ)}` up to `tol` for the grid points.
pub fn hull_certificate(op: &OperatorHandle, grid: &SampleGrid, tol: f64) -> Result<HullCertificate> {
    let images = images_of(op, &grid.points)?;
    hull_certificate_from_images(grid.points.clone(), images, tol)
}

pub fn hull_certificate_from_images(
    sample_points: Vec<Vector>,
    images: Vec<Vector>,
    tol: f64,
) -> Result<HullCertificate> {
    if images.is_empty() {
        return Err(Error::InvalidParameter {
            name: "images".into(),
            reason: "empty".into(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol".into(),
            reason: "must be positive".into(),
        });
    }
    let nearest = min_norm_point(&images, tol.min(FW_TOL.sqrt()));
    let witness = if nearest.norm <= tol {
        HullWitness::Membership {
            residual: nearest.norm,
            weights: nearest.weights,
        }
    } else {
        let direction = &nearest.point * (1.0 / nearest.norm);
        let achieved = images
            .iter()
            .map(|s| s.dot(&direction))
            .fold(f64::INFINITY, f64::min);
        let margin = (nearest.norm - tol).min(achieved);
        if margin <= 0.0 {
            return Err(Error::Inconsistent(format!(
                "nearest point has norm {:e} but its direction only separates with margin {achieved:e}",
                nearest.norm
            )));
        }
        HullWitness::SampleSeparation {
            direction,
            margin,
            scope: SAMPLE_SCOPE.into(),
        }
    };
    let cert = HullCertificate {
        witness,
        tol,
        sample_points,
        images,
    };
    cert.validate()?;
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport {
    /// `minᵢ ‖Φ(xᵢ)‖`.
    pub inf_sup: f64,
    /// `dist(0, conv{Φ(xᵢ)})` as the norm of the computed nearest point.
    pub sup_inf: f64,
    /// Certified lower bound on the sampled distance.
    pub sup_inf_lower: f64,
    pub gap: f64,
    pub argmin_index: usize,
    pub nearest_point: Vector,
    pub covering_radius: f64,
    pub map_lipschitz: MapLipschitz,
    /// `M · covering_radius`: how far the sampled values can sit above the
    /// values over the whole body.
    pub discretization_slack: f64,
    pub slack_certified: bool,
    /// `(L/2) · osc` over the grid, filled in by the gap check.
    pub rhs_bound: Option<f64>,
}

pub fn minimax_values(op: &OperatorHandle, grid: &SampleGrid) -> Result<MinimaxReport> {
    if grid.points.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            reason: "empty".into(),
        });
    }
    let images = images_of(op, &grid.points)?;
    let map = estimate_map_lipschitz(op, grid)?;
    let mut report = minimax_from_images(&images, grid.covering_radius, map);
    report.rhs_bound = None;
    Ok(report)
}

/// Minimax values for a given image set.
pub fn minimax_from_images(images: &[Vector], covering_radius: f64, map: MapLipschitz) -> MinimaxReport {
    let (argmin_index, inf_sup) = images
        .iter()
        .map(Vector::norm)
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, n)| if n < best.1 { (i, n) } else { best });
    let nearest: MinNormResult = min_norm_point(images, FW_TOL);
    let sup_inf = nearest.norm.min(inf_sup);
    let sup_inf_lower = nearest.distance_lower_bound(images);
    MinimaxReport {
        inf_sup,
        sup_inf,
        sup_inf_lower,
        gap: inf_sup - sup_inf,
        argmin_index,
        nearest_point: nearest.point,
        covering_radius,
        discretization_slack: map.value * covering_radius,
        slack_certified: map.certified,
        map_lipschitz: map,
        rhs_bound: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub holds: bool,
    /// Sampled `inf_X sup_Y f − sup_Y inf_X f`.
    pub lhs: f64,
    /// `(L/2) · osc` of `‖xᵢ‖² + ψᵢ` over the grid.
    pub rhs: f64,
    /// Total allowance: `M·h` plus `(L/2)` times the part of the body
    /// oscillation not seen by the grid.
    pub slack: f64,
    pub oscillation_excess: f64,
    pub report: MinimaxReport,
}

/// Sampled check of `inf_X sup_Y f − sup_Y inf_X f ≤ sup_X φ − inf_X φ`,
/// `φ = (L/2)(‖x‖² + ψ)`, with ψ the max-of-affine extension of `psi`.
pub fn gap_inequality_check(
    op: &OperatorHandle,
    body: &ConvexBody,
    psi: &PsiData,
    grid: &SampleGrid,
    l: f64,
) -> Result<GapCheck> {
    if !(l.is_finite() && l >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "L".into(),
            reason: format!("expected a nonnegative finite value, got {l}"),
        });
    }
    let scale = grid
        .points
        .iter()
        .chain(&psi.points)
        .map(Vector::norm)
        .fold(1.0_f64, f64::max);
    psi.check_interpolable(1e-8 * scale * scale)?;
    let values: Vec<f64> = if psi.points == grid.points {
        psi.values.clone()
    } else {
        grid.points.iter().map(|x| psi.extension(x).0).collect()
    };
    let (lo, hi) = grid
        .points
        .iter()
        .zip(&values)
        .map(|(x, v)| x.norm_sq() + v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
    let osc_grid = hi - lo;

    // Oscillation of ‖x‖² + ψ̂ over the body, from above.
    let osc_body = match body {
        ConvexBody::Ball { center, radius } => {
            let gmax = psi.subgradients.iter().map(Vector::norm).fold(0.0, f64::max);
            let lip = 2.0 * (center.norm() + radius) + gmax;
            osc_grid + 2.0 * lip * grid.covering_radius
        }
        _ => delta_upper_extension(body, psi, 1e-9)?.upper,
    };
    let oscillation_excess = (osc_body - osc_grid).max(0.0);

    let mut report = minimax_values(op, grid)?;
    let rhs = 0.5 * l * osc_grid;
    report.rhs_bound = Some(rhs);
    let slack = report.discretization_slack + 0.5 * l * oscillation_excess;
    let lhs = report.gap;
    Ok(GapCheck {
        holds: lhs <= rhs + slack + 1e-9,
        lhs,
        rhs,
        slack,
        oscillation_excess,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub violations: usize,
    /// Most negative residual seen (0 when every check passed with room).
    pub worst: f64,
    pub trials: usize,
}

/// Monotonicity of `x ↦ Lx + f′_x(x, y)` and midpoint convexity of
/// `x ↦ (L/2)‖x‖² + ⟨Φ(x), y⟩` on seeded random pairs and unit directions.
pub fn convexity_mechanism_check(
    op: &OperatorHandle,
    body: &ConvexBody,
    l: f64,
    n_trials: usize,
    seed: u64,
) -> Result<ConvexityCheck> {
    body.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = body.dim();
    let mut violations = 0;
    let mut worst = 0.0_f64;
    let f = |x: &Vector, y: &Vector| -> Result<f64> { Ok(0.5 * l * x.norm_sq() + op.eval(x)?.dot(y)) };
    for _ in 0..n_trials {
        let v = sample_uniform(body, &mut rng)?;
        let w = sample_uniform(body, &mut rng)?;
        let y = random_unit_vector(d, &mut rng);
        let dvw = &v - &w;
        let jdiff = op.jacobian(&v)?.sub(&op.jacobian(&w)?);
        let mono = l * dvw.norm_sq() + jdiff.tr_mul_vec(&y).dot(&dvw);
        let mid = v.lerp(&w, 0.5);
        let convex = 0.5 * (f(&v, &y)? + f(&w, &y)?) - f(&mid, &y)?;
        for r in [mono, convex] {
            if r < -1e-9 {
                violations += 1;
            }
            worst = worst.min(r);
        }
    }
    Ok(ConvexityCheck {
        violations,
        worst,
        trials: n_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample;
    use crate::operators::{make_catalog_operator, ParamValue, Params};

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }

    fn op(name: &str) -> OperatorHandle {
        make_catalog_operator(name, &Params::new()).unwrap()
    }

    fn dummy_map() -> MapLipschitz {
        MapLipschitz {
            value: 0.0,
            max_jacobian_norm: 0.0,
            covering_radius: 0.0,
            certified: true,
        }
    }

    #[test]
    fn minimax_on_image_sets() {
        let r = minimax_from_images(&[v(&[0., 1.]), v(&[0., -1.])], 0.0, dummy_map());
        assert_eq!((r.inf_sup, r.gap), (1.0, 1.0));
        assert!(r.sup_inf < 1e-12);
        let r = minimax_from_images(&[v(&[2., 0.])], 0.0, dummy_map());
        assert_eq!((r.inf_sup, r.sup_inf, r.gap), (2.0, 2.0, 0.0));
        let r = minimax_from_images(&[v(&[1., 0.]), v(&[0., 1.])], 0.0, dummy_map());
        assert!((r.gap - (1.0 - 0.5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn example11_first_segment_is_member() {
        let body = ConvexBody::segment(v(&[1., 0.]), v(&[1.75f64.sqrt(), 0.])).unwrap();
        let cert = hull_certificate(&op("example11"), &sample(&body, 32).unwrap(), 1e-6).unwrap();
        assert!(cert.is_membership());
    }

    #[test]
    fn translated_ball_is_separated() {
        let mut p = Params::new();
        p.insert("c".into(), ParamValue::Vector(vec![0.0, 2.0]));
        let t = make_catalog_operator("translation", &p).unwrap();
        let ball = ConvexBody::ball(v(&[0., 0.]), 1.0).unwrap();
        let cert = hull_certificate(&t, &sample(&ball, 8).unwrap(), 1e-6).unwrap();
        match cert.witness {
            HullWitness::SampleSeparation { direction, margin, .. } => {
                // The outer ring has no sample exactly below the center.
                assert!(direction.dist(&v(&[0., 1.])) < 0.05, "{direction:?}");
                assert!(margin >= 1.0 - 1e-6);
            }
            _ => panic!("expected separation"),
        }
    }

    #[test]
    fn identity_through_origin() {
        let body = ConvexBody::segment(v(&[-1., 0.]), v(&[1., 0.])).unwrap();
        let cert = hull_certificate(&op("identity"), &sample(&body, 3).unwrap(), 1e-6).unwrap();
        assert!(cert.residual().unwrap() <= 1e-6);
    }

    #[test]
    fn gap_on_circle_operator() {
        let body = ConvexBody::segment(v(&[0., 0.]), v(&[1., 0.])).unwrap();
        let grid = sample(&body, 64).unwrap();
        let bounds = crate::delta::delta_bounds(&body, 64).unwrap();
        let l = std::f64::consts::PI.powi(2);
        let g = gap_inequality_check(&op("prop11_circle"), &body, &bounds.lower_witness, &grid, l).unwrap();
        assert!(g.holds);
        assert!((g.lhs - 1.0).abs() < 1e-9);
        assert!((g.rhs - l / 8.0).abs() < 1e-9, "{}", g.rhs);
    }

    #[test]
    fn gap_on_identity_collinear() {
        let body = ConvexBody::segment(v(&[1., 0.]), v(&[2., 0.])).unwrap();
        let grid = sample(&body, 8).unwrap();
        let psi = PsiData::zero(grid.points.clone());
        let g = gap_inequality_check(&op("identity"), &body, &psi, &grid, 0.0).unwrap();
        assert!(g.holds && g.lhs.abs() < 1e-9 && g.rhs == 0.0);
    }

    #[test]
    fn convexity_controls() {
        let sq = ConvexBody::axis_box(&v(&[-1., -1.]), &v(&[1., 1.])).unwrap();
        let good = convexity_mechanism_check(&op("square_map"), &sq, 2.0, 300, 7).unwrap();
        assert_eq!(good.violations, 0);
        let bad = convexity_mechanism_check(&op("square_map"), &sq, 0.1, 300, 7).unwrap();
        assert!(bad.violations > 0);
    }
}
