//! Two-sided bounds on the convexity defect
//! `δ_X = inf_ψ [sup_X (‖x‖² + ψ) − inf_X (‖x‖² + ψ)]`, ψ convex on X.
//!
//! Lower bounds:
//!
//! * the segment floor `diam(X)²/4`: restricting any convex ψ to a diameter
//!   segment `[a, b]` gives a convex function of `t ∈ [0, 1]`, and
//!   `‖a + t(b−a)‖²` differs from `ct²` (`c = ‖b−a‖²`) by an affine term that
//!   can be absorbed into ψ. With `φ(t) = ct² + ψ(t)` midpoint convexity gives
//!   `φ(½) ≤ (φ(0) + φ(1))/2 − c/4`, so the oscillation is at least `c/4`;
//! * an LP relaxation over convex-interpolable data on a grid. Any convex ψ
//!   restricted to grid points is feasible and its sampled oscillation is at
//!   most the true one, so the LP optimum never exceeds `δ_X`;
//! * the barycentric bound: for convex weights `wⱼ` on points `yⱼ ∈ X` with
//!   barycenter `c`, Jensen gives `Σ wⱼ ψ(yⱼ) ≥ ψ(c)`, hence
//!   `osc ≥ Σ wⱼ (‖yⱼ‖² + ψ(yⱼ)) − (‖c‖² + ψ(c)) ≥ Σ wⱼ ‖yⱼ − c‖²`.
//!   With the optimal weights of the minimum enclosing ball this equals the
//!   squared radius, which is also the recentering upper bound below.
//!
//! Upper bounds come from explicit members of the convex family:
//!
//! * recentering `ψ(x) = −2⟨c, x⟩ + ‖c‖²` with `c` the enclosing-ball center,
//!   which turns `‖x‖² + ψ` into `‖x − c‖²`;
//! * the max-of-affine extension of the LP witness.
//!
//! The LP is solved in dual form. Its primal (variables ψᵢ, gᵢ, c, t)
//! has `m(m−1) + 2m` rows; the dual has one row per primal variable and a
//! column per primal row, which keeps the simplex basis small. The primal
//! witness is read off the dual multipliers. Computation happens in an
//! orthonormal frame of the grid's affine hull centered at the grid centroid,
//! which removes the dependence on the ambient position and orientation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{extreme_points, max_pairwise_distance, sample, AffineFrame, ConvexBody, SampleGrid};
use crate::linalg::Vector;
use crate::optim::{
    min_enclosing_ball, minimize_convex, solve_lp_with, FnObjective, LinearProgram, LpOptions,
    LpStatus,
};
use crate::tolerances::Tolerances;

/// Finite data `(xᵢ, ψᵢ, gᵢ)` standing for a convex function on X.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiData {
    pub points: Vec<Vector>,
    pub values: Vec<f64>,
    pub subgradients: Vec<Vector>,
}

impl PsiData {
    pub fn new(points: Vec<Vector>, values: Vec<f64>, subgradients: Vec<Vector>) -> Result<Self> {
        if points.is_empty() || values.len() != points.len() || subgradients.len() != points.len() {
            return Err(Error::InvalidParameter {
                name: "psi".into(),
                reason: format!(
                    "{} points, {} values, {} subgradients",
                    points.len(),
                    values.len(),
                    subgradients.len()
                ),
            });
        }
        let d = points[0].dim();
        for v in points.iter().chain(&subgradients) {
            v.check_dim(d)?;
        }
        Ok(PsiData {
            points,
            values,
            subgradients,
        })
    }

    /// ψ ≡ 0 on the given points.
    pub fn zero(points: Vec<Vector>) -> Self {
        let d = points.first().map_or(0, Vector::dim);
        let n = points.len();
        PsiData {
            points,
            values: vec![0.0; n],
            subgradients: vec![Vector::zeros(d); n],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Worst violation `ψᵢ + ⟨gᵢ, xⱼ − xᵢ⟩ − ψⱼ` and where it occurs.
    pub fn interpolation_violation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, f64::NEG_INFINITY);
        for (i, (xi, gi)) in self.points.iter().zip(&self.subgradients).enumerate() {
            for (j, xj) in self.points.iter().enumerate() {
                let v = self.values[i] + gi.dot(&(xj - xi)) - self.values[j];
                if v > worst.2 {
                    worst = (i, j, v);
                }
            }
        }
        worst
    }

    pub fn check_interpolable(&self, tol: f64) -> Result<()> {
        let (i, j, violation) = self.interpolation_violation();
        if violation > tol {
            return Err(Error::NotInterpolable { i, j, violation });
        }
        Ok(())
    }

    /// `ψ̂(x) = maxᵢ ψᵢ + ⟨gᵢ, x − xᵢ⟩` and the maximizing index.
    pub fn extension(&self, x: &Vector) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, (xi, gi)) in self.points.iter().zip(&self.subgradients).enumerate() {
            let v = self.values[i] + gi.dot(&(x - xi));
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// Oscillation of `‖xᵢ‖² + ψᵢ` over the data points.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .zip(&self.values)
            .map(|(x, v)| x.norm_sq() + v)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
        hi - lo
    }

    /// Shifts values so that `ψ₁ = 0`.
    fn normalize(&mut self) {
        let base = self.values[0];
        self.values.iter_mut().for_each(|v| *v -= base);
    }
}

/// Interpolability slack allowed on LP witnesses, relative to the squared
/// extent of the data.
fn interpolation_tol(points: &[Vector]) -> f64 {
    let scale = max_pairwise_distance(points).max(points.iter().map(Vector::norm).fold(0.0, f64::max));
    1e-8 * scale.powi(2).max(1.0)
}

/// `‖b − a‖²/4`.
pub fn delta_segment_exact(a: &Vector, b: &Vector) -> f64 {
    let d = a.dist(b);
    d * d / 4.0
}

/// Recentering witness `ψ(x) = −2⟨c, x⟩ + ‖c‖²` on the given points.
fn recenter_psi(points: Vec<Vector>, c: &Vector) -> PsiData {
    let cc = c.norm_sq();
    let values = points.iter().map(|x| cc - 2.0 * c.dot(x)).collect();
    let g = c * -2.0;
    let n = points.len();
    let mut psi = PsiData {
        points,
        values,
        subgradients: vec![g; n],
    };
    psi.normalize();
    psi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpLowerBound {
    /// Certified lower bound on δ_X.
    pub value: f64,
    pub witness: PsiData,
    /// Raw LP optimum before the residual correction.
    pub objective: f64,
    /// Amount subtracted from the objective for dual-feasibility residuals.
    pub residual_correction: f64,
    pub grid_points: usize,
    pub iterations: usize,
}

/// LP lower bound on δ_X from convex-interpolable data on `grid`.
pub fn delta_lower_lp(body: &ConvexBody, grid: &SampleGrid) -> Result<LpLowerBound> {
    delta_lower_lp_with(body, grid, &Tolerances::default())
}

pub fn delta_lower_lp_with(
    body: &ConvexBody,
    grid: &SampleGrid,
    tols: &Tolerances,
) -> Result<LpLowerBound> {
    body.validate()?;
    if grid.points.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            reason: "empty".into(),
        });
    }
    for p in &grid.points {
        p.check_dim(body.dim())?;
    }
    let pts = &grid.points;
    let m = pts.len();
    let frame = AffineFrame::of_points(pts);
    let k = frame.rank();
    if m == 1 || k == 0 {
        let mut witness = PsiData::zero(pts.clone());
        witness.normalize();
        let value = witness.oscillation().max(0.0);
        return Ok(LpLowerBound {
            value: value.min(0.0),
            witness,
            objective: 0.0,
            residual_correction: 0.0,
            grid_points: m,
            iterations: 0,
        });
    }

    let mut local: Vec<Vector> = pts.iter().map(|p| frame.to_local(p)).collect();
    let mut centroid = Vector::zeros(k);
    for y in &local {
        centroid = centroid.add_scaled(1.0 / m as f64, y);
    }
    for y in local.iter_mut() {
        *y = &*y - &centroid;
    }
    let origin = frame.to_global(&centroid);
    let q: Vec<f64> = local.iter().map(Vector::norm_sq).collect();

    // Columns: λᵢⱼ (i ≠ j), then μᵢ, then νᵢ.
    let lam = |i: usize, j: usize| i * (m - 1) + if j < i { j } else { j - 1 };
    let mu0 = m * (m - 1);
    let nu0 = mu0 + m;
    let mut objective = vec![0.0; nu0 + m];
    for i in 0..m {
        objective[mu0 + i] = -q[i];
        objective[nu0 + i] = q[i];
    }
    let mut lp = LinearProgram::maximize(objective);
    // Row for ψₖ: Σᵢ λᵢₖ − Σⱼ λₖⱼ + μₖ − νₖ = 0. These rows sum to minus
    // the row of c; pinning ψ₁ = 0 drops the first one and with it the
    // rank deficiency.
    for kk in 1..m {
        let mut row = Vec::with_capacity(2 * m);
        for i in 0..m {
            if i != kk {
                row.push((lam(i, kk), 1.0));
                row.push((lam(kk, i), -1.0));
            }
        }
        row.push((mu0 + kk, 1.0));
        row.push((nu0 + kk, -1.0));
        lp.add_eq(row, 0.0);
    }
    // Rows for gᵢ: −Σⱼ λᵢⱼ (yⱼ − yᵢ) = 0.
    for i in 0..m {
        for l in 0..k {
            let row = (0..m)
                .filter(|&j| j != i)
                .map(|j| (lam(i, j), -(local[j][l] - local[i][l])))
                .filter(|&(_, c)| c != 0.0)
                .collect();
            lp.add_eq(row, 0.0);
        }
    }
    let c_row = lp.add_eq(
        (0..m).map(|i| (mu0 + i, -1.0)).chain((0..m).map(|i| (nu0 + i, 1.0))).collect(),
        0.0,
    );
    let t_row = lp.add_le((0..m).map(|i| (nu0 + i, 1.0)).collect(), 1.0);

    let opts = LpOptions {
        feasibility_tol: tols.lp_feasibility,
        ..LpOptions::default()
    };
    let sol = solve_lp_with(&lp, &opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpStatus(format!("{:?}", sol.status)));
    }

    // Certified value: dual objective at the clamped point, minus the
    // first-order effect of the equality residuals on the primal witness.
    let y: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
    let z = &sol.duals;
    let mut correction = 0.0;
    for (r, con) in lp.constraints.iter().enumerate() {
        let lhs: f64 = con.coeffs.iter().map(|&(j, a)| a * y[j]).sum();
        let resid = lhs - con.rhs;
        correction += if r == t_row {
            resid.max(0.0) * z[r].abs()
        } else {
            resid.abs() * z[r].abs()
        };
    }
    let objective_value = lp.objective_value(&y);
    let value = (objective_value - correction).max(0.0);

    // Primal witness in global coordinates: ψ_glob = ψ_loc − 2⟨o, x⟩ + ‖o‖²,
    // g_glob = B g_loc − 2o, so that ‖x‖² + ψ is unchanged on the hull.
    let oo = origin.norm_sq();
    let mut values = Vec::with_capacity(m);
    let mut subgradients = Vec::with_capacity(m);
    let psi_row = |i: usize| if i == 0 { None } else { Some(i - 1) };
    let g_row = |i: usize, l: usize| m - 1 + i * k + l;
    for i in 0..m {
        let psi_local = psi_row(i).map_or(0.0, |r| z[r]);
        values.push(psi_local - 2.0 * origin.dot(&pts[i]) + oo);
        let mut g = &origin * -2.0;
        for l in 0..k {
            g = g.add_scaled(z[g_row(i, l)], &frame.basis[l]);
        }
        subgradients.push(g);
    }
    debug_assert_eq!(c_row, m - 1 + m * k);
    let mut witness = PsiData {
        points: pts.clone(),
        values,
        subgradients,
    };
    witness.normalize();
    witness.check_interpolable(interpolation_tol(pts))?;
    Ok(LpLowerBound {
        value,
        witness,
        objective: objective_value,
        residual_correction: correction,
        grid_points: m,
        iterations: sol.iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarycentricLower {
    pub value: f64,
    pub points: Vec<Vector>,
    pub weights: Vec<f64>,
    pub barycenter: Vector,
}

/// Lower bound `Σ wⱼ ‖yⱼ − c‖²` from the enclosing-ball weights on the
/// extreme points (for a ball, the two ends of a diameter).
pub fn delta_lower_barycentric(body: &ConvexBody) -> Result<BarycentricLower> {
    body.validate()?;
    let (points, weights) = match body {
        ConvexBody::Ball { center, radius } => {
            let e = Vector::unit(center.dim(), 0);
            (
                vec![center.add_scaled(*radius, &e), center.add_scaled(-radius, &e)],
                vec![0.5, 0.5],
            )
        }
        _ => {
            let ext = extreme_points(body)?;
            let weights = min_enclosing_ball(&ext).weights;
            (ext, weights)
        }
    };
    let barycenter = Vector::combination(&points, &weights);
    let value = points
        .iter()
        .zip(&weights)
        .map(|(y, w)| w * y.dist(&barycenter).powi(2))
        .sum();
    Ok(BarycentricLower {
        value,
        points,
        weights,
        barycenter,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecenterUpper {
    pub upper: f64,
    pub center: Vector,
}

/// Upper bound `max_X ‖x − c‖²` with `c` the enclosing-ball center.
pub fn delta_upper_recenter(body: &ConvexBody) -> Result<RecenterUpper> {
    body.validate()?;
    match body {
        ConvexBody::Ball { center, radius } => Ok(RecenterUpper {
            upper: radius * radius,
            center: center.clone(),
        }),
        _ => {
            let ext = extreme_points(body)?;
            let ball = min_enclosing_ball(&ext);
            let upper = ext
                .iter()
                .map(|x| x.dist(&ball.center).powi(2))
                .fold(0.0, f64::max);
            Ok(RecenterUpper {
                upper,
                center: ball.center,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionUpper {
    pub upper: f64,
    /// `max_X ‖x‖² + ψ̂`, attained at an extreme point.
    pub sup: f64,
    /// Best value found for `min_X ‖x‖² + ψ̂`.
    pub inf: f64,
    /// Certified gap between `inf` and the true minimum.
    pub slack: f64,
    pub argmin: Vector,
}

/// Upper bound from the max-of-affine extension ψ̂ of `witness`.
pub fn delta_upper_extension(body: &ConvexBody, witness: &PsiData, tol: f64) -> Result<ExtensionUpper> {
    body.validate()?;
    if witness.is_empty() {
        return Err(Error::InvalidParameter {
            name: "witness".into(),
            reason: "empty".into(),
        });
    }
    witness.points[0].check_dim(body.dim())?;
    if matches!(body, ConvexBody::Ball { .. }) {
        return Err(Error::UnsupportedVariant("ball"));
    }
    let ext = extreme_points(body)?;
    let f_val = |x: &Vector| x.norm_sq() + witness.extension(x).0;
    if ext.len() == 1 {
        return Ok(ExtensionUpper {
            upper: 0.0,
            sup: f_val(&ext[0]),
            inf: f_val(&ext[0]),
            slack: 0.0,
            argmin: ext[0].clone(),
        });
    }
    let sup = ext.iter().map(f_val).fold(f64::NEG_INFINITY, f64::max);
    let objective = FnObjective {
        value: f_val,
        subgradient: |x: &Vector| {
            let (_, i) = witness.extension(x);
            (x * 2.0).add_scaled(1.0, &witness.subgradients[i])
        },
    };
    let min = minimize_convex(&objective, body, tol)?;
    Ok(ExtensionUpper {
        upper: (sup - min.lower_bound()).max(0.0),
        sup,
        inf: min.value,
        slack: min.slack,
        argmin: min.argmin,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Exact,
    Floor,
    Lp,
    Barycentric,
    Recenter,
    Extension,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpperWitness {
    Recenter { center: Vector },
    Extension { psi: PsiData, slack: f64 },
}

/// Every intermediate quantity that went into a bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackRecord {
    pub floor: f64,
    pub barycentric_lower: f64,
    pub lp_lower: Option<f64>,
    pub lp_residual_correction: f64,
    pub lp_resolution: Option<usize>,
    pub lp_grid_points: usize,
    pub recenter_upper: f64,
    pub extension_upper: Option<f64>,
    pub extension_slack: f64,
    /// Why the extension bound is missing, when it is.
    pub extension_note: Option<String>,
    /// LP breakdowns met on the way (retried on coarser grids).
    pub lp_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_source: BoundSource,
    pub upper_source: BoundSource,
    pub lower_witness: PsiData,
    pub upper_witness: UpperWitness,
    pub resolution: usize,
    pub slack: SlackRecord,
}

impl DeltaBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn delta_bounds(body: &ConvexBody, resolution: usize) -> Result<DeltaBounds> {
    delta_bounds_with(body, resolution, &Tolerances::default())
}

const LP_ATTEMPTS: usize = 3;

/// Largest resolution `≤ resolution` whose grid fits the LP size cap.
fn lp_grid(body: &ConvexBody, resolution: usize, cap: usize) -> Result<SampleGrid> {
    let mut r = resolution;
    loop {
        let grid = sample(body, r)?;
        if grid.len() <= cap || r == 1 {
            return Ok(grid);
        }
        r = if grid.len() > 4 * cap { r / 2 } else { r - 1 }.max(1);
    }
}

pub fn delta_bounds_with(body: &ConvexBody, resolution: usize, tols: &Tolerances) -> Result<DeltaBounds> {
    body.validate()?;
    if resolution == 0 {
        return Err(Error::InvalidParameter {
            name: "resolution".into(),
            reason: "must be at least 1".into(),
        });
    }
    let recenter = delta_upper_recenter(body)?;
    let mut record = SlackRecord {
        floor: 0.0,
        barycentric_lower: 0.0,
        lp_lower: None,
        lp_residual_correction: 0.0,
        lp_resolution: None,
        lp_grid_points: 0,
        recenter_upper: recenter.upper,
        extension_upper: None,
        extension_slack: 0.0,
        extension_note: None,
        lp_note: None,
    };

    if body.is_singleton() {
        let p = match body {
            ConvexBody::Segment { a, .. } => a.clone(),
            ConvexBody::Polytope { vertices } => vertices[0].clone(),
            ConvexBody::Ball { center, .. } => center.clone(),
        };
        return Ok(DeltaBounds {
            lower: 0.0,
            upper: 0.0,
            lower_source: BoundSource::Exact,
            upper_source: BoundSource::Exact,
            lower_witness: PsiData::zero(vec![p.clone()]),
            upper_witness: UpperWitness::Recenter { center: p },
            resolution,
            slack: SlackRecord {
                recenter_upper: 0.0,
                ..record
            },
        });
    }

    if let ConvexBody::Segment { a, b } = body {
        let exact = delta_segment_exact(a, b);
        record.floor = exact;
        record.barycentric_lower = exact;
        let mid = a.lerp(b, 0.5);
        return Ok(DeltaBounds {
            lower: exact,
            upper: exact,
            lower_source: BoundSource::Exact,
            upper_source: BoundSource::Exact,
            lower_witness: recenter_psi(vec![a.clone(), b.clone()], &mid),
            upper_witness: UpperWitness::Recenter { center: mid },
            resolution,
            slack: record,
        });
    }

    let diam = crate::geometry::diameter(body);
    let floor = diam * diam / 4.0;
    record.floor = floor;

    // Any subgrid gives a valid LP bound, so numerical breakdowns are retried
    // on coarser grids; if all fail the remaining bounds still stand.
    let cap = tols.lp_max_points.max(2.0) as usize;
    let mut grid = lp_grid(body, resolution, cap)?;
    let mut notes = Vec::new();
    let mut lp = None;
    for _ in 0..LP_ATTEMPTS {
        match delta_lower_lp_with(body, &grid, tols) {
            Ok(found) => {
                lp = Some(found);
                break;
            }
            Err(e @ (Error::LpNumerical(_) | Error::LpStatus(_) | Error::NotInterpolable { .. })) => {
                notes.push(format!("resolution {}: {e}", grid.resolution));
                if grid.resolution == 1 {
                    break;
                }
                grid = sample(body, grid.resolution - 1)?;
            }
            Err(e) => return Err(e),
        }
    }
    if !notes.is_empty() {
        record.lp_note = Some(notes.join("; "));
    }
    let (lp_value, lp_witness) = match lp {
        Some(lp) => {
            record.lp_lower = Some(lp.value);
            record.lp_residual_correction = lp.residual_correction;
            record.lp_resolution = Some(grid.resolution);
            record.lp_grid_points = grid.len();
            (lp.value, lp.witness)
        }
        None => (f64::NEG_INFINITY, recenter_psi(grid.points.clone(), &recenter.center)),
    };

    let bary = delta_lower_barycentric(body)?;
    record.barycentric_lower = bary.value;

    let (lower, lower_source) = [
        (floor, BoundSource::Floor),
        (lp_value, BoundSource::Lp),
        (bary.value, BoundSource::Barycentric),
    ]
    .into_iter()
    .fold((f64::NEG_INFINITY, BoundSource::Floor), |best, c| if c.0 > best.0 { c } else { best });

    let mut upper = recenter.upper;
    let mut upper_source = BoundSource::Recenter;
    let mut upper_witness = UpperWitness::Recenter {
        center: recenter.center.clone(),
    };
    if matches!(body, ConvexBody::Ball { .. }) {
        record.extension_note = Some("ball: recentering value is exact".into());
    } else {
        match delta_upper_extension(body, &lp_witness, tols.convex_min_slack) {
            Ok(ext) => {
                record.extension_upper = Some(ext.upper);
                record.extension_slack = ext.slack;
                if ext.upper < upper {
                    upper = ext.upper;
                    upper_source = BoundSource::Extension;
                    upper_witness = UpperWitness::Extension {
                        psi: lp_witness.clone(),
                        slack: ext.slack,
                    };
                }
            }
            Err(e @ Error::NonConvergence { .. }) => record.extension_note = Some(e.to_string()),
            Err(e) => return Err(e),
        }
    }

    let scale = diam.max(1e-300);
    if lower > upper + 1e-8 * scale * scale.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "delta lower bound {lower:e} exceeds upper bound {upper:e}"
        )));
    }
    // Both sides bound δ_X, so clipping round-off crossings is sound.
    let lower = lower.min(upper);
    Ok(DeltaBounds {
        lower,
        upper,
        lower_source,
        upper_source,
        lower_witness: lp_witness,
        upper_witness,
        resolution,
        slack: record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }

    fn unit_segment() -> ConvexBody {
        ConvexBody::segment(v(&[0., 0.]), v(&[1., 0.])).unwrap()
    }

    fn triangle() -> ConvexBody {
        ConvexBody::polytope(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0.5, 3f64.sqrt() / 2.0])]).unwrap()
    }

    #[test]
    fn segment_closed_form() {
        assert_eq!(delta_segment_exact(&v(&[0., 0.]), &v(&[1., 0.])), 0.25);
        assert_eq!(delta_segment_exact(&v(&[3., 0.]), &v(&[4., 0.])), 0.25);
        assert_eq!(delta_segment_exact(&v(&[1., 1.]), &v(&[1., 1.])), 0.0);
    }

    #[test]
    fn lp_on_segment_approaches_quarter() {
        let body = unit_segment();
        let lp = delta_lower_lp(&body, &sample(&body, 64).unwrap()).unwrap();
        assert!(lp.value >= 0.24 && lp.value <= 0.25 + 1e-12, "{}", lp.value);
        assert!((lp.witness.oscillation() - lp.objective).abs() < 1e-8);
        assert_eq!(lp.witness.values[0], 0.0);
    }

    #[test]
    fn lp_singleton_grid() {
        let body = ConvexBody::singleton(v(&[2., 2.])).unwrap();
        let lp = delta_lower_lp(&body, &sample(&body, 5).unwrap()).unwrap();
        assert_eq!(lp.value, 0.0);
    }

    #[test]
    fn recenter_examples() {
        assert!((delta_upper_recenter(&unit_segment()).unwrap().upper - 0.25).abs() < 1e-12);
        let ball = ConvexBody::ball(v(&[3., -1.]), 0.7).unwrap();
        assert!((delta_upper_recenter(&ball).unwrap().upper - 0.49).abs() < 1e-15);
        let sq = ConvexBody::axis_box(&v(&[0., 0.]), &v(&[1., 1.])).unwrap();
        assert!((delta_upper_recenter(&sq).unwrap().upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn barycentric_meets_circumradius() {
        let t = delta_lower_barycentric(&triangle()).unwrap();
        assert!((t.value - 1.0 / 3.0).abs() < 1e-9);
        let ball = ConvexBody::ball(v(&[1., 1., 1.]), 2.0).unwrap();
        assert_eq!(delta_lower_barycentric(&ball).unwrap().value, 4.0);
    }

    #[test]
    fn extension_examples() {
        let body = unit_segment();
        let lp = delta_lower_lp(&body, &sample(&body, 64).unwrap()).unwrap();
        let ext = delta_upper_extension(&body, &lp.witness, 1e-9).unwrap();
        assert!(ext.upper >= 0.25 - 1e-12 && ext.upper <= 0.26, "{}", ext.upper);

        let zero = PsiData::zero(vec![v(&[0., 0.]), v(&[1., 0.])]);
        let ext = delta_upper_extension(&body, &zero, 1e-9).unwrap();
        assert!((ext.upper - 1.0).abs() < 1e-9);

        let single = ConvexBody::singleton(v(&[1., 2.])).unwrap();
        assert_eq!(delta_upper_extension(&single, &zero, 1e-9).unwrap().upper, 0.0);
    }

    #[test]
    fn bounds_examples() {
        let b = delta_bounds(&unit_segment(), 32).unwrap();
        assert_eq!((b.lower, b.upper), (0.25, 0.25));

        let sq = ConvexBody::axis_box(&v(&[0., 0.]), &v(&[1., 1.])).unwrap();
        let b = delta_bounds(&sq, 12).unwrap();
        assert!((b.lower - 0.5).abs() < 1e-6 && (b.upper - 0.5).abs() < 1e-6, "{b:?}");

        let b = delta_bounds(&triangle(), 16).unwrap();
        assert!(b.lower >= 0.25 && b.lower <= b.upper && b.upper <= 1.0 / 3.0 + 1e-9);
        assert!(b.width() < 1e-9, "{b:?}");
        assert!(b.slack.lp_lower.unwrap() >= 0.24, "{:?}", b.slack);

        let ball = ConvexBody::ball(v(&[0., 0.]), 1.0).unwrap();
        let b = delta_bounds(&ball, 6).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }
}
