//! Certificates built on the δ bracket and hull membership.
//!
//! * [`eta_lower_bound`]: certified lower bound on `inf_V ‖Φ‖`.
//! * [`check_theorem12`]: on `X ⊆ V` with `δ_X < 2η/L`, the image hull must
//!   stay away from 0. The quantitative form used here is
//!   `dist(0, conv Φ(X)) ≥ inf_X ‖Φ‖ − (L/2)·δ_X ≥ η − (L/2)·δ_up`, so the
//!   harness flags a violation only when the sampled hull distance falls below
//!   that margin.
//! * [`certify_near_zero`]: when the sampled image hull contains 0 up to `r`,
//!   the same inequality gives `inf_X ‖Φ‖ ≤ (L/2)·δ_up + r`.
//! * [`search_small_delta`]: heuristic search for segments and singletons with
//!   small δ whose image hull contains 0.
//! * [`example11_table`]: the `h(x) = π sin(2πx²)` instance in closed form.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delta::{delta_bounds_with, DeltaBounds};
use crate::error::{Error, Result};
use crate::geometry::{contains, extreme_points, sample, ConvexBody, SampleGrid};
use crate::linalg::Vector;
use crate::minimax::{hull_certificate, hull_certificate_from_images, HullCertificate, HullWitness};
use crate::operators::{estimate_map_lipschitz, make_catalog_operator, LipschitzProvenance, OperatorHandle, Params};
use crate::optim::min_norm_point;
use crate::tolerances::Tolerances;

/// Watermark attached to certificates whose L was asserted by the user.
pub const CONDITIONAL_ON_L: &str = "conditional on L";

/// Recorded on search results; closedness of the image cannot be sampled.
pub const CLOSED_RANGE_ASSUMPTION: &str = "Φ(V) assumed closed (not verified)";

/// Segment candidates are tested on `sample(segment, SEGMENT_RESOLUTION)`.
pub const SEGMENT_RESOLUTION: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaBound {
    /// `max(0, grid_min − modulus·covering_radius)`.
    pub value: f64,
    pub grid_min: f64,
    pub argmin: Vector,
    pub modulus: f64,
    pub covering_radius: f64,
    /// `false` when the modulus is only a sampled estimate.
    pub certified: bool,
}

fn grid_min_norm(op: &OperatorHandle, grid: &SampleGrid) -> Result<(f64, Vector)> {
    let mut best = (f64::INFINITY, grid.points[0].clone());
    for x in &grid.points {
        let n = op.eval(x)?.norm();
        if n < best.0 {
            best = (n, x.clone());
        }
    }
    Ok(best)
}

/// Lower bound on `inf_body ‖Φ‖` from the grid minimum and the map modulus.
pub fn eta_lower_bound(op: &OperatorHandle, body: &ConvexBody, resolution: usize) -> Result<EtaBound> {
    let grid = sample(body, resolution)?;
    let (grid_min, argmin) = grid_min_norm(op, &grid)?;
    let map = estimate_map_lipschitz(op, &grid)?;
    Ok(EtaBound {
        value: (grid_min - map.value * grid.covering_radius).max(0.0),
        grid_min,
        argmin,
        modulus: map.value,
        covering_radius: grid.covering_radius,
        certified: map.certified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem12Verdict {
    PremiseHoldsConclusionVerified,
    PremiseFailsNoClaim,
    Violation,
}

impl Theorem12Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Theorem12Verdict::PremiseHoldsConclusionVerified => "premise-holds-conclusion-verified",
            Theorem12Verdict::PremiseFailsNoClaim => "premise-fails-no-claim",
            Theorem12Verdict::Violation => "VIOLATION",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem12Check {
    pub verdict: Theorem12Verdict,
    pub eta: EtaBound,
    pub delta_upper: f64,
    pub l: f64,
    /// `2η/L`; `None` stands for +∞ (L = 0).
    pub threshold: Option<f64>,
    pub premise: bool,
    /// `η − (L/2)·δ_up`, the distance the hull must keep from 0.
    pub required_margin: f64,
    /// Sampled `dist(0, conv Φ(X))` (upper estimate).
    pub sup_inf: f64,
    pub hull_witness: HullWitness,
}

/// `X ⊆ V`, checked on the extreme points of X.
fn check_contained(x: &ConvexBody, v: &ConvexBody) -> Result<()> {
    if x.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: x.dim(),
        });
    }
    let (lo, hi) = v.bounding_box();
    let scale = lo.max_abs().max(hi.max_abs()).max(1.0);
    let tol = 1e-9 * scale;
    if let ConvexBody::Ball { center, radius } = x {
        return match v {
            ConvexBody::Ball { center: cv, radius: rv } if center.dist(cv) + radius <= rv + tol => Ok(()),
            ConvexBody::Ball { .. } => Err(Error::NotContained("ball X leaves ball V".into())),
            _ => Err(Error::UnsupportedVariant("ball X inside a non-ball region")),
        };
    }
    for p in extreme_points(x)? {
        if !contains(v, &p, tol) {
            return Err(Error::NotContained(format!("extreme point {:?} of X", p.as_slice())));
        }
    }
    Ok(())
}

fn known_lipschitz(op: &OperatorHandle) -> Result<(f64, LipschitzProvenance)> {
    match (op.grad_lipschitz(), op.lipschitz_provenance()) {
        (Some(l), Some(p)) => Ok((l, p)),
        (Some(l), None) => Ok((l, LipschitzProvenance::Known)),
        _ => Err(Error::MissingLipschitz),
    }
}

pub fn check_theorem12(
    op: &OperatorHandle,
    x: &ConvexBody,
    v: &ConvexBody,
    resolution: usize,
    tol: f64,
) -> Result<Theorem12Check> {
    check_theorem12_with(op, x, v, resolution, tol, &Tolerances::default())
}

pub fn check_theorem12_with(
    op: &OperatorHandle,
    x: &ConvexBody,
    v: &ConvexBody,
    resolution: usize,
    tol: f64,
    tols: &Tolerances,
) -> Result<Theorem12Check> {
    let (l, _) = known_lipschitz(op)?;
    check_contained(x, v)?;
    let eta = eta_lower_bound(op, v, resolution)?;
    let delta_upper = delta_bounds_with(x, resolution, tols)?.upper;
    let threshold = (l > 0.0).then(|| 2.0 * eta.value / l);
    let premise = eta.value > 0.0 && threshold.is_none_or(|t| delta_upper < t);

    let grid = sample(x, resolution)?;
    let hull = hull_certificate(op, &grid, tol)?;
    let nearest = min_norm_point(&hull.images, 1e-14);
    let sup_inf = nearest.norm;
    let required_margin = eta.value - 0.5 * l * delta_upper;
    let scale = hull.images.iter().map(Vector::norm).fold(1.0_f64, f64::max);

    let verdict = if !premise {
        Theorem12Verdict::PremiseFailsNoClaim
    } else if sup_inf > 0.0 && sup_inf >= required_margin - 1e-9 * scale {
        Theorem12Verdict::PremiseHoldsConclusionVerified
    } else {
        Theorem12Verdict::Violation
    };
    Ok(Theorem12Check {
        verdict,
        eta,
        delta_upper,
        l,
        threshold,
        premise,
        required_margin,
        sup_inf,
        hull_witness: hull.witness,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearZeroValidation {
    /// Minimum of ‖Φ‖ over the sample of X.
    pub grid_min: f64,
    /// `M·h`: how far the grid minimum may sit above the true infimum.
    pub slack: f64,
    pub sharpness_anomaly: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearZeroCertificate {
    pub body: ConvexBody,
    pub delta_upper: f64,
    pub delta: DeltaBounds,
    pub l: f64,
    pub l_provenance: LipschitzProvenance,
    pub watermark: Option<String>,
    pub membership: HullCertificate,
    /// Membership residual added to the bound.
    pub residual_term: f64,
    /// `L·δ_up/2 + residual`; bounds `inf_X ‖Φ‖` from above.
    pub claimed_bound: f64,
    pub validation: NearZeroValidation,
}

pub fn certify_near_zero(op: &OperatorHandle, x: &ConvexBody, resolution: usize, tol: f64) -> Result<NearZeroCertificate> {
    certify_near_zero_with(op, x, resolution, tol, &Tolerances::default())
}

pub fn certify_near_zero_with(
    op: &OperatorHandle,
    x: &ConvexBody,
    resolution: usize,
    tol: f64,
    tols: &Tolerances,
) -> Result<NearZeroCertificate> {
    let (l, l_provenance) = known_lipschitz(op)?;
    let grid = sample(x, resolution)?;
    let membership = hull_certificate(op, &grid, tol)?;
    let residual_term = match &membership.witness {
        HullWitness::Membership { residual, .. } => *residual,
        HullWitness::SampleSeparation { margin, .. } => {
            return Err(Error::NoCertificate(format!(
                "sampled image hull is separated from 0 with margin {margin:e}"
            )))
        }
    };
    let delta = delta_bounds_with(x, resolution, tols)?;
    let claimed_bound = 0.5 * l * delta.upper + residual_term;

    let (grid_min, _) = grid_min_norm(op, &grid)?;
    let map = estimate_map_lipschitz(op, &grid)?;
    let slack = map.value * grid.covering_radius;
    let validation = NearZeroValidation {
        grid_min,
        slack,
        sharpness_anomaly: grid_min > claimed_bound + slack + 1e-9 * claimed_bound.max(1.0),
    };
    Ok(NearZeroCertificate {
        body: x.clone(),
        delta_upper: delta.upper,
        delta,
        l,
        l_provenance,
        watermark: (l_provenance == LipschitzProvenance::Asserted).then(|| CONDITIONAL_ON_L.to_string()),
        membership,
        residual_term,
        claimed_bound,
        validation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchCandidate {
    pub body: ConvexBody,
    /// Exact δ of the candidate (`length²/4`, 0 for singletons).
    pub delta_upper: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub best: Option<SearchCandidate>,
    /// Best candidates in order, at most [`TRACE_LIMIT`].
    pub trace: Vec<SearchCandidate>,
    pub candidates_found: usize,
    pub evaluations: usize,
    pub grid_points: usize,
    pub assumption: String,
}

pub const TRACE_LIMIT: usize = 64;

const NEIGHBORS: usize = 8;
const NEWTON_STARTS: usize = 5;
const NEWTON_STEPS: usize = 30;
const SHRINK_ROUNDS: usize = 2;
const BISECTION_STEPS: usize = 24;
const SHRINK_COST: usize = SHRINK_ROUNDS * 2 * BISECTION_STEPS;
const MAX_SHRINK: usize = 8;

fn candidate_order(a: &SearchCandidate, b: &SearchCandidate) -> Ordering {
    a.delta_upper
        .total_cmp(&b.delta_upper)
        .then(a.residual.total_cmp(&b.residual))
        .then_with(|| lex_body(&a.body, &b.body))
}

fn lex_body(a: &ConvexBody, b: &ConvexBody) -> Ordering {
    let flat = |body: &ConvexBody| -> Vec<f64> {
        body.generators()
            .unwrap_or_default()
            .iter()
            .flat_map(|v| v.as_slice().to_vec())
            .collect()
    };
    let (fa, fb) = (flat(a), flat(b));
    for (x, y) in fa.iter().zip(&fb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    fa.len().cmp(&fb.len())
}

fn segment_body(a: &Vector, b: &Vector) -> Result<ConvexBody> {
    if a == b {
        ConvexBody::singleton(a.clone())
    } else {
        ConvexBody::segment(a.clone(), b.clone())
    }
}

/// Membership residual of the sampled segment images, `None` when separated.
fn segment_membership(op: &OperatorHandle, a: &Vector, b: &Vector, tol: f64) -> Result<Option<f64>> {
    let grid = sample(&segment_body(a, b)?, SEGMENT_RESOLUTION)?;
    let cert = hull_certificate(op, &grid, tol)?;
    Ok(cert.residual())
}

fn newton_polish(op: &OperatorHandle, region: &ConvexBody, start: &Vector) -> Result<Option<(Vector, f64)>> {
    let d = start.dim();
    let tol = 1e-12 * start.max_abs().max(1.0);
    let mut x = start.clone();
    let mut fx = op.eval(&x)?;
    for _ in 0..NEWTON_STEPS {
        if fx.norm() == 0.0 {
            break;
        }
        let j = op.jacobian(&x)?;
        if j.dim() != d || fx.dim() != d {
            return Ok(None);
        }
        let jm = DMatrix::from_fn(d, d, |r, c| j.get(r, c));
        let rhs = DVector::from_iterator(d, fx.iter().map(|v| -v));
        let Some(step) = jm.lu().solve(&rhs) else {
            return Ok(None);
        };
        let next = x.add_scaled(1.0, &Vector::new(step.iter().copied().collect()));
        if !next.is_finite() || !contains(region, &next, tol) {
            return Ok(None);
        }
        let f_next = op.eval(&next)?;
        if f_next.norm() >= fx.norm() {
            break;
        }
        x = next;
        fx = f_next;
    }
    let r = fx.norm();
    Ok(Some((x, r)))
}

/// Largest grid of `region` with at most `target` points.
fn search_grid(region: &ConvexBody, target: usize) -> Result<SampleGrid> {
    let mut grid = sample(region, 1)?;
    for r in 2..=256 {
        let next = sample(region, r)?;
        if next.len() > target {
            break;
        }
        grid = next;
    }
    Ok(grid)
}

/// Shrinks `[a, b]` from both ends while the sampled membership persists.
fn shrink(op: &OperatorHandle, a: &Vector, b: &Vector, tol: f64) -> Result<(Vector, Vector, f64, usize)> {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut residual = segment_membership(op, &a, &b, tol)?.unwrap_or(f64::INFINITY);
    let mut evals = 1;
    for _ in 0..SHRINK_ROUNDS {
        for side in 0..2 {
            let (fixed, moving) = if side == 0 { (b.clone(), a.clone()) } else { (a.clone(), b.clone()) };
            // keep [fixed, fixed + hi·(moving − fixed)] a member
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            let mut best_res = residual;
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                evals += 1;
                match segment_membership(op, &fixed, &fixed.lerp(&moving, mid), tol)? {
                    Some(r) => {
                        hi = mid;
                        best_res = r;
                    }
                    None => lo = mid,
                }
            }
            let moved = fixed.lerp(&moving, hi);
            residual = best_res;
            if side == 0 {
                a = moved;
            } else {
                b = moved;
            }
        }
    }
    Ok((a, b, residual, evals))
}

/// Heuristic search for small-δ segments or singletons whose image hull
/// contains 0 up to `tol`, spending about `budget` membership evaluations.
pub fn search_small_delta(op: &OperatorHandle, region: &ConvexBody, budget: usize, tol: f64) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter {
            name: "budget".into(),
            reason: "must be at least 1".into(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol".into(),
            reason: "must be positive".into(),
        });
    }
    region.validate()?;
    let grid = search_grid(region, (budget / 4).max(2))?;
    let points = &grid.points;
    let norms: Vec<f64> = points
        .iter()
        .map(|x| op.eval(x).map(|y| y.norm()))
        .collect::<Result<_>>()?;
    let mut found: Vec<SearchCandidate> = Vec::new();
    let mut evaluations = 0usize;

    // Singletons: the smallest residuals, polished by Newton steps.
    let mut by_norm: Vec<usize> = (0..points.len()).collect();
    by_norm.sort_by(|&i, &j| norms[i].total_cmp(&norms[j]).then(i.cmp(&j)));
    for &i in by_norm.iter().take(NEWTON_STARTS.min(budget)) {
        evaluations += 1;
        let (z, r) = match newton_polish(op, region, &points[i])? {
            Some((z, r)) if r < norms[i] => (z, r),
            _ => (points[i].clone(), norms[i]),
        };
        if r <= tol {
            found.push(SearchCandidate {
                body: ConvexBody::singleton(z)?,
                delta_upper: 0.0,
                residual: r,
            });
        }
    }

    // Segments between near neighbours (in box-normalized coordinates, so
    // thin regions still pair points along their long side), shortest first.
    let (lo, hi) = region.bounding_box();
    let inv_extent: Vec<f64> = lo
        .iter()
        .zip(hi.iter())
        .map(|(l, h)| if h > l { 1.0 / (h - l) } else { 0.0 })
        .collect();
    let normalized: Vec<Vector> = points
        .iter()
        .map(|p| Vector::new(p.iter().zip(&inv_extent).map(|(x, s)| x * s).collect()))
        .collect();
    let mut pairs = BTreeSet::new();
    for i in 0..points.len() {
        let mut near: Vec<(f64, usize)> = (0..points.len())
            .filter(|&j| j != i)
            .map(|j| (normalized[i].dist(&normalized[j]), j))
            .collect();
        near.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, j) in near.iter().take(NEIGHBORS) {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    pairs.sort_by(|&(a, b), &(c, d)| {
        points[a]
            .dist(&points[b])
            .total_cmp(&points[c].dist(&points[d]))
            .then((a, b).cmp(&(c, d)))
    });
    let remaining = budget.saturating_sub(evaluations);
    pairs.truncate(remaining / 2);
    evaluations += pairs.len();
    let members: Vec<Option<SearchCandidate>> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<SearchCandidate>> {
            let (a, b) = (&points[i], &points[j]);
            Ok(segment_membership(op, a, b, tol)?.map(|residual| SearchCandidate {
                body: ConvexBody::Segment { a: a.clone(), b: b.clone() },
                delta_upper: a.dist(b).powi(2) / 4.0,
                residual,
            }))
        })
        .collect::<Result<_>>()?;
    let mut segments: Vec<SearchCandidate> = members.into_iter().flatten().collect();
    segments.sort_by(candidate_order);

    let remaining = budget.saturating_sub(evaluations);
    let n_shrink = (remaining / SHRINK_COST).min(MAX_SHRINK).min(segments.len());
    let shrunk: Vec<(SearchCandidate, usize)> = segments[..n_shrink]
        .par_iter()
        .map(|c| -> Result<(SearchCandidate, usize)> {
            let ConvexBody::Segment { a, b } = &c.body else {
                unreachable!("segment candidates only")
            };
            let (a, b, residual, evals) = shrink(op, a, b, tol)?;
            let delta_upper = a.dist(&b).powi(2) / 4.0;
            Ok((
                SearchCandidate {
                    body: segment_body(&a, &b)?,
                    delta_upper,
                    residual,
                },
                evals,
            ))
        })
        .collect::<Result<_>>()?;
    for (c, e) in shrunk {
        evaluations += e;
        if c.residual <= tol {
            found.push(c);
        }
    }
    found.extend(segments);
    found.sort_by(candidate_order);
    found.dedup_by(|a, b| a.body == b.body);

    let candidates_found = found.len();
    found.truncate(TRACE_LIMIT);
    Ok(SearchResult {
        status: if found.is_empty() { SearchStatus::Empty } else { SearchStatus::Found },
        best: found.first().cloned(),
        trace: found,
        candidates_found,
        evaluations,
        grid_points: points.len(),
        assumption: CLOSED_RANGE_ASSUMPTION.into(),
    })
}

/// Re-checks a search candidate with a fresh hull certificate.
pub fn recheck_candidate(op: &OperatorHandle, candidate: &SearchCandidate, tol: f64) -> Result<HullCertificate> {
    let grid = sample(&candidate.body, SEGMENT_RESOLUTION)?;
    hull_certificate(op, &grid, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example11Row {
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub phi_alpha: Vector,
    pub phi_beta: Vector,
    /// `β² − α²`, which is 3/4 for every n.
    pub beta_sq_minus_alpha_sq: f64,
    /// `(β − α)²/4`, the exact δ of `[α, β] × {0}`.
    pub delta_exact: f64,
    pub membership_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example11Table {
    pub rows: Vec<Example11Row>,
    /// Extremes of ‖Φ‖ over the row points and a grid of `[0, β_max] × [−1, 1]`.
    pub phi_norm_min: f64,
    pub phi_norm_max: f64,
    pub samples: usize,
}

pub fn example11_table(n_max: u64) -> Result<Example11Table> {
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max".into(),
            reason: "must be at least 1".into(),
        });
    }
    let op = make_catalog_operator("example11", &Params::new())?;
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut norms = Vec::new();
    for n in 1..=n_max {
        let nf = n as f64;
        let alpha = nf.sqrt();
        let beta = (nf + 0.75).sqrt();
        let phi_alpha = op.eval(&Vector::from_slice(&[alpha, 0.0]))?;
        let phi_beta = op.eval(&Vector::from_slice(&[beta, 0.0]))?;
        norms.push(phi_alpha.norm());
        norms.push(phi_beta.norm());
        let width = 0.75 / (alpha + beta);
        let cert = hull_certificate_from_images(
            vec![Vector::from_slice(&[alpha, 0.0]), Vector::from_slice(&[beta, 0.0])],
            vec![phi_alpha.clone(), phi_beta.clone()],
            1e-9,
        )?;
        rows.push(Example11Row {
            n,
            alpha,
            beta,
            phi_alpha,
            phi_beta,
            beta_sq_minus_alpha_sq: (nf + 0.75) - nf,
            delta_exact: width * width / 4.0,
            membership_residual: cert.residual().unwrap_or(f64::INFINITY),
        });
    }
    let beta_max = rows.last().map_or(1.0, |r| r.beta);
    let grid = sample(
        &ConvexBody::axis_box(&Vector::from_slice(&[0.0, -1.0]), &Vector::from_slice(&[beta_max, 1.0]))?,
        64,
    )?;
    for x in &grid.points {
        norms.push(op.eval(x)?.norm());
    }
    let phi_norm_min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let phi_norm_max = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Example11Table {
        rows,
        phi_norm_min,
        phi_norm_max,
        samples: norms.len(),
    })
}
