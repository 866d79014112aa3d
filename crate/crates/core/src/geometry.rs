//! Convex bodies in ℝᵈ, sampling grids with guaranteed covering radii, and
//! elementary geometric queries.
//!
//! Bodies are kept in vertex (V-) representation only. Every query that needs
//! a polytope's facets is answered through small linear programs over convex
//! weights instead.
//!
//! Sampling schemes and their covering-radius guarantees:
//!
//! * `Segment`: `r + 1` equally spaced points; every point of the segment is
//!   within `‖b − a‖ / (2r)` of one of them.
//! * `Polytope`: the extreme points `E` are split into simplices
//!   `{e₀} ∪ S` for every affinely independent `k`-subset `S ⊆ E \ {e₀}`
//!   (`k` = affine dimension). These simplices cover the polytope. Each one
//!   carries the barycentric lattice `{Σ (mᵢ/r) uᵢ : Σ mᵢ = r}`. Rounding any
//!   barycentric coordinate vector to the lattice moves a total mass of at most
//!   `⌊(k+1)/2⌋ / r` (or `1/(2r)` when `k = 1`), so each simplex is covered
//!   within that mass times its diameter.
//! * `Ball` in ℝ²: concentric rings of radius `j·r/R`, `j = 0..R`, with
//!   `max(1, ⌈2πj⌉)` equally spaced points on ring `j`. A point at radius `ρ`
//!   is within `Δ/2` (`Δ = r/R`) radially of the nearest ring and within
//!   angle `π/n_j` of a ring point, giving the bound
//!   `√((Δ/2)² + 4·min(r, r_j + Δ/2)·r_j·sin²(π/(2n_j)))` maximized over rings.
//! * `Ball` in ℝᵈ, d ≥ 3: cubic lattice of spacing `h = r/R` clipped to the
//!   ball, covering radius `h√d` (shrink toward the center by `h√d/2`, then
//!   round to the lattice).

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::optim::lp::{solve_lp, LinearProgram};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexBody {
    Segment { a: Vector, b: Vector },
    Polytope { vertices: Vec<Vector> },
    Ball { center: Vector, radius: f64 },
}

fn check_point(p: &Vector, dim: usize) -> Result<()> {
    p.check_dim(dim)?;
    if !p.is_finite() {
        return Err(Error::InvalidBody(format!("non-finite coordinates {p:?}")));
    }
    Ok(())
}

fn check_ambient(dim: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidBody(format!(
            "dimension {dim} outside supported range 2..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl ConvexBody {
    pub fn segment(a: Vector, b: Vector) -> Result<Self> {
        let body = ConvexBody::Segment { a, b };
        body.validate()?;
        Ok(body)
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        let body = ConvexBody::Polytope { vertices };
        body.validate()?;
        Ok(body)
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let body = ConvexBody::Ball { center, radius };
        body.validate()?;
        Ok(body)
    }

    pub fn singleton(p: Vector) -> Result<Self> {
        ConvexBody::polytope(vec![p])
    }

    /// Axis-aligned box `∏ [loᵢ, hiᵢ]` as a polytope with 2ᵈ vertices
    /// (fewer when some side is degenerate).
    pub fn axis_box(lo: &Vector, hi: &Vector) -> Result<Self> {
        lo.check_dim(hi.dim())?;
        let d = lo.dim();
        check_ambient(d)?;
        let mut vertices: Vec<Vector> = vec![lo.clone()];
        for i in 0..d {
            if hi[i] < lo[i] {
                return Err(Error::InvalidBody(format!("box side {i} has hi < lo")));
            }
            if hi[i] > lo[i] {
                let extra: Vec<Vector> = vertices
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w[i] = hi[i];
                        w
                    })
                    .collect();
                vertices.extend(extra);
            }
        }
        ConvexBody::polytope(vertices)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        check_ambient(d)?;
        match self {
            ConvexBody::Segment { a, b } => {
                check_point(a, d)?;
                check_point(b, d)
            }
            ConvexBody::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::InvalidBody("polytope without vertices".into()));
                }
                vertices.iter().try_for_each(|v| check_point(v, d))
            }
            ConvexBody::Ball { center, radius } => {
                check_point(center, d)?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidBody(format!("invalid radius {radius}")));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Segment { a, .. } => a.dim(),
            ConvexBody::Polytope { vertices } => vertices.first().map_or(0, |v| v.dim()),
            ConvexBody::Ball { center, .. } => center.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexBody::Segment { .. } => "segment",
            ConvexBody::Polytope { .. } => "polytope",
            ConvexBody::Ball { .. } => "ball",
        }
    }

    pub fn is_singleton(&self) -> bool {
        match self {
            ConvexBody::Segment { a, b } => a == b,
            ConvexBody::Polytope { vertices } => vertices.iter().all(|v| v == &vertices[0]),
            ConvexBody::Ball { radius, .. } => *radius == 0.0,
        }
    }

    /// Generating points of a segment or polytope (`None` for balls).
    pub fn generators(&self) -> Option<Vec<Vector>> {
        match self {
            ConvexBody::Segment { a, b } => Some(vec![a.clone(), b.clone()]),
            ConvexBody::Polytope { vertices } => Some(vertices.clone()),
            ConvexBody::Ball { .. } => None,
        }
    }

    /// Applies an affine isometry or similarity `x ↦ map(x)` with scale
    /// factor `scale` (radius is multiplied by `scale`).
    pub fn map_points(&self, map: impl Fn(&Vector) -> Vector, scale: f64) -> ConvexBody {
        match self {
            ConvexBody::Segment { a, b } => ConvexBody::Segment {
                a: map(a),
                b: map(b),
            },
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(&map).collect(),
            },
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: map(center),
                radius: radius * scale.abs(),
            },
        }
    }

    pub fn translate(&self, t: &Vector) -> ConvexBody {
        self.map_points(|x| x + t, 1.0)
    }

    pub fn scale(&self, lambda: f64) -> ConvexBody {
        self.map_points(|x| x * lambda, lambda)
    }

    /// Coordinate-wise bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        match self {
            ConvexBody::Ball { center, radius } => {
                let r = Vector::new(vec![*radius; center.dim()]);
                (center - &r, center + &r)
            }
            _ => {
                let pts = self.generators().unwrap();
                let d = pts[0].dim();
                let mut lo = pts[0].clone();
                let mut hi = pts[0].clone();
                for p in &pts[1..] {
                    for i in 0..d {
                        lo[i] = lo[i].min(p[i]);
                        hi[i] = hi[i].max(p[i]);
                    }
                }
                (lo, hi)
            }
        }
    }
}

/// A finite subset of a body with a guaranteed covering radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub body: ConvexBody,
    pub resolution: usize,
    pub points: Vec<Vector>,
    pub covering_radius: f64,
}

impl SampleGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Orthonormal frame of the affine hull of a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFrame {
    pub origin: Vector,
    /// Orthonormal directions spanning the affine hull (may be empty).
    pub basis: Vec<Vector>,
}

impl AffineFrame {
    /// Gram–Schmidt on `pᵢ − p₀` in input order; directions shorter than
    /// `1e-9 · spread` are treated as dependent.
    pub fn of_points(points: &[Vector]) -> AffineFrame {
        let origin = points[0].clone();
        let spread = points
            .iter()
            .map(|p| p.dist(&origin))
            .fold(0.0_f64, f64::max);
        let tol = 1e-9 * spread.max(f64::MIN_POSITIVE);
        let mut basis: Vec<Vector> = Vec::new();
        for p in &points[1..] {
            if basis.len() == origin.dim() {
                break;
            }
            let mut v = p - &origin;
            for _ in 0..2 {
                for e in &basis {
                    let c = v.dot(e);
                    v = v.add_scaled(-c, e);
                }
            }
            let n = v.norm();
            if n > tol {
                basis.push(&v * (1.0 / n));
            }
        }
        AffineFrame { origin, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn to_local(&self, x: &Vector) -> Vector {
        let v = x - &self.origin;
        Vector::new(self.basis.iter().map(|e| e.dot(&v)).collect())
    }

    pub fn to_global(&self, y: &Vector) -> Vector {
        let mut x = self.origin.clone();
        for (e, &c) in self.basis.iter().zip(y.iter()) {
            x = x.add_scaled(c, e);
        }
        x
    }
}

pub fn diameter(body: &ConvexBody) -> f64 {
    match body {
        ConvexBody::Segment { a, b } => a.dist(b),
        ConvexBody::Polytope { vertices } => max_pairwise_distance(vertices),
        ConvexBody::Ball { radius, .. } => 2.0 * radius,
    }
}

pub fn max_pairwise_distance(points: &[Vector]) -> f64 {
    let mut best = 0.0_f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    best
}

fn scale_of(points: &[Vector]) -> f64 {
    points.iter().map(|p| p.max_abs()).fold(1.0_f64, f64::max)
}

/// `‖·‖∞` distance from `p` to `conv(points)`, by LP over convex weights.
pub fn hull_distance_inf(points: &[Vector], p: &Vector) -> Result<f64> {
    let n = points.len();
    let d = p.dim();
    let s = n;
    let mut obj = vec![0.0; n + 1];
    obj[s] = 1.0;
    let mut lp = LinearProgram::minimize(obj);
    lp.add_eq((0..n).map(|i| (i, 1.0)).collect(), 1.0);
    for k in 0..d {
        let mut row: Vec<(usize, f64)> = (0..n).map(|i| (i, points[i][k])).collect();
        row.push((s, -1.0));
        lp.add_le(row, p[k]);
        let mut row: Vec<(usize, f64)> = (0..n).map(|i| (i, points[i][k])).collect();
        row.push((s, 1.0));
        lp.add_ge(row, p[k]);
    }
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::LpStatus(format!("hull distance LP: {:?}", sol.status)));
    }
    Ok(sol.objective.max(0.0))
}

/// Vertices of a segment or polytope that are extreme, in input order with
/// duplicates removed.
pub fn extreme_points(body: &ConvexBody) -> Result<Vec<Vector>> {
    let vertices = match body {
        ConvexBody::Segment { a, b } => {
            return Ok(if a == b {
                vec![a.clone()]
            } else {
                vec![a.clone(), b.clone()]
            })
        }
        ConvexBody::Polytope { vertices } => vertices,
        ConvexBody::Ball { .. } => return Err(Error::UnsupportedVariant("ball")),
    };
    let scale = scale_of(vertices);
    let dup_tol = 1e-12 * scale;
    let mut unique: Vec<Vector> = Vec::new();
    for v in vertices {
        if !unique.iter().any(|u| u.dist(v) <= dup_tol) {
            unique.push(v.clone());
        }
    }
    if unique.len() <= 2 {
        return Ok(unique);
    }
    let tol = 1e-10 * scale;
    let mut keep = Vec::with_capacity(unique.len());
    for (i, v) in unique.iter().enumerate() {
        let others: Vec<Vector> = unique
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, u)| u.clone())
            .collect();
        if hull_distance_inf(&others, v)? > tol {
            keep.push(v.clone());
        }
    }
    Ok(keep)
}

/// Membership test with absolute tolerance `tol` (Euclidean for segments and
/// balls, coordinate-wise maximum for polytopes).
pub fn contains(body: &ConvexBody, p: &Vector, tol: f64) -> bool {
    if p.dim() != body.dim() {
        return false;
    }
    match body {
        ConvexBody::Segment { a, b } => distance_to_segment(a, b, p) <= tol,
        ConvexBody::Ball { center, radius } => p.dist(center) <= radius + tol,
        ConvexBody::Polytope { vertices } => {
            let roundoff = 1e-12 * scale_of(vertices).max(p.max_abs());
            match hull_distance_inf(vertices, p) {
                Ok(dist) => dist <= tol + roundoff,
                Err(_) => false,
            }
        }
    }
}

pub fn distance_to_segment(a: &Vector, b: &Vector, p: &Vector) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    p.dist(&a.lerp(b, t))
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Simplices `{e₀} ∪ S` covering `conv(extreme)`, each affinely independent.
pub(crate) fn covering_simplices(extreme: &[Vector]) -> Vec<Vec<Vector>> {
    let frame = AffineFrame::of_points(extreme);
    let k = frame.rank();
    if k == 0 {
        return vec![vec![extreme[0].clone()]];
    }
    let v0 = &extreme[0];
    let mut out = Vec::new();
    for subset in k_subsets(extreme.len() - 1, k) {
        let mut simplex = vec![v0.clone()];
        simplex.extend(subset.iter().map(|&i| extreme[i + 1].clone()));
        if AffineFrame::of_points(&simplex).rank() == k {
            out.push(simplex);
        }
    }
    out
}

struct PointSet {
    points: Vec<Vector>,
    keys: HashSet<Vec<i64>>,
    quantum: f64,
}

impl PointSet {
    fn new(scale: f64) -> Self {
        PointSet {
            points: Vec::new(),
            keys: HashSet::new(),
            quantum: 1e-9 * scale,
        }
    }

    fn insert(&mut self, p: Vector) {
        let key: Vec<i64> = p.iter().map(|x| (x / self.quantum).round() as i64).collect();
        if self.keys.insert(key) {
            self.points.push(p);
        }
    }
}

/// Deterministic grid over `body` with a guaranteed covering radius.
pub fn sample(body: &ConvexBody, resolution: usize) -> Result<SampleGrid> {
    body.validate()?;
    if resolution == 0 {
        return Err(Error::InvalidBody("resolution must be at least 1".into()));
    }
    let r = resolution as f64;
    let (points, covering_radius) = match body {
        ConvexBody::Segment { a, b } => {
            if a == b {
                (vec![a.clone()], 0.0)
            } else {
                let pts = (0..=resolution)
                    .map(|i| a.lerp(b, i as f64 / r))
                    .collect();
                (pts, a.dist(b) / (2.0 * r))
            }
        }
        ConvexBody::Polytope { .. } => {
            let extreme = extreme_points(body)?;
            let simplices = covering_simplices(&extreme);
            let k = simplices[0].len() - 1;
            if k == 0 {
                (vec![extreme[0].clone()], 0.0)
            } else {
                let mass = if k == 1 {
                    0.5 / r
                } else {
                    k.div_ceil(2) as f64 / r
                };
                let mut set = PointSet::new(scale_of(&extreme));
                let mut cover = 0.0_f64;
                let mut comps = Vec::new();
                compositions(resolution, k + 1, &mut Vec::new(), &mut comps);
                for simplex in &simplices {
                    cover = cover.max(mass * max_pairwise_distance(simplex));
                    for c in &comps {
                        let w: Vec<f64> = c.iter().map(|&m| m as f64 / r).collect();
                        set.insert(Vector::combination(simplex, &w));
                    }
                }
                (set.points, cover)
            }
        }
        ConvexBody::Ball { center, radius } => sample_ball(center, *radius, resolution),
    };
    Ok(SampleGrid {
        body: body.clone(),
        resolution,
        points,
        covering_radius,
    })
}

fn sample_ball(center: &Vector, radius: f64, resolution: usize) -> (Vec<Vector>, f64) {
    if radius == 0.0 {
        return (vec![center.clone()], 0.0);
    }
    let d = center.dim();
    let r_count = resolution as f64;
    if d == 2 {
        let delta = radius / r_count;
        let mut pts = vec![center.clone()];
        let mut cover = delta / 2.0;
        for j in 1..=resolution {
            let rj = j as f64 * delta;
            let nj = ((2.0 * std::f64::consts::PI * j as f64).ceil() as usize).max(1);
            for i in 0..nj {
                let ang = 2.0 * std::f64::consts::PI * i as f64 / nj as f64;
                pts.push(Vector::new(vec![
                    center[0] + rj * ang.cos(),
                    center[1] + rj * ang.sin(),
                ]));
            }
            let rho = radius.min(rj + delta / 2.0);
            let s = (std::f64::consts::PI / (2.0 * nj as f64)).sin();
            cover = cover.max((delta * delta / 4.0 + 4.0 * rho * rj * s * s).sqrt());
        }
        return (pts, cover);
    }
    let h = radius / r_count;
    let half_diag = h * (d as f64).sqrt() / 2.0;
    if radius < half_diag {
        return (vec![center.clone()], radius);
    }
    let mut pts = Vec::new();
    let mut z = vec![0i64; d];
    fn rec(
        i: usize,
        partial: f64,
        z: &mut Vec<i64>,
        n: i64,
        h: f64,
        radius: f64,
        center: &Vector,
        out: &mut Vec<Vector>,
    ) {
        if i == z.len() {
            out.push(Vector::new(
                z.iter()
                    .enumerate()
                    .map(|(k, &zk)| center[k] + h * zk as f64)
                    .collect(),
            ));
            return;
        }
        for zi in -n..=n {
            let c = h * zi as f64;
            let total = partial + c * c;
            if total <= radius * radius * (1.0 + 1e-12) {
                z[i] = zi;
                rec(i + 1, total, z, n, h, radius, center, out);
            }
        }
    }
    rec(0, 0.0, &mut z, resolution as i64, h, radius, center, &mut pts);
    (pts, 2.0 * half_diag)
}

/// One point drawn uniformly from the body: segments by parameter, balls by
/// direction and radius, polytopes by rejection from the bounding box of the
/// affine hull frame.
pub fn sample_uniform<R: Rng + ?Sized>(body: &ConvexBody, rng: &mut R) -> Result<Vector> {
    match body {
        ConvexBody::Segment { a, b } => Ok(a.lerp(b, rng.gen::<f64>())),
        ConvexBody::Ball { center, radius } => {
            let d = center.dim();
            let dir = random_unit_vector(d, rng);
            let rho = radius * rng.gen::<f64>().powf(1.0 / d as f64);
            Ok(center.add_scaled(rho, &dir))
        }
        ConvexBody::Polytope { vertices } => {
            let frame = AffineFrame::of_points(vertices);
            match frame.rank() {
                0 => Ok(vertices[0].clone()),
                _ => {
                    let local: Vec<Vector> = vertices.iter().map(|v| frame.to_local(v)).collect();
                    let k = frame.rank();
                    let mut lo = local[0].clone();
                    let mut hi = local[0].clone();
                    for p in &local[1..] {
                        for i in 0..k {
                            lo[i] = lo[i].min(p[i]);
                            hi[i] = hi[i].max(p[i]);
                        }
                    }
                    for _ in 0..100_000 {
                        let y = Vector::new(
                            (0..k).map(|i| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>()).collect(),
                        );
                        let in_hull = if k == 1 {
                            true
                        } else {
                            hull_distance_inf(&local, &y)? <= 1e-12 * scale_of(&local)
                        };
                        if in_hull {
                            return Ok(frame.to_global(&y));
                        }
                    }
                    Err(Error::Inconsistent("rejection sampling failed".into()))
                }
            }
        }
    }
}

/// Uniformly distributed unit vector in ℝᵈ.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    loop {
        let g = Vector::new((0..d).map(|_| standard_normal(rng)).collect());
        let n = g.norm();
        if n > 1e-12 {
            return &g * (1.0 / n);
        }
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
