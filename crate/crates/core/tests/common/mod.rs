#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerocert::{ConvexBody, Vector};

pub fn v(x: &[f64]) -> Vector {
    Vector::from_slice(x)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize, half_width: f64) -> Vector {
    Vector::new((0..d).map(|_| rng.gen_range(-half_width..half_width)).collect())
}

pub fn random_segment(rng: &mut ChaCha8Rng, d: usize) -> ConvexBody {
    loop {
        let (a, b) = (random_point(rng, d, 2.0), random_point(rng, d, 2.0));
        if a.dist(&b) > 0.1 {
            return ConvexBody::segment(a, b).unwrap();
        }
    }
}

/// Random simplex with `k` vertices in dimension `d`, not too flat.
pub fn random_simplex(rng: &mut ChaCha8Rng, d: usize, k: usize) -> ConvexBody {
    loop {
        let pts: Vec<Vector> = (0..k).map(|_| random_point(rng, d, 1.5)).collect();
        let rows: Vec<Vec<f64>> = pts[1..]
            .iter()
            .map(|p| (p - &pts[0]).as_slice().to_vec())
            .collect();
        let m = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        let sv = m.singular_values();
        if sv.iter().all(|&s| s > 0.3) {
            return ConvexBody::polytope(pts).unwrap();
        }
    }
}

/// Haar-ish random rotation from the QR factors of a Gaussian-like matrix.
pub fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    if q.determinant() < 0.0 {
        let mut q = q;
        q.column_mut(0).neg_mut();
        q
    } else {
        q
    }
}

pub fn apply(m: &DMatrix<f64>, x: &Vector) -> Vector {
    Vector::new((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum()).collect())
}

use zerocert::operators::{ParamValue, Params};
use zerocert::{make_catalog_operator, OperatorHandle};

pub fn affine(a: [[f64; 2]; 2], b: [f64; 2]) -> OperatorHandle {
    let mut p = Params::new();
    p.insert("A".into(), ParamValue::Matrix(a.iter().map(|r| r.to_vec()).collect()));
    p.insert("b".into(), ParamValue::Vector(b.to_vec()));
    make_catalog_operator("affine", &p).unwrap()
}

pub fn square_map(scale: f64) -> OperatorHandle {
    let mut p = Params::new();
    p.insert("scale".into(), ParamValue::Scalar(scale));
    make_catalog_operator("square_map", &p).unwrap()
}

pub fn named(name: &str) -> OperatorHandle {
    make_catalog_operator(name, &Params::new()).unwrap()
}

pub fn translation(c: [f64; 2]) -> OperatorHandle {
    let mut p = Params::new();
    p.insert("c".into(), ParamValue::Vector(c.to_vec()));
    make_catalog_operator("translation", &p).unwrap()
}

/// One of: random affine map, scaled square map, default circle map.
pub fn random_certified_operator(rng: &mut ChaCha8Rng, which: usize) -> OperatorHandle {
    match which % 3 {
        0 => {
            let a = [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
            affine(a, [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
        }
        1 => square_map(rng.gen_range(0.2..3.0)),
        _ => named("prop11_circle"),
    }
}

/// Random segment or triangle with vertices inside the box `[lo, hi]`.
pub fn random_sub_body(rng: &mut ChaCha8Rng, lo: &Vector, hi: &Vector, triangle: bool) -> ConvexBody {
    let mut pick = || Vector::new((0..lo.dim()).map(|i| rng.gen_range(lo[i]..hi[i])).collect());
    if triangle {
        ConvexBody::polytope(vec![pick(), pick(), pick()]).unwrap()
    } else {
        ConvexBody::segment(pick(), pick()).unwrap()
    }
}

// Independent oracles.

use nalgebra::DVector;
use zerocert::geometry::sample;
use zerocert::optim::min_norm_point;

/// Exact nearest point of conv S to 0 by enumerating faces: for each subset,
/// the affine minimizer with nonnegative weights is a candidate.
pub fn face_enumeration(points: &[Vector]) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let kkt = DMatrix::from_fn(k + 1, k + 1, |a, b| match (a < k, b < k) {
            (true, true) => points[idx[a]].dot(&points[idx[b]]),
            (false, false) => 0.0,
            _ => 1.0,
        });
        let mut rhs = DVector::zeros(k + 1);
        rhs[k] = 1.0;
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        if sol.iter().take(k).any(|&w| w < -1e-12 || !w.is_finite()) {
            continue;
        }
        let p = Vector::combination(&idx.iter().map(|&i| points[i].clone()).collect::<Vec<_>>(), &sol.as_slice()[..k]);
        best = best.min(p.norm());
    }
    best
}

/// Coarse grid over the weight simplex; never below the true distance.
pub fn simplex_grid(points: &[Vector], steps: usize) -> f64 {
    fn rec(points: &[Vector], left: usize, steps: usize, i: usize, w: &mut Vec<f64>, best: &mut f64) {
        if i == points.len() - 1 {
            w.push(left as f64 / steps as f64);
            *best = best.min(Vector::combination(points, w).norm());
            w.pop();
            return;
        }
        for t in 0..=left {
            w.push(t as f64 / steps as f64);
            rec(points, left - t, steps, i + 1, w, best);
            w.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(points, steps, steps, 0, &mut Vec::new(), &mut best);
    best
}

/// Best two-point Jensen bound on a 1-D grid of [0, 1]: for a < b < c with
/// b = λa + (1−λ)c, convexity of ψ forces osc(t² + ψ) ≥ λ(1−λ)(c − a)².
pub fn jensen_triples(r: usize) -> f64 {
    let t: Vec<f64> = (0..=r).map(|i| i as f64 / r as f64).collect();
    let mut best = 0.0_f64;
    for a in 0..=r {
        for b in a + 1..=r {
            for c in b + 1..=r {
                let lambda = (t[c] - t[b]) / (t[c] - t[a]);
                best = best.max(lambda * (1.0 - lambda) * (t[c] - t[a]).powi(2));
            }
        }
    }
    best
}

/// Independent estimate of inf_X ‖Φ‖ from above: exact for affine maps
/// (Φ(X) is the hull of the vertex images), a fine-grid minimum otherwise.
pub fn fine_min(op: &zerocert::OperatorHandle, x: &ConvexBody) -> f64 {
    if op.name() == "affine" {
        let images: Vec<Vector> = x.generators().unwrap().iter().map(|p| op.eval(p).unwrap()).collect();
        return min_norm_point(&images, 1e-12).norm;
    }
    let res = if matches!(x, ConvexBody::Segment { .. }) { 2000 } else { 60 };
    sample(x, res)
        .unwrap()
        .points
        .iter()
        .map(|p| op.eval(p).unwrap().norm())
        .fold(f64::INFINITY, f64::min)
}
