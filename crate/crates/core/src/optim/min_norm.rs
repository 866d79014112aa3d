//! Nearest point of a finite convex hull to the origin.
//!
//! Frank–Wolfe with away steps over the simplex of convex weights, with exact
//! line search on `‖Σ λᵢ sᵢ‖²`. The stopping quantity is the Wolfe dual gap
//! `⟨p, p⟩ − minᵢ ⟨p, sᵢ⟩`: once it is at most `tol²`, either `‖p‖ ≤ tol` or
//! `p/‖p‖` separates every `sᵢ` with margin `‖p‖ − tol`.
//!
//! Away-step Frank–Wolfe crawls when the nearest point sits on a thin face of
//! nearly collinear points; if it stops short of the gap target, Wolfe's
//! active-set method (exact affine minimization over a corral) takes over and
//! the result with the smaller gap is kept.

use serde::{Deserialize, Serialize};

use nalgebra::{DMatrix, DVector};

use crate::linalg::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinNormResult {
    pub point: Vector,
    /// Convex weights over the input points.
    pub weights: Vec<f64>,
    pub norm: f64,
    pub dual_gap: f64,
    pub iterations: usize,
}

impl MinNormResult {
    /// Certified lower bound on `dist(0, conv S)`:
    /// `minᵢ ⟨sᵢ, p⟩ / ‖p‖`, floored at zero.
    pub fn distance_lower_bound(&self, points: &[Vector]) -> f64 {
        if self.norm == 0.0 {
            return 0.0;
        }
        let y = &self.point * (1.0 / self.norm);
        points
            .iter()
            .map(|s| s.dot(&y))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

const MAX_ITERATIONS: usize = 20_000;
const WOLFE_MAX_ITERATIONS: usize = 10_000;

pub fn min_norm_point(points: &[Vector], tol: f64) -> MinNormResult {
    assert!(!points.is_empty(), "min_norm_point needs at least one point");
    let fw = frank_wolfe(points, tol);
    if fw.dual_gap <= tol * tol || fw.norm == 0.0 {
        return fw;
    }
    match wolfe(points, tol) {
        Some(w) if w.dual_gap < fw.dual_gap => w,
        _ => fw,
    }
}

fn frank_wolfe(points: &[Vector], tol: f64) -> MinNormResult {
    let n = points.len();
    let start = (0..n)
        .min_by(|&i, &j| points[i].norm_sq().total_cmp(&points[j].norm_sq()))
        .unwrap();
    let mut weights = vec![0.0; n];
    weights[start] = 1.0;
    let mut p = points[start].clone();
    let target = tol * tol;
    let mut iterations = 0;
    let mut stalled = 0;
    let mut gap;
    loop {
        let pp = p.norm_sq();
        let dots: Vec<f64> = points.iter().map(|s| s.dot(&p)).collect();
        let (fw, fw_dot) = dots
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc });
        gap = pp - fw_dot;
        if gap <= target || pp == 0.0 || iterations >= MAX_ITERATIONS || stalled >= 20 {
            break;
        }
        let (away, away_dot) = dots
            .iter()
            .enumerate()
            .filter(|&(i, _)| weights[i] > 0.0)
            .fold((start, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        let away_gap = away_dot - pp;
        let (dir, max_step, is_away) = if gap >= away_gap || weights[away] >= 1.0 {
            (&points[fw] - &p, 1.0, false)
        } else {
            let w = weights[away];
            (&p - &points[away], w / (1.0 - w), true)
        };
        let dd = dir.norm_sq();
        if dd == 0.0 {
            break;
        }
        let step = (-p.dot(&dir) / dd).clamp(0.0, max_step);
        if step <= 0.0 {
            stalled += 1;
            iterations += 1;
            continue;
        }
        if is_away {
            for w in weights.iter_mut() {
                *w *= 1.0 + step;
            }
            weights[away] -= step;
            if step >= max_step {
                weights[away] = 0.0;
            }
        } else {
            for w in weights.iter_mut() {
                *w *= 1.0 - step;
            }
            weights[fw] += step;
        }
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let new_p = if iterations % 64 == 63 {
            Vector::combination(points, &weights)
        } else {
            p.add_scaled(step, &dir)
        };
        if new_p.norm_sq() >= pp {
            stalled += 1;
        } else {
            stalled = 0;
        }
        p = new_p;
        iterations += 1;
    }
    finish(points, weights, iterations)
}

fn finish(points: &[Vector], mut weights: Vec<f64>, iterations: usize) -> MinNormResult {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let point = Vector::combination(points, &weights);
    let pp = point.norm_sq();
    let min_dot = points
        .iter()
        .map(|s| s.dot(&point))
        .fold(f64::INFINITY, f64::min);
    MinNormResult {
        norm: pp.sqrt(),
        dual_gap: (pp - min_dot).max(0.0),
        point,
        weights,
        iterations,
    }
}

/// Minimizer of `‖Σ αᵢ sᵢ‖` over the affine hull of the corral (Σ αᵢ = 1).
fn affine_minimizer(points: &[Vector], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for (a, &i) in corral.iter().enumerate() {
        for (b, &j) in corral.iter().enumerate() {
            kkt[(a, b)] = points[i].dot(&points[j]);
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

fn wolfe(points: &[Vector], tol: f64) -> Option<MinNormResult> {
    let n = points.len();
    let scale = points.iter().map(Vector::norm_sq).fold(0.0, f64::max);
    let start = (0..n).min_by(|&i, &j| points[i].norm_sq().total_cmp(&points[j].norm_sq()))?;
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();
    let mut iterations = 0;
    while iterations < WOLFE_MAX_ITERATIONS {
        iterations += 1;
        let xx = x.norm_sq();
        let (j, dot) = (0..n)
            .map(|i| (i, points[i].dot(&x)))
            .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        if xx - dot <= tol * tol || xx - dot <= 1e-15 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        loop {
            let alpha = affine_minimizer(points, &corral)?;
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|&(_, &a)| a <= 1e-14)
                .map(|(&l, &a)| if l - a > 0.0 { l / (l - a) } else { 0.0 })
                .fold(1.0_f64, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-14).collect();
            corral = corral.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
            lambda = lambda.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
            if corral.is_empty() {
                return None;
            }
        }
        let mut weights = vec![0.0; n];
        for (&i, &l) in corral.iter().zip(&lambda) {
            weights[i] = l;
        }
        x = Vector::combination(points, &weights);
    }
    let mut weights = vec![0.0; n];
    for (&i, &l) in corral.iter().zip(&lambda) {
        weights[i] = l.max(0.0);
    }
    Some(finish(points, weights, iterations))
}
