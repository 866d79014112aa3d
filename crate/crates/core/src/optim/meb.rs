//! Minimum enclosing ball of a finite point set.
//!
//! Solved through its dual `max_λ Σ λᵢ‖sᵢ‖² − ‖Σ λᵢ sᵢ‖²` over the simplex
//! with away-step Frank–Wolfe (Bădoiu–Clarkson with exact line search). The
//! center is always the convex combination `Σ λᵢ sᵢ`, so it lies in the hull,
//! and the reported radius is `maxᵢ ‖sᵢ − c‖` for that center: a valid
//! enclosing ball whatever the iteration count.

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosingBall {
    pub center: Vector,
    pub radius: f64,
    /// Convex weights expressing the center.
    pub weights: Vec<f64>,
}

const MAX_ITERATIONS: usize = 100_000;

pub fn min_enclosing_ball(points: &[Vector]) -> EnclosingBall {
    assert!(!points.is_empty(), "min_enclosing_ball needs at least one point");
    let mut weights = vec![0.0; points.len()];
    weights[0] = 1.0;
    let mut center = points[0].clone();
    let scale = points
        .iter()
        .map(|p| p.dist(&points[0]))
        .fold(0.0_f64, f64::max);
    let tol = 1e-15 * scale * scale;
    for it in 0..MAX_ITERATIONS {
        let r2: Vec<f64> = points.iter().map(|s| s.dist(&center).powi(2)).collect();
        // Dual value D = Σ λᵢ ‖sᵢ − c‖².
        let dual: f64 = weights.iter().zip(&r2).map(|(w, r)| w * r).sum();
        let (far, far_r2) = r2
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
        let gap = far_r2 - dual;
        if gap <= tol {
            break;
        }
        let (near, near_r2) = r2
            .iter()
            .enumerate()
            .filter(|&(i, _)| weights[i] > 0.0)
            .fold((far, f64::INFINITY), |acc, (i, &r)| if r < acc.1 { (i, r) } else { acc });
        let (j, rj2, lo, hi) = if far_r2 - dual >= dual - near_r2 || weights[near] >= 1.0 {
            (far, far_r2, 0.0, 1.0)
        } else {
            let w = weights[near];
            (near, near_r2, -w / (1.0 - w), 0.0)
        };
        if rj2 == 0.0 {
            break;
        }
        // λ ← (1 − γ)λ + γ eⱼ with the exact maximizing γ.
        let gamma = ((rj2 - dual) / (2.0 * rj2)).clamp(lo, hi);
        if gamma == 0.0 {
            break;
        }
        for w in weights.iter_mut() {
            *w *= 1.0 - gamma;
        }
        weights[j] += gamma;
        if gamma <= lo {
            weights[j] = 0.0;
        }
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        if it % 32 == 31 {
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            center = Vector::combination(points, &weights);
        } else {
            center = center.lerp(&points[j], gamma);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let center = Vector::combination(points, &weights);
    let radius = points
        .iter()
        .map(|s| s.dist(&center))
        .fold(0.0_f64, f64::max);
    EnclosingBall {
        center,
        radius,
        weights,
    }
}
