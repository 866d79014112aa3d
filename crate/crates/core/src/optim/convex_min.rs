//! Minimization of a convex function over a body with a certified slack.
//!
//! Every evaluated point `xₖ` contributes a cut `f ≥ f(xₖ) + ⟨sₖ, · − xₖ⟩`
//! from its subgradient. The returned `slack` is `value − LB` where `LB` is a
//! lower bound on `inf_body f` implied by the cuts, so `value − slack ≤ inf f`
//! holds for any convex `f` regardless of how far the iteration got.
//!
//! * Segments: golden-section search on the parameter, then the exact minimum
//!   over `[0, 1]` of the piecewise-linear cut model.
//! * Polytopes: Kelley's cutting-plane method; the master LP over convex
//!   weights on the extreme points yields both the next trial point and `LB`.
//! * Balls: projected gradient with backtracking; `LB` is the best
//!   Frank–Wolfe bound `f(xₖ) + ⟨sₖ, c − xₖ⟩ − r‖sₖ‖`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{extreme_points, ConvexBody};
use crate::linalg::Vector;
use crate::optim::lp::{solve_lp, LinearProgram};

pub trait ConvexObjective {
    fn value(&self, x: &Vector) -> f64;
    fn subgradient(&self, x: &Vector) -> Vector;
}

/// Adapter turning a value closure and a subgradient closure into an objective.
pub struct FnObjective<F, G> {
    pub value: F,
    pub subgradient: G,
}

impl<F, G> ConvexObjective for FnObjective<F, G>
where
    F: Fn(&Vector) -> f64,
    G: Fn(&Vector) -> Vector,
{
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        (self.subgradient)(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexMinimum {
    pub argmin: Vector,
    pub value: f64,
    /// `value − slack` is a certified lower bound on the infimum.
    pub slack: f64,
    pub iterations: usize,
}

impl ConvexMinimum {
    pub fn lower_bound(&self) -> f64 {
        self.value - self.slack
    }
}

pub const MAX_KELLEY_ITERATIONS: usize = 400;

pub fn minimize_convex(
    f: &dyn ConvexObjective,
    body: &ConvexBody,
    tol: f64,
) -> Result<ConvexMinimum> {
    match body {
        ConvexBody::Segment { a, b } => Ok(minimize_on_segment(f, a, b)),
        ConvexBody::Polytope { .. } => {
            let ext = extreme_points(body)?;
            match ext.len() {
                1 => {
                    let value = f.value(&ext[0]);
                    Ok(ConvexMinimum {
                        argmin: ext[0].clone(),
                        value,
                        slack: 0.0,
                        iterations: 0,
                    })
                }
                2 => Ok(minimize_on_segment(f, &ext[0], &ext[1])),
                _ => kelley(f, &ext, tol),
            }
        }
        ConvexBody::Ball { center, radius } => projected_gradient(f, center, *radius, tol),
    }
}

struct Cut {
    t: f64,
    value: f64,
    slope: f64,
}

/// Exact minimum over `[0, 1]` of `maxₖ (vₖ + gₖ (t − tₖ))`.
fn cut_model_minimum(cuts: &[Cut]) -> f64 {
    let model = |t: f64| {
        cuts.iter()
            .map(|c| c.value + c.slope * (t - c.t))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = model(0.0).min(model(1.0));
    for (i, c1) in cuts.iter().enumerate() {
        for c2 in &cuts[i + 1..] {
            let ds = c1.slope - c2.slope;
            if ds.abs() < 1e-300 {
                continue;
            }
            // v1 + s1 (t − t1) = v2 + s2 (t − t2)
            let t = (c2.value - c1.value + c1.slope * c1.t - c2.slope * c2.t) / ds;
            if (0.0..=1.0).contains(&t) {
                best = best.min(model(t));
            }
        }
    }
    best
}

fn minimize_on_segment(f: &dyn ConvexObjective, a: &Vector, b: &Vector) -> ConvexMinimum {
    let dir = b - a;
    let point = |t: f64| a.lerp(b, t);
    let mut cuts: Vec<Cut> = Vec::new();
    let eval = |t: f64, cuts: &mut Vec<Cut>| -> f64 {
        let x = point(t);
        let value = f.value(&x);
        let slope = f.subgradient(&x).dot(&dir);
        cuts.push(Cut { t, value, slope });
        value
    };
    if a == b {
        let value = eval(0.0, &mut cuts);
        return ConvexMinimum {
            argmin: a.clone(),
            value,
            slack: 0.0,
            iterations: 1,
        };
    }
    eval(0.0, &mut cuts);
    eval(1.0, &mut cuts);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1, &mut cuts);
    let mut f2 = eval(x2, &mut cuts);
    let mut iterations = 4;
    while hi - lo > 1e-13 && iterations < 200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1, &mut cuts);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2, &mut cuts);
        }
        iterations += 1;
    }
    let (best_t, value) = cuts
        .iter()
        .map(|c| (c.t, c.value))
        .fold((0.0, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc });
    // Keep the model small: cuts nearest the minimizer plus the endpoints.
    cuts.sort_by(|c1, c2| (c1.t - best_t).abs().total_cmp(&(c2.t - best_t).abs()));
    let mut kept: Vec<Cut> = cuts.drain(..cuts.len().min(40)).collect();
    kept.extend(cuts.into_iter().filter(|c| c.t == 0.0 || c.t == 1.0));
    let lower = cut_model_minimum(&kept);
    ConvexMinimum {
        argmin: point(best_t),
        value,
        slack: (value - lower).max(0.0),
        iterations,
    }
}

fn kelley(f: &dyn ConvexObjective, vertices: &[Vector], tol: f64) -> Result<ConvexMinimum> {
    let n = vertices.len();
    let mut trial: Vec<Vector> = vertices.to_vec();
    trial.push(Vector::combination(
        vertices,
        &vec![1.0 / n as f64; n],
    ));
    // Each cut: (value at xₖ, subgradient sₖ, xₖ).
    let mut cuts: Vec<(f64, Vector, Vector)> = Vec::new();
    let mut best: Option<(Vector, f64)> = None;
    let add = |x: Vector, cuts: &mut Vec<(f64, Vector, Vector)>, best: &mut Option<(Vector, f64)>| {
        let v = f.value(&x);
        let s = f.subgradient(&x);
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            *best = Some((x.clone(), v));
        }
        cuts.push((v, s, x));
    };
    for x in trial {
        add(x, &mut cuts, &mut best);
    }
    let scale = vertices.iter().map(Vector::max_abs).fold(1.0_f64, f64::max);
    let mut lower = f64::NEG_INFINITY;
    for it in 0..MAX_KELLEY_ITERATIONS {
        // Variables: μ₀..μₙ₋₁ ≥ 0, z free (index n). min z.
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = LinearProgram::minimize(obj);
        lp.set_free(n);
        lp.add_eq((0..n).map(|i| (i, 1.0)).collect(), 1.0);
        for (v, s, x) in &cuts {
            // z − Σ μᵢ ⟨s, vᵢ⟩ ≥ v − ⟨s, x⟩
            let mut row: Vec<(usize, f64)> = (0..n).map(|i| (i, -s.dot(&vertices[i]))).collect();
            row.push((n, 1.0));
            lp.add_ge(row, v - s.dot(x));
        }
        let (bx, bv) = best.clone().unwrap();
        let done = |lower: f64| ConvexMinimum {
            argmin: bx.clone(),
            value: bv,
            slack: (bv - lower).max(0.0),
            iterations: it,
        };
        // The slack is certified at every step, so a master LP breakdown
        // after the first round ends the iteration rather than failing it.
        let sol = match solve_lp(&lp) {
            Ok(sol) if sol.is_optimal() => sol,
            Ok(_) | Err(_) if lower.is_finite() => return Ok(done(lower)),
            Ok(sol) => return Err(Error::LpStatus(format!("Kelley master LP: {:?}", sol.status))),
            Err(e) => return Err(e),
        };
        lower = lower.max(sol.x[n]);
        if bv - lower <= tol * bv.abs().max(1.0) {
            return Ok(done(lower));
        }
        let y = Vector::combination(vertices, &sol.x[..n]);
        // A repeated trial point adds no information: the model is exhausted
        // at this precision.
        if cuts.iter().any(|(_, _, x)| x.dist(&y) <= 1e-13 * scale) {
            return Ok(done(lower));
        }
        // A second cut halfway to the incumbent stabilizes the model.
        let mid = y.lerp(&bx, 0.5);
        add(y, &mut cuts, &mut best);
        add(mid, &mut cuts, &mut best);
    }
    let (_, bv) = best.unwrap();
    Err(Error::NonConvergence {
        iterations: MAX_KELLEY_ITERATIONS,
        value: bv,
        slack: bv - lower,
    })
}

fn project_to_ball(x: &Vector, center: &Vector, radius: f64) -> Vector {
    let d = x - center;
    let n = d.norm();
    if n <= radius {
        x.clone()
    } else {
        center.add_scaled(radius / n, &d)
    }
}

fn projected_gradient(
    f: &dyn ConvexObjective,
    center: &Vector,
    radius: f64,
    tol: f64,
) -> Result<ConvexMinimum> {
    let mut x = center.clone();
    let mut fx = f.value(&x);
    let mut lower = f64::NEG_INFINITY;
    let mut step = 1.0;
    let max_iter = 20_000;
    for it in 0..max_iter {
        let s = f.subgradient(&x);
        lower = lower.max(fx + s.dot(&(center - &x)) - radius * s.norm());
        if fx - lower <= tol || radius == 0.0 {
            return Ok(ConvexMinimum {
                argmin: x,
                value: fx,
                slack: (fx - lower).max(0.0),
                iterations: it,
            });
        }
        // Backtracking on the projected step.
        let mut accepted = false;
        for _ in 0..60 {
            let y = project_to_ball(&x.add_scaled(-step, &s), center, radius);
            let fy = f.value(&y);
            let d = &y - &x;
            if fy <= fx + s.dot(&d) + d.norm_sq() / (2.0 * step) {
                x = y;
                fx = fy;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        value: fx,
        slack: fx - lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }

    fn shifted_square(c: Vector) -> impl ConvexObjective {
        let c2 = c.clone();
        FnObjective {
            value: move |x: &Vector| (x - &c).norm_sq(),
            subgradient: move |x: &Vector| &(x - &c2) * 2.0,
        }
    }

    #[test]
    fn norm_squared_on_offset_segment() {
        let seg = ConvexBody::segment(v(&[1., 0.]), v(&[2., 0.])).unwrap();
        let r = minimize_convex(&shifted_square(v(&[0., 0.])), &seg, 1e-9).unwrap();
        assert!(r.argmin.dist(&v(&[1., 0.])) < 1e-9);
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!(r.slack <= 1e-9);
    }

    #[test]
    fn far_target_on_unit_square() {
        let sq = ConvexBody::polytope(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0., 1.]), v(&[1., 1.])])
            .unwrap();
        let r = minimize_convex(&shifted_square(v(&[5., 5.])), &sq, 1e-6).unwrap();
        assert!(r.argmin.dist(&v(&[1., 1.])) < 1e-9);
        assert!((r.value - 32.0).abs() < 1e-9);
    }

    #[test]
    fn tilted_quadratic_on_segment() {
        let seg = ConvexBody::segment(v(&[0., 0.]), v(&[1., 0.])).unwrap();
        let f = FnObjective {
            value: |x: &Vector| x.norm_sq() - x[0],
            subgradient: |x: &Vector| v(&[2.0 * x[0] - 1.0, 2.0 * x[1]]),
        };
        let r = minimize_convex(&f, &seg, 1e-9).unwrap();
        assert!((r.argmin[0] - 0.5).abs() < 1e-6);
        assert!((r.value + 0.25).abs() < 1e-12);
        assert!(r.lower_bound() <= -0.25 + 1e-15);
        assert!(r.slack < 1e-9);
    }

    #[test]
    fn interior_minimum_in_triangle_is_certified() {
        let tri = ConvexBody::polytope(vec![v(&[0., 0.]), v(&[2., 0.]), v(&[0., 2.])]).unwrap();
        let r = minimize_convex(&shifted_square(v(&[0.5, 0.5])), &tri, 1e-6).unwrap();
        assert!(r.value <= 1e-6);
        assert!(r.lower_bound() <= 0.0);
    }

    #[test]
    fn nonsmooth_kink_on_polytope() {
        // f(x) = |x₀ − 0.3| + |x₁ − 0.6| has its minimum 0 at a kink.
        let sq = ConvexBody::polytope(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0., 1.]), v(&[1., 1.])])
            .unwrap();
        let f = FnObjective {
            value: |x: &Vector| (x[0] - 0.3).abs() + (x[1] - 0.6).abs(),
            subgradient: |x: &Vector| v(&[(x[0] - 0.3).signum(), (x[1] - 0.6).signum()]),
        };
        let r = minimize_convex(&f, &sq, 1e-6).unwrap();
        assert!(r.lower_bound() <= 1e-12);
        assert!(r.value <= 1e-6 + 1e-12);
    }

    #[test]
    fn ball_interior_and_boundary_minima() {
        let ball = ConvexBody::ball(v(&[0., 0.]), 1.0).unwrap();
        let r = minimize_convex(&shifted_square(v(&[0.2, -0.1])), &ball, 1e-8).unwrap();
        assert!(r.value < 1e-8 && r.lower_bound() <= 0.0);
        let r = minimize_convex(&shifted_square(v(&[3., 0.])), &ball, 1e-8).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6);
        assert!(r.lower_bound() <= 4.0 + 1e-12);
    }
}

