mod common;

use common::rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use zerocert::optim::{solve_lp, LinearProgram, LpStatus, RowKind};

/// Brute force: every vertex of {x : Ax ≤ b, lo ≤ x ≤ hi} is the solution
/// of n active constraints; the best feasible one is the optimum.
fn vertex_enumeration(a: &[Vec<f64>], b: &[f64], lo: f64, hi: f64, c: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), hi));
        rows.push((e.iter().map(|v| -v).collect(), -lo));
    }
    let total = rows.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| rows[idx[i]].0[j]);
        let rhs = DVector::from_fn(n, |i, _| rows[idx[i]].1);
        if let Some(x) = m.lu().solve(&rhs) {
            let feasible = rows
                .iter()
                .all(|(r, bb)| r.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= bb + 1e-9);
            if feasible && x.iter().all(|v| v.is_finite()) {
                let val: f64 = c.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(val, |b: f64| b.min(val)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < total - n + i {
                idx[i] += 1;
                for k in i + 1..n {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}

#[test]
fn random_boxed_lps_match_vertex_enumeration() {
    let mut rng = rng(2024);
    for case in 0..60 {
        let n = 2 + case % 2;
        let k = 3 + case % 3;
        let a: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut lp = LinearProgram::minimize(c.clone());
        for (row, rhs) in a.iter().zip(&b) {
            lp.add_dense(row, RowKind::Le, *rhs);
        }
        for j in 0..n {
            lp.set_bounds(j, -2.0, 2.0);
        }
        let sol = solve_lp(&lp).unwrap();
        match vertex_enumeration(&a, &b, -2.0, 2.0, &c) {
            Some(opt) => {
                assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
                assert!((sol.objective - opt).abs() < 1e-7, "case {case}: {} vs {opt}", sol.objective);
                assert!(lp.max_violation(&sol.x) < 1e-8);
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible, "case {case}"),
        }
    }
}

#[test]
fn duals_satisfy_strong_duality() {
    // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
    let mut lp = LinearProgram::maximize(vec![3.0, 2.0]);
    lp.add_le(vec![(0, 1.0), (1, 1.0)], 4.0);
    lp.add_le(vec![(0, 1.0), (1, 3.0)], 6.0);
    lp.add_le(vec![(0, 1.0)], 3.0);
    let sol = solve_lp(&lp).unwrap();
    assert!((sol.objective - 11.0).abs() < 1e-9);
    let dual_obj: f64 = sol.duals.iter().zip([4.0, 6.0, 3.0]).map(|(y, b)| y * b).sum();
    assert!((dual_obj - 11.0).abs() < 1e-9);
}
