mod common;

use common::*;
use rand::Rng;
use zerocert::delta::delta_bounds;
use zerocert::geometry::sample;
use zerocert::minimax::{convexity_mechanism_check, gap_inequality_check, minimax_values};
use zerocert::ConvexBody;

#[test]
fn gap_inequality_holds_with_known_constants() {
    let mut rng = rng(8);
    for seed in 0..100 {
        let op = random_certified_operator(&mut rng, seed);
        let l = op.grad_lipschitz().unwrap();
        let lo = random_point(&mut rng, 2, 2.0);
        let hi = &lo + &v(&[rng.gen_range(0.3..1.5), rng.gen_range(0.3..1.5)]);
        let body = random_sub_body(&mut rng, &lo, &hi, seed % 2 == 0);
        let bounds = delta_bounds(&body, 6).unwrap();
        let grid = sample(&body, 6).unwrap();
        let check = gap_inequality_check(&op, &body, &bounds.lower_witness, &grid, l).unwrap();
        assert!(check.holds, "seed {seed}: lhs {} rhs {} slack {}", check.lhs, check.rhs, check.slack);
        assert!(check.report.sup_inf <= check.report.inf_sup + 1e-12);
        let mech = convexity_mechanism_check(&op, &body, l, 50, seed as u64).unwrap();
        assert_eq!(mech.violations, 0, "seed {seed}");
    }
}

#[test]
fn circle_example_numbers() {
    let op = named("prop11_circle");
    let x = ConvexBody::segment(v(&[0., 0.]), v(&[1., 0.])).unwrap();
    let bounds = delta_bounds(&x, 64).unwrap();
    let grid = sample(&x, 64).unwrap();
    let check = gap_inequality_check(&op, &x, &bounds.lower_witness, &grid, op.grad_lipschitz().unwrap()).unwrap();
    assert!(check.holds);
    assert!((check.lhs - 1.0).abs() < 1e-9);
    let pi = std::f64::consts::PI;
    assert!((check.rhs - pi * pi / 8.0).abs() < 1e-9);
}

#[test]
fn affine_gap_is_zero() {
    let op = affine([[1.0, 2.0], [0.0, 1.0]], [3.0, 1.0]);
    let x = ConvexBody::polytope(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0., 1.])]).unwrap();
    let r = minimax_values(&op, &sample(&x, 8).unwrap()).unwrap();
    assert!(r.gap.abs() < 1e-9);
}

#[test]
fn falsified_constant_is_caught() {
    let op = square_map(1.0);
    let x = ConvexBody::axis_box(&v(&[-1., -1.]), &v(&[1., 1.])).unwrap();
    let check = convexity_mechanism_check(&op, &x, 0.1, 200, 4).unwrap();
    assert!(check.violations > 0);
    assert!(check.worst < 0.0);
}
