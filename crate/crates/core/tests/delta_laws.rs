mod common;

use common::*;
use proptest::prelude::*;
use zerocert::delta::{delta_bounds, delta_lower_lp};
use zerocert::geometry::{diameter, sample};
use zerocert::ConvexBody;

#[test]
fn unit_segment_closed_form() {
    let seg = ConvexBody::segment(v(&[0., 0.]), v(&[1., 0.])).unwrap();
    let b = delta_bounds(&seg, 64).unwrap();
    assert_eq!((b.lower, b.upper), (0.25, 0.25));
    for r in [5usize, 8, 13, 64] {
        let lp = delta_lower_lp(&seg, &sample(&seg, r).unwrap()).unwrap();
        let oracle = jensen_triples(r);
        assert!(lp.value >= oracle - 1e-9, "r={r}: lp {} < jensen {oracle}", lp.value);
        assert!(lp.value <= 0.25 + 1e-12);
        assert!(lp.witness.check_interpolable(1e-7).is_ok());
    }
    let lp = delta_lower_lp(&seg, &sample(&seg, 64).unwrap()).unwrap();
    assert!((0.24..=0.25).contains(&lp.value));
}

#[test]
fn pinched_brackets() {
    let square = ConvexBody::axis_box(&v(&[0., 0.]), &v(&[1., 1.])).unwrap();
    let b = delta_bounds(&square, 8).unwrap();
    assert!((b.lower - 0.5).abs() < 1e-6 && (b.upper - 0.5).abs() < 1e-6);

    for r in [0.5, 1.0, 2.5] {
        let ball = ConvexBody::ball(v(&[0.3, -1.0]), r).unwrap();
        let b = delta_bounds(&ball, 8).unwrap();
        assert!((b.lower - r * r).abs() < 1e-9 * r * r && (b.upper - r * r).abs() < 1e-9 * r * r);
    }

    let tri = ConvexBody::polytope(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0.5, 3f64.sqrt() / 2.0])]).unwrap();
    let b = delta_bounds(&tri, 16).unwrap();
    assert!(b.lower >= 0.25 && b.upper <= 1.0 / 3.0 + 1e-9 && b.lower <= b.upper);
    let lp = delta_lower_lp(&tri, &sample(&tri, 16).unwrap()).unwrap();
    assert!(lp.value >= 0.24);
}

#[test]
fn invariance_laws() {
    let mut rng = rng(7);
    for case in 0..50 {
        let d = 2 + case % 2;
        let body = if case % 3 == 0 {
            random_segment(&mut rng, d)
        } else {
            random_simplex(&mut rng, d, d + 1)
        };
        let res = if d == 2 { 6 } else { 4 };
        let base = delta_bounds(&body, res).unwrap();
        let t = random_point(&mut rng, d, 5.0);
        let q = random_rotation(&mut rng, d);
        let lambda = 0.5 + 2.0 * (case as f64 / 50.0);
        let moved = delta_bounds(&body.translate(&t), res).unwrap();
        let turned = delta_bounds(&body.map_points(|x| apply(&q, x), 1.0), res).unwrap();
        let scaled = delta_bounds(&body.scale(lambda), res).unwrap();
        for (name, other, factor) in [("translate", &moved, 1.0), ("rotate", &turned, 1.0), ("scale", &scaled, lambda * lambda)] {
            assert!((other.upper - factor * base.upper).abs() < 1e-6, "case {case} {name} upper");
            assert!((other.lower - factor * base.lower).abs() < 1e-6, "case {case} {name} lower");
        }
    }
}

#[test]
fn floor_positive_on_nondegenerate_bodies() {
    let mut rng = rng(11);
    for case in 0..50 {
        let d = 2 + case % 2;
        let body = match case % 3 {
            0 => random_segment(&mut rng, d),
            1 => random_simplex(&mut rng, d, d + 1),
            _ => random_simplex(&mut rng, d, d + 3),
        };
        let b = delta_bounds(&body, 4).unwrap();
        let floor = diameter(&body).powi(2) / 4.0;
        assert!(floor > 0.0);
        assert!(b.lower >= floor - 1e-9, "case {case}: {} < {floor}", b.lower);
        assert!(b.lower <= b.upper);
    }
}

#[test]
fn nested_grids_give_monotone_lp_bounds() {
    let mut rng = rng(3);
    for _ in 0..6 {
        let body = random_simplex(&mut rng, 2, 3);
        let coarse = sample(&body, 3).unwrap();
        let fine = sample(&body, 6).unwrap();
        let nested = coarse.points.iter().all(|p| fine.points.iter().any(|q| q.dist(p) < 1e-9));
        assert!(nested);
        let a = delta_lower_lp(&body, &coarse).unwrap().value;
        let b = delta_lower_lp(&body, &fine).unwrap().value;
        assert!(a <= b + 1e-8, "{a} > {b}");
    }
}

#[test]
fn singleton_is_zero() {
    let b = delta_bounds(&ConvexBody::singleton(v(&[1., 2., 3.])).unwrap(), 5).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segments_are_exact(a in prop::collection::vec(-10.0..10.0f64, 3), b in prop::collection::vec(-10.0..10.0f64, 3)) {
        let (a, b) = (v(&a), v(&b));
        prop_assume!(a.dist(&b) > 1e-6);
        let exact = a.dist(&b).powi(2) / 4.0;
        let bounds = delta_bounds(&ConvexBody::segment(a, b).unwrap(), 4).unwrap();
        prop_assert!((bounds.lower - exact).abs() <= 1e-12 * exact.max(1.0));
        prop_assert!((bounds.upper - exact).abs() <= 1e-12 * exact.max(1.0));
    }

    #[test]
    fn bracket_is_valid_for_triangles(coords in prop::collection::vec(-3.0..3.0f64, 6)) {
        let pts = vec![v(&coords[0..2]), v(&coords[2..4]), v(&coords[4..6])];
        let body = ConvexBody::polytope(pts).unwrap();
        prop_assume!(diameter(&body) > 1e-3);
        let b = delta_bounds(&body, 4).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.lower >= diameter(&body).powi(2) / 4.0 - 1e-9);
        prop_assert!(b.lower > 0.0);
    }
}
