mod common;

use common::*;
use zerocert::minimax::{hull_certificate_from_images, HullWitness};
use zerocert::optim::min_norm_point;
use zerocert::Vector;

#[test]
fn frank_wolfe_matches_brute_force() {
    let mut rng = rng(99);
    for case in 0..30 {
        let d = 1 + case % 3;
        let n = 1 + case % 5;
        let pts: Vec<Vector> = (0..n).map(|_| random_point(&mut rng, d, 1.0)).collect();
        let exact = face_enumeration(&pts);
        let fw = min_norm_point(&pts, 1e-10);
        assert!((fw.norm - exact).abs() < 1e-4, "case {case}: {} vs {exact}", fw.norm);
        assert!(simplex_grid(&pts, 24) >= exact - 1e-12);
        assert!(fw.distance_lower_bound(&pts) <= exact + 1e-12);
    }
}

#[test]
fn separation_directions_validate() {
    let mut rng = rng(5);
    let mut separated = 0;
    for _ in 0..30 {
        let d = 2 + separated % 2;
        let shift = random_point(&mut rng, d, 3.0);
        let pts: Vec<Vector> = (0..5).map(|_| &random_point(&mut rng, d, 1.0) + &shift).collect();
        let cert = hull_certificate_from_images(pts.clone(), pts.clone(), 1e-9).unwrap();
        if let HullWitness::SampleSeparation { direction, margin, .. } = &cert.witness {
            separated += 1;
            assert!(*margin > 0.0);
            for p in &pts {
                assert!(p.dot(direction) >= margin - 1e-10);
            }
        }
    }
    assert!(separated > 10);
}
