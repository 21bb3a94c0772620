//! Capsule distances against a dense parameter-grid oracle.

mod common;

use common::*;
use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use rayon::prelude::*;
use safe_ik::geometry::{
    capsule_signed_distance, min_robot_obstacle_distance, segment_closest_points, Capsule,
};

#[test]
fn segment_examples() {
    let z = Vector3::zeros();
    let r = segment_closest_points(&z, &Vector3::x(), &Vector3::y(), &Vector3::new(1.0, 1.0, 0.0));
    assert!((r.dist - 1.0).abs() < 1e-15);
    let r = segment_closest_points(&z, &z, &Vector3::new(3.0, 4.0, 0.0), &Vector3::new(3.0, 4.0, 0.0));
    assert!((r.dist - 5.0).abs() < 1e-15);
}

#[test]
fn sphere_examples() {
    let a = Capsule::sphere(Vector3::zeros(), 0.1);
    let b = Capsule::sphere(Vector3::x(), 0.2);
    assert!((capsule_signed_distance(&a, &b).phi - 0.7).abs() < 1e-15);
    let a = Capsule::sphere(Vector3::zeros(), 0.2);
    let b = Capsule::sphere(Vector3::new(0.25, 0.0, 0.0), 0.1);
    assert!((capsule_signed_distance(&a, &b).phi + 0.05).abs() < 1e-15);
}

#[test]
fn random_pairs_match_grid_oracle() {
    let mut rng = rng(20);
    let pairs: Vec<(Capsule, Capsule)> = (0..1000)
        .map(|_| (random_capsule(&mut rng), random_capsule(&mut rng)))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|(a, b)| {
            let w = capsule_signed_distance(a, b);
            let (coarse, fine) = grid_oracle(a, b, 2001);
            let seg = w.phi + a.radius + b.radius;
            assert!((seg - coarse).abs() < 1e-3, "coarse {seg} vs {coarse}");
            (seg - fine).abs()
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-9, "worst refined error {worst}");
}

#[test]
fn symmetric_and_rigidly_invariant() {
    let mut rng = rng(21);
    for _ in 0..1000 {
        let a = random_capsule(&mut rng);
        let b = random_capsule(&mut rng);
        let ab = capsule_signed_distance(&a, &b);
        let ba = capsule_signed_distance(&b, &a);
        assert_eq!(ab.phi, ba.phi);
        let axis = random_point(&mut rng, 1.0);
        let rot = UnitQuaternion::from_scaled_axis(axis * 3.0);
        let iso = Isometry3::from_parts(Translation3::from(random_point(&mut rng, 5.0)), rot);
        let moved = capsule_signed_distance(&a.transformed(&iso), &b.transformed(&iso));
        assert!((moved.phi - ab.phi).abs() < 1e-10);
        let seg = segment_closest_points(&a.p0, &a.p1, &b.p0, &b.p1).dist;
        assert_eq!(ab.phi < 0.0, seg < a.radius + b.radius);
    }
}

#[test]
fn witness_points_lie_on_witness_line() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let a = random_capsule(&mut rng);
        let b = random_capsule(&mut rng);
        let w = capsule_signed_distance(&a, &b);
        if w.is_degenerate() {
            continue;
        }
        let line = (w.segment_a - w.segment_b).normalize();
        let da = w.point_a - w.segment_b;
        let db = w.point_b - w.segment_b;
        assert!(da.cross(&line).norm() < 1e-9);
        assert!(db.cross(&line).norm() < 1e-9);
        assert!(((w.segment_a - w.segment_b).norm() - a.radius - b.radius - w.phi).abs() < 1e-12);
    }
}

#[test]
fn global_minimum_is_exhaustive() {
    let mut rng = rng(23);
    for _ in 0..200 {
        let links: Vec<Capsule> = (0..8).map(|_| random_capsule(&mut rng)).collect();
        let obs: Vec<Capsule> = (0..5).map(|_| random_capsule(&mut rng)).collect();
        let report = min_robot_obstacle_distance(&links, &obs).unwrap();
        let mut best = f64::INFINITY;
        for (o, ob) in obs.iter().enumerate() {
            let per = links
                .iter()
                .map(|l| capsule_signed_distance(l, ob).phi)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(report.per_obstacle[o].phi, per);
            best = best.min(per);
        }
        assert_eq!(report.global.phi, best);
        let (l, o) = report.global.pair;
        assert_eq!(capsule_signed_distance(&links[l], &obs[o]).phi, best);
    }
    assert!(min_robot_obstacle_distance(&[random_capsule(&mut rng)], &[]).is_none());
}

#[test]
fn two_links_pick_the_closer() {
    let obs = Capsule::sphere(Vector3::zeros(), 0.0);
    let far = Capsule::sphere(Vector3::new(0.3, 0.0, 0.0), 0.0);
    let near = Capsule::sphere(Vector3::new(0.0, 0.1, 0.0), 0.0);
    let r = min_robot_obstacle_distance(&[far, near], &[obs]).unwrap();
    assert!((r.per_obstacle[0].phi - 0.1).abs() < 1e-15);
    assert_eq!(r.global.pair, (1, 0));
}
