#![allow(dead_code)]

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safe_ik::geometry::Capsule;
use safe_ik::robot::{JointVector, RobotModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Central finite differences of a scalar function.
pub fn fd_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |j, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

pub fn relative_error(analytic: &DVector<f64>, numeric: &DVector<f64>) -> f64 {
    (analytic - numeric).norm() / numeric.norm().max(1e-6)
}

/// Uniform random configuration strictly inside the joint limits.
pub fn random_q(model: &RobotModel, rng: &mut impl Rng) -> JointVector {
    JointVector::from_fn(model.dof(), |i, _| {
        let j = &model.joints[i];
        let margin = 0.05 * (j.limit_upper - j.limit_lower);
        rng.random_range(j.limit_lower + margin..j.limit_upper - margin)
    })
}

pub fn random_point(rng: &mut impl Rng, half: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

pub fn random_capsule(rng: &mut impl Rng) -> Capsule {
    let c = random_point(rng, 1.0);
    let d = random_point(rng, 0.5);
    Capsule::new(c - d, c + d, rng.random_range(0.0..0.2))
}

/// Obstacle capsule placed around the arm's workspace.
pub fn random_obstacle(rng: &mut impl Rng) -> Capsule {
    let c = Vector3::new(
        rng.random_range(-0.7..0.7),
        rng.random_range(-0.7..0.7),
        rng.random_range(0.0..1.1),
    );
    let d = random_point(rng, 0.2);
    Capsule::new(c - d, c + d, rng.random_range(0.02..0.08))
}

pub fn seg_dist(a: &Capsule, b: &Capsule, s: f64, t: f64) -> f64 {
    let pa = a.p0 + (a.p1 - a.p0) * s;
    let pb = b.p0 + (b.p1 - b.p0) * t;
    (pa - pb).norm()
}

/// Brute force over an `n×n` grid, then repeated zoomed grids around the
/// incumbent. Returns (coarse, refined) distances.
pub fn grid_oracle(a: &Capsule, b: &Capsule, n: usize) -> (f64, f64) {
    let step = 1.0 / (n - 1) as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n {
        let s = i as f64 * step;
        for j in 0..n {
            let t = j as f64 * step;
            let d = seg_dist(a, b, s, t);
            if d < best.0 {
                best = (d, s, t);
            }
        }
    }
    let coarse = best.0;
    let mut half = 2.0 * step;
    while half > 1e-13 {
        let (_, s0, t0) = best;
        let m = 40;
        for i in 0..=m {
            let s = (s0 - half + 2.0 * half * i as f64 / m as f64).clamp(0.0, 1.0);
            for j in 0..=m {
                let t = (t0 - half + 2.0 * half * j as f64 / m as f64).clamp(0.0, 1.0);
                let d = seg_dist(a, b, s, t);
                if d < best.0 {
                    best = (d, s, t);
                }
            }
        }
        half /= 8.0;
    }
    (coarse, best.0)
}
