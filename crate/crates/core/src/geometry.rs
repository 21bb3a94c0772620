//! Capsule signed distances, closest-pair queries between the robot and an
//! obstacle set, and configuration-space distance gradients.

use std::cmp::Ordering;

use nalgebra::{DVector, Isometry3, Vector3};

use crate::robot::{Kinematics, RobotModel};

/// Points within `radius` of the segment `p0`–`p1`. A zero radius is a
/// segment and coincident endpoints give a sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub p0: Vector3<f64>,
    pub p1: Vector3<f64>,
    pub radius: f64,
}

impl Capsule {
    pub fn new(p0: Vector3<f64>, p1: Vector3<f64>, radius: f64) -> Self {
        Self { p0, p1, radius }
    }

    pub fn sphere(center: Vector3<f64>, radius: f64) -> Self {
        Self::new(center, center, radius)
    }

    pub fn is_finite(&self) -> bool {
        self.p0.iter().chain(self.p1.iter()).all(|x| x.is_finite()) && self.radius.is_finite()
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        Self::new(self.p0 + offset, self.p1 + offset, self.radius)
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        Self::new(
            iso.transform_point(&self.p0.into()).coords,
            iso.transform_point(&self.p1.into()).coords,
            self.radius,
        )
    }

    pub fn length(&self) -> f64 {
        (self.p1 - self.p0).norm()
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.p0
            .iter()
            .chain(self.p1.iter())
            .chain(std::iter::once(&self.radius))
            .zip(
                other
                    .p0
                    .iter()
                    .chain(other.p1.iter())
                    .chain(std::iter::once(&other.radius)),
            )
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

/// Closest points between two segments, as parameters along each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentClosest {
    pub s: f64,
    pub t: f64,
    pub dist: f64,
}

const DEGENERATE_LEN2: f64 = 1e-24;

/// Globally closest points between segments `a0–a1` and `b0–b1`.
/// Zero-length segments are treated as points.
pub fn segment_closest_points(
    a0: &Vector3<f64>,
    a1: &Vector3<f64>,
    b0: &Vector3<f64>,
    b1: &Vector3<f64>,
) -> SegmentClosest {
    let d1 = a1 - a0;
    let d2 = b1 - b0;
    let r = a0 - b0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);

    let (s, t) = if a <= DEGENERATE_LEN2 && e <= DEGENERATE_LEN2 {
        (0.0, 0.0)
    } else if a <= DEGENERATE_LEN2 {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= DEGENERATE_LEN2 {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > 1e-14 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                // parallel: any s works, pick the start
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    let pa = a0 + d1 * s;
    let pb = b0 + d2 * t;
    SegmentClosest {
        s,
        t,
        dist: (pa - pb).norm(),
    }
}

/// Signed-distance result between two capsules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceWitness {
    /// Signed distance; negative on penetration.
    pub phi: f64,
    /// Closest point on the surface of the first capsule.
    pub point_a: Vector3<f64>,
    /// Closest point on the surface of the second capsule.
    pub point_b: Vector3<f64>,
    /// Witness points on the center segments.
    pub segment_a: Vector3<f64>,
    pub segment_b: Vector3<f64>,
    /// Unit vector from `segment_b` to `segment_a`; zero when they coincide.
    pub normal: Vector3<f64>,
    /// `(robot collider index, obstacle index)` for robot–obstacle queries.
    pub pair: (usize, usize),
}

impl DistanceWitness {
    pub fn is_degenerate(&self) -> bool {
        self.normal == Vector3::zeros()
    }
}

/// Witness-line separation below which the contact normal is undefined.
pub const COINCIDENT_TOL: f64 = 1e-9;

fn signed_distance_ordered(a: &Capsule, b: &Capsule) -> DistanceWitness {
    let c = segment_closest_points(&a.p0, &a.p1, &b.p0, &b.p1);
    let wa = a.p0 + (a.p1 - a.p0) * c.s;
    let wb = b.p0 + (b.p1 - b.p0) * c.t;
    let normal = if c.dist < COINCIDENT_TOL {
        Vector3::zeros()
    } else {
        (wa - wb) / c.dist
    };
    DistanceWitness {
        phi: c.dist - a.radius - b.radius,
        point_a: wa - normal * a.radius,
        point_b: wb + normal * b.radius,
        segment_a: wa,
        segment_b: wb,
        normal,
        pair: (0, 0),
    }
}

/// Signed distance between two capsules. Symmetric bit-for-bit in its
/// arguments: the pair is evaluated in a canonical order.
pub fn capsule_signed_distance(a: &Capsule, b: &Capsule) -> DistanceWitness {
    if a.cmp_key(b) == Ordering::Greater {
        let w = signed_distance_ordered(b, a);
        DistanceWitness {
            phi: w.phi,
            point_a: w.point_b,
            point_b: w.point_a,
            segment_a: w.segment_b,
            segment_b: w.segment_a,
            normal: -w.normal,
            pair: (0, 0),
        }
    } else {
        signed_distance_ordered(a, b)
    }
}

/// Closest robot–obstacle pairs: the global minimum and one minimum per
/// obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityReport {
    pub global: DistanceWitness,
    pub per_obstacle: Vec<DistanceWitness>,
}

/// Per-obstacle and global minimum signed distance between robot link
/// capsules and obstacles. Returns `None` when either set is empty, in which
/// case there is nothing to constrain.
pub fn min_robot_obstacle_distance(
    links: &[Capsule],
    obstacles: &[Capsule],
) -> Option<ProximityReport> {
    if links.is_empty() || obstacles.is_empty() {
        return None;
    }
    let per_obstacle: Vec<DistanceWitness> = obstacles
        .iter()
        .enumerate()
        .map(|(o, obs)| {
            let mut best: Option<DistanceWitness> = None;
            for (l, link) in links.iter().enumerate() {
                let mut w = capsule_signed_distance(link, obs);
                w.pair = (l, o);
                if best.is_none_or(|b| w.phi < b.phi) {
                    best = Some(w);
                }
            }
            best.expect("links non-empty")
        })
        .collect();
    let global = *per_obstacle
        .iter()
        .reduce(|a, b| if b.phi < a.phi { b } else { a })
        .expect("obstacles non-empty");
    Some(ProximityReport {
        global,
        per_obstacle,
    })
}

/// Every robot–obstacle pair distance, indexed `[collider][obstacle]`.
pub fn pairwise_distances(links: &[Capsule], obstacles: &[Capsule]) -> Vec<Vec<DistanceWitness>> {
    links
        .iter()
        .enumerate()
        .map(|(l, link)| {
            obstacles
                .iter()
                .enumerate()
                .map(|(o, obs)| {
                    let mut w = capsule_signed_distance(link, obs);
                    w.pair = (l, o);
                    w
                })
                .collect()
        })
        .collect()
}

/// Configuration-space gradient of a robot–obstacle distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGradient {
    pub gradient: DVector<f64>,
    /// Normal used, from obstacle toward robot.
    pub normal: Vector3<f64>,
    /// Witness points coincided and no fallback normal was available.
    pub degenerate: bool,
}

/// `∇φ = n̂ᵀ J_p(w_a)`: the contact normal pulled back through the
/// positional Jacobian of the robot-side witness point. `fallback_normal`
/// is used when the witness points coincide (deep contact); without one the
/// gradient is zero and flagged degenerate.
pub fn distance_gradient(
    model: &RobotModel,
    fk: &Kinematics,
    witness: &DistanceWitness,
    fallback_normal: Option<Vector3<f64>>,
) -> DistanceGradient {
    let n = model.dof();
    let (normal, degenerate) = if witness.is_degenerate() {
        match fallback_normal {
            Some(f) if f.norm() > 0.0 => (f.normalize(), false),
            _ => (Vector3::zeros(), true),
        }
    } else {
        (witness.normal, false)
    };
    if degenerate {
        return DistanceGradient {
            gradient: DVector::zeros(n),
            normal,
            degenerate,
        };
    }
    let link = model.colliders[witness.pair.0].link_index;
    let jp = fk.point_jacobian(link, &witness.segment_a);
    DistanceGradient {
        gradient: jp.tr_mul(&normal),
        normal,
        degenerate,
    }
}

/// Gradient of a distance between two robot colliders `a` and `b`, where
/// `witness` was computed as `capsule_signed_distance(a, b)`.
pub fn self_distance_gradient(
    model: &RobotModel,
    fk: &Kinematics,
    collider_a: usize,
    collider_b: usize,
    witness: &DistanceWitness,
) -> DVector<f64> {
    if witness.is_degenerate() {
        return DVector::zeros(model.dof());
    }
    let la = model.colliders[collider_a].link_index;
    let lb = model.colliders[collider_b].link_index;
    let ja = fk.point_jacobian(la, &witness.segment_a);
    let jb = fk.point_jacobian(lb, &witness.segment_b);
    (ja - jb).tr_mul(&witness.normal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    #[test]
    fn parallel_segments() {
        let c = segment_closest_points(&v(0., 0., 0.), &v(1., 0., 0.), &v(0., 1., 0.), &v(1., 1., 0.));
        assert!((c.dist - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_point() {
        let c = segment_closest_points(&v(0., 0., 0.), &v(0., 0., 0.), &v(3., 4., 0.), &v(3., 4., 0.));
        assert_eq!(c.dist, 5.0);
    }

    #[test]
    fn sphere_distances() {
        let a = Capsule::sphere(v(0., 0., 0.), 0.1);
        let b = Capsule::sphere(v(1., 0., 0.), 0.2);
        assert!((capsule_signed_distance(&a, &b).phi - 0.7).abs() < 1e-15);
        let a = Capsule::sphere(v(0., 0., 0.), 0.2);
        let b = Capsule::sphere(v(0.25, 0., 0.), 0.1);
        let w = capsule_signed_distance(&a, &b);
        assert!((w.phi + 0.05).abs() < 1e-15);
        // penetration witness points lie on the center line
        assert!((w.point_a - v(0.2, 0., 0.)).norm() < 1e-15);
        assert!((w.point_b - v(0.15, 0., 0.)).norm() < 1e-15);
    }

    #[test]
    fn swapped_arguments_mirror_witness() {
        let a = Capsule::new(v(0., 0., 0.), v(1., 0.2, 0.), 0.1);
        let b = Capsule::new(v(0.3, 1., 0.5), v(0.2, -1., 0.4), 0.05);
        let ab = capsule_signed_distance(&a, &b);
        let ba = capsule_signed_distance(&b, &a);
        assert_eq!(ab.phi, ba.phi);
        assert_eq!(ab.point_a, ba.point_b);
        assert_eq!(ab.normal, -ba.normal);
    }

    #[test]
    fn min_selection_picks_closest_link() {
        let obstacle = [Capsule::sphere(v(0., 0., 0.), 0.0)];
        let links = [Capsule::sphere(v(0.3, 0., 0.), 0.0), Capsule::sphere(v(0., 0.1, 0.), 0.0)];
        let r = min_robot_obstacle_distance(&links, &obstacle).unwrap();
        assert!((r.per_obstacle[0].phi - 0.1).abs() < 1e-15);
        assert_eq!(r.per_obstacle[0].pair, (1, 0));
        assert_eq!(r.global, r.per_obstacle[0]);
    }

    #[test]
    fn singleton_matches_pair_distance() {
        let link = [Capsule::new(v(0., 0., 0.), v(0., 0., 1.), 0.05)];
        let obs = [Capsule::new(v(0.5, -1., 0.5), v(0.5, 1., 0.5), 0.1)];
        let r = min_robot_obstacle_distance(&link, &obs).unwrap();
        assert_eq!(r.global.phi, capsule_signed_distance(&link[0], &obs[0]).phi);
    }

    #[test]
    fn empty_obstacles_is_none() {
        let link = [Capsule::sphere(v(0., 0., 0.), 0.1)];
        assert!(min_robot_obstacle_distance(&link, &[]).is_none());
    }
}
