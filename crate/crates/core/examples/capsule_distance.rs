//! Signed distance between capsules, with witness points, for separated,
//! touching and penetrating configurations.

use nalgebra::Vector3;
use safe_ik::geometry::{capsule_signed_distance, Capsule};

fn main() {
    let bar = Capsule::new(Vector3::new(-0.2, 0.0, 0.0), Vector3::new(0.2, 0.0, 0.0), 0.03);
    for (label, z) in [("separated", 0.2), ("touching", 0.06), ("penetrating", 0.04), ("coaxial", 0.0)] {
        let post = Capsule::new(Vector3::new(0.1, -0.1, z), Vector3::new(0.1, 0.1, z), 0.03);
        let w = capsule_signed_distance(&bar, &post);
        println!(
            "{label:<12} phi {:+.4}  a {:.3?}  b {:.3?}  normal {:.3?}{}",
            w.phi,
            w.point_a.as_slice(),
            w.point_b.as_slice(),
            w.normal.as_slice(),
            if w.is_degenerate() { "  (degenerate)" } else { "" }
        );
    }
}
