//! Arbitration weight and pose blending between an operator pose and an
//! autonomy reference.

use nalgebra::{UnitQuaternion, Vector3};
use safe_ik::blend::{arbitration_weight, blend_pose, ArbitrationParams, BlendInput};
use safe_ik::pose::Pose;

fn main() {
    let params = ArbitrationParams::default();
    let reference = Pose::new(Vector3::new(0.5, 0.0, 0.3), UnitQuaternion::from_euler_angles(std::f64::consts::PI, 0.0, 0.0));

    println!("offset [m]  alpha   blended position            angle to ref [deg]");
    for offset in [0.0, 0.05, 0.1, 0.2, 0.4, 0.8] {
        let human = Pose::new(
            reference.position + Vector3::new(0.0, offset, 0.0),
            reference.orientation * UnitQuaternion::from_euler_angles(0.0, 0.0, 4.0 * offset),
        );
        let alpha = arbitration_weight(&human.position, &reference.position, &params);
        let blended = blend_pose(&BlendInput { human, reference }, alpha);
        let p = blended.position;
        println!(
            "{offset:<10.2}  {alpha:.3}   [{:.3}, {:.3}, {:.3}]       {:.2}",
            p.x,
            p.y,
            p.z,
            blended.angle_to(&reference).to_degrees()
        );
    }
}
