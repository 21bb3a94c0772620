//! Forward kinematics of the bundled 7-DoF arm, its geometric Jacobian and a
//! finite-difference check of the positional rows.

use nalgebra::DVector;
use safe_ik::robot::{forward_kinematics, geometric_jacobian, RobotModel};

fn main() -> safe_ik::Result<()> {
    let model = RobotModel::bundled_arm7();
    let q = DVector::from_vec(vec![0.1, 0.6, -0.2, 1.4, 0.3, 1.0, 0.0]);
    let fk = forward_kinematics(&model, &q)?;
    let ee = fk.ee_pose();
    println!("dof {}", model.dof());
    println!("ee position {:.4?}", ee.position.as_slice());
    println!("ee quat wxyz {:.4?}", ee.wxyz());

    let jac = geometric_jacobian(&model, &q)?;
    println!("jacobian (rows: vx vy vz wx wy wz)\n{jac:.4}");

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for j in 0..model.dof() {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[j] += h;
        qm[j] -= h;
        let dp = (forward_kinematics(&model, &qp)?.ee_position() - forward_kinematics(&model, &qm)?.ee_position()) / (2.0 * h);
        worst = worst.max((dp - jac.fixed_view::<3, 1>(0, j)).norm());
    }
    println!("max |J_v - finite difference| = {worst:.2e}");

    for (i, c) in fk.link_capsules(&model).iter().enumerate() {
        println!("link {i}: length {:.3} radius {:.3}", c.length(), c.radius);
    }
    Ok(())
}
