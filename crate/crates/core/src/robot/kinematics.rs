use nalgebra::{Isometry3, Matrix3xX, Matrix6xX, Translation3, UnitQuaternion, Unit, Vector3};

use super::{JointKind, JointVector, RobotModel};
use crate::error::Result;
use crate::geometry::Capsule;
use crate::pose::Pose;

/// Forward-kinematics result for one configuration.
#[derive(Debug, Clone)]
pub struct Kinematics {
    /// World frame of each link (after its joint motion).
    pub link_frames: Vec<Isometry3<f64>>,
    pub ee: Isometry3<f64>,
    /// World joint axes.
    pub axes: Vec<Vector3<f64>>,
    kinds: Vec<JointKind>,
}

impl Kinematics {
    pub fn ee_pose(&self) -> Pose {
        Pose::from_isometry(&self.ee)
    }

    pub fn ee_position(&self) -> Vector3<f64> {
        self.ee.translation.vector
    }

    fn pivot(&self, j: usize) -> Vector3<f64> {
        self.link_frames[j].translation.vector
    }

    /// 6×n geometric Jacobian of the end effector (linear rows first).
    pub fn jacobian(&self) -> Matrix6xX<f64> {
        let n = self.axes.len();
        let pe = self.ee_position();
        let mut jac = Matrix6xX::zeros(n);
        for j in 0..n {
            let z = self.axes[j];
            match self.kinds[j] {
                JointKind::Revolute => {
                    let lin = z.cross(&(pe - self.pivot(j)));
                    jac.fixed_view_mut::<3, 1>(0, j).copy_from(&lin);
                    jac.fixed_view_mut::<3, 1>(3, j).copy_from(&z);
                }
                JointKind::Prismatic => {
                    jac.fixed_view_mut::<3, 1>(0, j).copy_from(&z);
                }
            }
        }
        jac
    }

    /// 3×n positional Jacobian of a world point rigidly attached to `link`.
    pub fn point_jacobian(&self, link: usize, point: &Vector3<f64>) -> Matrix3xX<f64> {
        let n = self.axes.len();
        let mut jac = Matrix3xX::zeros(n);
        for j in 0..=link.min(n - 1) {
            let z = self.axes[j];
            let col = match self.kinds[j] {
                JointKind::Revolute => z.cross(&(point - self.pivot(j))),
                JointKind::Prismatic => z,
            };
            jac.set_column(j, &col);
        }
        jac
    }

    /// Partial derivatives `∂J/∂q_j` of the end-effector Jacobian, one 6×n
    /// matrix per joint.
    pub fn jacobian_derivatives(&self) -> Vec<Matrix6xX<f64>> {
        let n = self.axes.len();
        let pe = self.ee_position();
        (0..n)
            .map(|j| {
                let zj = self.axes[j];
                let pj = self.pivot(j);
                let revolute_j = self.kinds[j] == JointKind::Revolute;
                // motion of downstream quantities under dq_j
                let d_point = |p: Vector3<f64>| {
                    if revolute_j {
                        zj.cross(&(p - pj))
                    } else {
                        zj
                    }
                };
                let d_pe = d_point(pe);
                let mut dj = Matrix6xX::zeros(n);
                for i in 0..n {
                    let zi = self.axes[i];
                    let dzi = if revolute_j && i > j {
                        zj.cross(&zi)
                    } else {
                        Vector3::zeros()
                    };
                    match self.kinds[i] {
                        JointKind::Revolute => {
                            let dpi = if i >= j { d_point(self.pivot(i)) } else { Vector3::zeros() };
                            let lin = dzi.cross(&(pe - self.pivot(i))) + zi.cross(&(d_pe - dpi));
                            dj.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
                            dj.fixed_view_mut::<3, 1>(3, i).copy_from(&dzi);
                        }
                        JointKind::Prismatic => {
                            dj.fixed_view_mut::<3, 1>(0, i).copy_from(&dzi);
                        }
                    }
                }
                dj
            })
            .collect()
    }
}

fn joint_motion(kind: JointKind, axis: &Vector3<f64>, q: f64) -> Isometry3<f64> {
    match kind {
        JointKind::Revolute => Isometry3::from_parts(
            Translation3::identity(),
            UnitQuaternion::from_axis_angle(&Unit::new_unchecked(*axis), q),
        ),
        JointKind::Prismatic => {
            Isometry3::from_parts(Translation3::from(axis * q), UnitQuaternion::identity())
        }
    }
}

/// Link frames and end-effector pose at `q`. Defined for any finite `q`;
/// joint limits are not enforced here.
pub fn forward_kinematics(model: &RobotModel, q: &JointVector) -> Result<Kinematics> {
    model.check_dim(q)?;
    let n = model.dof();
    let mut frames = Vec::with_capacity(n);
    let mut axes = Vec::with_capacity(n);
    let mut t = model.base_iso;
    for (i, joint) in model.joints.iter().enumerate() {
        t *= model.offsets[i];
        axes.push(t.rotation * joint.axis);
        t *= joint_motion(joint.kind, &joint.axis, q[i]);
        frames.push(t);
    }
    let ee = t * model.ee_iso;
    Ok(Kinematics {
        link_frames: frames,
        ee,
        axes,
        kinds: model.joints.iter().map(|j| j.kind).collect(),
    })
}

pub fn geometric_jacobian(model: &RobotModel, q: &JointVector) -> Result<Matrix6xX<f64>> {
    Ok(forward_kinematics(model, q)?.jacobian())
}

pub fn point_jacobian(
    model: &RobotModel,
    q: &JointVector,
    link: usize,
    point: &Vector3<f64>,
) -> Result<Matrix3xX<f64>> {
    Ok(forward_kinematics(model, q)?.point_jacobian(link, point))
}

pub fn jacobian_derivatives(model: &RobotModel, q: &JointVector) -> Result<Vec<Matrix6xX<f64>>> {
    Ok(forward_kinematics(model, q)?.jacobian_derivatives())
}

/// World-frame capsules of every link collider at `q`.
pub fn link_capsules_world(model: &RobotModel, q: &JointVector) -> Result<Vec<Capsule>> {
    let fk = forward_kinematics(model, q)?;
    Ok(capsules_from_frames(model, &fk))
}

impl Kinematics {
    /// World-frame collider capsules for this configuration.
    pub fn link_capsules(&self, model: &RobotModel) -> Vec<Capsule> {
        capsules_from_frames(model, self)
    }
}

fn capsules_from_frames(model: &RobotModel, fk: &Kinematics) -> Vec<Capsule> {
    model
        .colliders
        .iter()
        .map(|c| {
            let f = &fk.link_frames[c.link_index];
            Capsule::new(
                f.transform_point(&c.local_segment[0].into()).coords,
                f.transform_point(&c.local_segment[1].into()).coords,
                c.radius,
            )
        })
        .collect()
}
