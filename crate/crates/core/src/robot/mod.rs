//! Serial-chain manipulator description: joints, limits, link colliders.

mod config;
mod kinematics;

pub use config::{load_robot, load_robot_file, serialize_robot};
pub use kinematics::{
    forward_kinematics, geometric_jacobian, jacobian_derivatives, link_capsules_world,
    point_jacobian, Kinematics,
};

use nalgebra::{DVector, Isometry3, Translation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Bundled 7-DoF anthropomorphic arm.
pub const BUNDLED_ARM7: &str = include_str!("../../assets/arm7.toml");

/// Joint configuration vector.
pub type JointVector = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

impl JointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Revolute => "revolute",
            JointKind::Prismatic => "prismatic",
        }
    }
}

/// A rigid transform stored the way it is written in a robot document:
/// translation plus fixed-axis roll/pitch/yaw. Keeping the authored values
/// makes documents round-trip exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Origin {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
}

impl Origin {
    pub fn translation(x: f64, y: f64, z: f64) -> Self {
        Self {
            xyz: [x, y, z],
            rpy: [0.0; 3],
        }
    }

    pub fn isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::new(self.xyz[0], self.xyz[1], self.xyz[2]),
            UnitQuaternion::from_euler_angles(self.rpy[0], self.rpy[1], self.rpy[2]),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    /// Unit axis in the joint frame.
    pub axis: Vector3<f64>,
    pub parent_offset: Origin,
    pub limit_lower: f64,
    pub limit_upper: f64,
}

/// Capsule attached to a link, expressed in that link's frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCollider {
    pub link_index: usize,
    pub local_segment: [Vector3<f64>; 2],
    pub radius: f64,
}

/// An immutable, validated kinematic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub name: String,
    pub joints: Vec<JointSpec>,
    pub base_pose: Origin,
    pub ee_offset: Origin,
    pub colliders: Vec<LinkCollider>,
    /// Collider pairs whose link indices differ by at least this much are
    /// checked for self-collision.
    pub self_collision_gap: usize,
    /// Optional nominal configuration used to start rollouts.
    pub home: Option<Vec<f64>>,
    // cached transforms
    base_iso: Isometry3<f64>,
    ee_iso: Isometry3<f64>,
    offsets: Vec<Isometry3<f64>>,
}

impl RobotModel {
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec>,
        base_pose: Origin,
        ee_offset: Origin,
        colliders: Vec<LinkCollider>,
    ) -> Result<Self> {
        let model = Self {
            name: name.into(),
            base_iso: base_pose.isometry(),
            ee_iso: ee_offset.isometry(),
            offsets: joints.iter().map(|j| j.parent_offset.isometry()).collect(),
            joints,
            base_pose,
            ee_offset,
            colliders,
            self_collision_gap: 2,
            home: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_self_collision_gap(mut self, gap: usize) -> Self {
        self.self_collision_gap = gap.max(1);
        self
    }

    pub fn with_home(mut self, home: Vec<f64>) -> Result<Self> {
        if home.len() != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: home.len(),
            });
        }
        self.home = Some(home);
        Ok(self)
    }

    /// Loads the bundled 7-DoF arm.
    pub fn bundled_arm7() -> Self {
        load_robot(BUNDLED_ARM7).expect("bundled arm document is valid")
    }

    fn validate(&self) -> Result<()> {
        if self.joints.is_empty() {
            return Err(Error::invalid("joint", "robot needs at least one joint"));
        }
        for (i, j) in self.joints.iter().enumerate() {
            if !j.axis.iter().all(|v| v.is_finite()) || (j.axis.norm() - 1.0).abs() >= 1e-9 {
                return Err(Error::invalid(
                    format!("joint[{i}].axis"),
                    "non-unit joint axis",
                ));
            }
            if !(j.limit_lower <= j.limit_upper) {
                return Err(Error::invalid(
                    format!("joint[{i}].limits"),
                    "lower limit exceeds upper limit",
                ));
            }
        }
        for (i, c) in self.colliders.iter().enumerate() {
            if !(c.radius > 0.0) {
                return Err(Error::invalid(
                    format!("collider[{i}].radius"),
                    "nonpositive collider radius",
                ));
            }
            if c.link_index >= self.joints.len() {
                return Err(Error::invalid(
                    format!("collider[{i}].link"),
                    format!(
                        "link index {} outside chain of {} links",
                        c.link_index,
                        self.joints.len()
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Degrees of freedom.
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn lower_limits(&self) -> JointVector {
        JointVector::from_iterator(self.dof(), self.joints.iter().map(|j| j.limit_lower))
    }

    pub fn upper_limits(&self) -> JointVector {
        JointVector::from_iterator(self.dof(), self.joints.iter().map(|j| j.limit_upper))
    }

    /// Home configuration, or the midpoint of the limits when none is given.
    pub fn home_configuration(&self) -> JointVector {
        match &self.home {
            Some(h) => JointVector::from_column_slice(h),
            None => (self.lower_limits() + self.upper_limits()) * 0.5,
        }
    }

    /// Collider index pairs checked for self-collision.
    pub fn self_collision_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for a in 0..self.colliders.len() {
            for b in (a + 1)..self.colliders.len() {
                let la = self.colliders[a].link_index;
                let lb = self.colliders[b].link_index;
                if la.abs_diff(lb) >= self.self_collision_gap {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    pub(crate) fn check_dim(&self, q: &JointVector) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_arm_shape() {
        let arm = RobotModel::bundled_arm7();
        assert_eq!(arm.dof(), 7);
        assert_eq!(arm.colliders.len(), 8);
        assert!(!arm.self_collision_pairs().is_empty());
        let home = arm.home_configuration();
        for i in 0..7 {
            assert!(home[i] >= arm.joints[i].limit_lower && home[i] <= arm.joints[i].limit_upper);
        }
    }

    #[test]
    fn rejects_inverted_limits() {
        let j = JointSpec {
            name: "j".into(),
            kind: JointKind::Revolute,
            axis: Vector3::z(),
            parent_offset: Origin::default(),
            limit_lower: 1.0,
            limit_upper: -1.0,
        };
        let err = RobotModel::new("r", vec![j], Origin::default(), Origin::default(), vec![])
            .unwrap_err();
        assert!(err.to_string().contains("joint[0].limits"), "{err}");
    }
}
