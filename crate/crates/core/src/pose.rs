//! Rigid poses: position plus unit quaternion.

use nalgebra::{Isometry3, Quaternion, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// An SE(3) element stored as position and unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), UnitQuaternion::identity())
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(Vector3::new(x, y, z), UnitQuaternion::identity())
    }

    /// Builds a pose from a `[w, x, y, z]` quaternion, normalizing it.
    pub fn from_wxyz(position: [f64; 3], wxyz: [f64; 4]) -> Self {
        let q = Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
        Self::new(Vector3::from(position), UnitQuaternion::from_quaternion(q))
    }

    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.orientation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(Translation3::from(self.position), self.orientation)
    }

    pub fn from_isometry(iso: &Isometry3<f64>) -> Self {
        Self::new(iso.translation.vector, iso.rotation)
    }

    /// Rotation vector `log(target · self⁻¹)`, the orientation error that
    /// carries `self` onto `target` in the world frame.
    pub fn orientation_error(&self, target: &Pose) -> Vector3<f64> {
        quat_log(&(target.orientation * self.orientation.inverse()))
    }

    /// Geodesic angle to another orientation in radians, in `[0, π]`.
    pub fn angle_to(&self, other: &Pose) -> f64 {
        quat_log(&(other.orientation * self.orientation.inverse())).norm()
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

/// Quaternion logarithm as a rotation vector (axis · angle), taking the
/// shortest rotation so the angle lies in `[0, π]`.
pub fn quat_log(q: &UnitQuaternion<f64>) -> Vector3<f64> {
    let mut w = q.w;
    let mut v = q.imag();
    if w < 0.0 {
        w = -w;
        v = -v;
    }
    let s = v.norm();
    if s < 1e-12 {
        // first-order expansion around identity
        return v * 2.0;
    }
    let angle = 2.0 * s.atan2(w);
    v * (angle / s)
}

/// Wire/config representation of a pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub pos: [f64; 3],
    /// `[w, x, y, z]`
    pub quat: [f64; 4],
}

impl From<&Pose> for PoseRecord {
    fn from(p: &Pose) -> Self {
        Self {
            pos: [p.position.x, p.position.y, p.position.z],
            quat: p.wxyz(),
        }
    }
}

impl From<PoseRecord> for Pose {
    fn from(r: PoseRecord) -> Self {
        Pose::from_wxyz(r.pos, r.quat)
    }
}
