use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::blend::{blend_pose, BlendInput};
use crate::error::{Error, Result};
use crate::pose::{Pose, PoseRecord};

/// A pose the trajectory passes through at rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub pos: [f64; 3],
    /// `w, x, y, z`
    pub quat: [f64; 4],
}

impl Waypoint {
    pub fn new(t: f64, pose: &Pose) -> Self {
        let rec = PoseRecord::from(pose);
        Self {
            t,
            pos: rec.pos,
            quat: rec.quat,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::from_wxyz(self.pos, self.quat)
    }
}

/// Time-stamped end-effector poses, interpolated linearly in position and
/// by SLERP in orientation between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory {
    samples: Vec<(f64, Pose)>,
}

/// `10τ³ − 15τ⁴ + 6τ⁵`: zero velocity and acceleration at both ends.
fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

fn interpolate(a: &Pose, b: &Pose, s: f64) -> Pose {
    blend_pose(&BlendInput { human: *a, reference: *b }, s)
}

impl ReferenceTrajectory {
    pub fn new(samples: Vec<(f64, Pose)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("trajectory", "needs at least one sample"));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("trajectory", "sample times must be strictly increasing"));
            }
        }
        if samples.iter().any(|(t, p)| !t.is_finite() || !p.position.iter().all(|v| v.is_finite())) {
            return Err(Error::invalid("trajectory", "non-finite sample"));
        }
        Ok(Self { samples })
    }

    /// Samples `f` every `period` seconds over `[0, duration]`.
    pub fn from_fn(duration: f64, period: f64, f: impl Fn(f64) -> Pose) -> Result<Self> {
        if !(duration > 0.0 && period > 0.0) {
            return Err(Error::invalid("trajectory", "duration and period must be positive"));
        }
        let n = (duration / period).round() as usize;
        Self::new((0..=n).map(|k| {
            let t = k as f64 * period;
            (t, f(t))
        }).collect())
    }

    /// Rest-to-rest minimum-jerk segments between consecutive waypoints,
    /// sampled every `period` seconds.
    pub fn from_waypoints(waypoints: &[Waypoint], period: f64) -> Result<Self> {
        let first = waypoints
            .first()
            .ok_or_else(|| Error::invalid("trajectory.waypoints", "needs at least one waypoint"))?;
        if waypoints.len() == 1 {
            return Self::new(vec![(first.t, first.pose())]);
        }
        for w in waypoints.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::invalid("trajectory.waypoints", "times must be strictly increasing"));
            }
        }
        let poses: Vec<Pose> = waypoints.iter().map(Waypoint::pose).collect();
        let start = first.t;
        let end = waypoints[waypoints.len() - 1].t;
        Self::from_fn(end - start, period, |t| {
            let t = t + start;
            let i = waypoints.partition_point(|w| w.t <= t).clamp(1, waypoints.len() - 1);
            let (a, b) = (&waypoints[i - 1], &waypoints[i]);
            interpolate(&poses[i - 1], &poses[i], min_jerk((t - a.t) / (b.t - a.t)))
        })
        .map(|mut traj| {
            for s in &mut traj.samples {
                s.0 += start;
            }
            traj
        })
    }

    pub fn samples(&self) -> &[(f64, Pose)] {
        &self.samples
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].0 - self.samples[0].0
    }

    /// Pose at `t`, held constant outside the sampled range.
    pub fn sample(&self, t: f64) -> Pose {
        let i = self.samples.partition_point(|(ts, _)| *ts <= t);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let (t0, a) = &self.samples[i - 1];
        let (t1, b) = &self.samples[i];
        interpolate(a, b, (t - t0) / (t1 - t0))
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|(t, p)| (*t, Pose::new(p.position + offset, p.orientation)))
                .collect(),
        }
    }

    pub fn rotated_locally(&self, rot: &UnitQuaternion<f64>) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|(t, p)| (*t, Pose::new(p.position, p.orientation * rot)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(t: f64, x: f64) -> Waypoint {
        Waypoint::new(t, &Pose::from_translation(x, 0.0, 0.0))
    }

    #[test]
    fn waypoints_are_hit_at_rest() {
        let traj = ReferenceTrajectory::from_waypoints(&[wp(0.0, 0.0), wp(1.0, 1.0), wp(3.0, -1.0)], 0.01).unwrap();
        assert!((traj.sample(1.0).position.x - 1.0).abs() < 1e-12);
        assert!((traj.sample(3.0).position.x + 1.0).abs() < 1e-12);
        let v = (traj.sample(1.0 + 1e-4).position.x - traj.sample(1.0 - 1e-4).position.x) / 2e-4;
        assert!(v.abs() < 1e-2);
        assert!((traj.duration() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unordered_samples() {
        assert!(ReferenceTrajectory::from_waypoints(&[wp(1.0, 0.0), wp(1.0, 1.0)], 0.01).is_err());
        assert!(ReferenceTrajectory::new(vec![]).is_err());
    }

    #[test]
    fn holds_outside_range() {
        let traj = ReferenceTrajectory::from_waypoints(&[wp(0.0, 0.0), wp(1.0, 1.0)], 0.1).unwrap();
        assert_eq!(traj.sample(-1.0), traj.sample(0.0));
        assert_eq!(traj.sample(5.0).position.x, 1.0);
    }
}
