use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::rollout::RolloutLog;
use super::trajectory::ReferenceTrajectory;
use crate::error::{Error, Result};

/// Trajectory-level evaluation of one rollout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Entries into `φ_min < 0`.
    pub collisions: usize,
    /// Smallest global clearance, m; absent without obstacles.
    pub min_clearance: Option<f64>,
    /// Share of ticks with `φ_min < 0`, percent.
    pub violation_time_pct: f64,
    /// Mean end-effector position error, m.
    pub pos_err_mean: f64,
    /// Mean end-effector orientation error, degrees.
    pub ori_err_mean: f64,
    /// Mean third-difference magnitude of the ee position, m/s³.
    pub task_jerk: Option<f64>,
    /// Mean third-difference magnitude of the joint vector, rad/s³.
    pub joint_jerk: Option<f64>,
}

/// Mean norm of `(x_{k+3} − 3x_{k+2} + 3x_{k+1} − x_k) / dt³`.
pub fn mean_jerk(xs: &[DVector<f64>], dt: f64) -> Option<f64> {
    if xs.len() < 4 {
        return None;
    }
    let sum: f64 = xs
        .windows(4)
        .map(|w| (&w[3] - &w[2] * 3.0 + &w[1] * 3.0 - &w[0]).norm())
        .sum();
    Some(sum / (xs.len() - 3) as f64 / (dt * dt * dt))
}

/// Collision episodes, minimum and violation share of a `φ_min` sequence.
pub fn clearance_stats(phi_min: &[f64]) -> (usize, Option<f64>, f64) {
    if phi_min.is_empty() {
        return (0, None, 0.0);
    }
    let mut episodes = 0;
    let mut inside = false;
    let mut violated = 0;
    for &phi in phi_min {
        let now = phi < 0.0;
        if now {
            violated += 1;
            if !inside {
                episodes += 1;
            }
        }
        inside = now;
    }
    let min = phi_min.iter().copied().fold(f64::INFINITY, f64::min);
    (episodes, Some(min), 100.0 * violated as f64 / phi_min.len() as f64)
}

/// Evaluates a log against the reference it tracked. Errors are measured
/// against the reference sampled at each tick's time.
pub fn compute_metrics(log: &RolloutLog, reference: &ReferenceTrajectory) -> Result<MetricsReport> {
    if log.records.is_empty() {
        return Err(Error::invalid("log", "no ticks recorded"));
    }
    let n = log.records.len() as f64;
    let t0 = reference.start_time();
    let phis: Vec<f64> = log.records.iter().filter_map(|r| r.phi_min).collect();
    let (collisions, min_clearance, violation_time_pct) = clearance_stats(&phis);
    let mut pos = 0.0;
    let mut ori = 0.0;
    for r in &log.records {
        let want = reference.sample(t0 + r.t);
        pos += (r.ee.position - want.position).norm();
        ori += r.ee.orientation.angle_to(&want.orientation).to_degrees();
    }
    let ee: Vec<DVector<f64>> = log
        .records
        .iter()
        .map(|r| DVector::from_column_slice(r.ee.position.as_slice()))
        .collect();
    let qs: Vec<DVector<f64>> = log.records.iter().map(|r| r.q.clone()).collect();
    Ok(MetricsReport {
        collisions,
        min_clearance,
        violation_time_pct,
        pos_err_mean: pos / n,
        ori_err_mean: ori / n,
        task_jerk: mean_jerk(&ee, log.dt),
        joint_jerk: mean_jerk(&qs, log.dt),
    })
}
