use std::panic::{catch_unwind, AssertUnwindSafe};

use super::scene::Scene;
use super::trajectory::ReferenceTrajectory;
use crate::blend::{arbitration_weight, blend_pose, ArbitrationParams, BlendInput};
use crate::error::{Error, Result};
use crate::geometry::min_robot_obstacle_distance;
use crate::ik::{solve_step, BarrierStep, IkParams, SolverKind, SolverState};
use crate::pose::Pose;
use crate::robot::{forward_kinematics, link_capsules_world, JointVector, RobotModel};
use crate::sqp::SolveStatus;

/// Default control period, s.
pub const DEFAULT_DT: f64 = 1.0 / 90.0;

/// Scripted operator input for shared-autonomy replay.
#[derive(Debug, Clone)]
pub struct OperatorScript {
    pub human: ReferenceTrajectory,
    pub arbitration: ArbitrationParams,
}

#[derive(Debug, Clone)]
pub struct RolloutOptions {
    pub dt: f64,
    pub params: IkParams,
    /// When set, the target is the blend of the scripted operator pose with
    /// the reference; otherwise the reference is tracked directly.
    pub operator: Option<OperatorScript>,
    /// Start configuration; settled onto the first reference pose if unset.
    pub initial_q: Option<JointVector>,
}

impl Default for RolloutOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            params: IkParams::default(),
            operator: None,
            initial_q: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TickRecord {
    pub tick: usize,
    pub t: f64,
    pub q: JointVector,
    pub ee: Pose,
    pub target: Pose,
    /// Global minimum robot–obstacle distance, recomputed from `q`.
    pub phi_min: Option<f64>,
    /// Per-obstacle minimum distance, recomputed from `q`.
    pub phi: Vec<f64>,
    pub alpha: f64,
    pub status: SolveStatus,
    pub accepted: bool,
    pub iterations: usize,
    /// Solver wall time, s.
    pub step_time: f64,
    pub barrier: Option<BarrierStep>,
}

#[derive(Debug, Clone)]
pub struct RolloutLog {
    pub kind: SolverKind,
    pub scene: String,
    pub seed: u64,
    pub dt: f64,
    pub initial_q: JointVector,
    pub records: Vec<TickRecord>,
    /// Set when the rollout stopped early; holds the reason.
    pub truncated: Option<String>,
}

impl RolloutLog {
    pub fn held_ticks(&self) -> usize {
        self.records.iter().filter(|r| !r.accepted).count()
    }
}

/// Number of control ticks covering `duration` at period `dt`.
pub fn tick_count(duration: f64, dt: f64) -> usize {
    (duration / dt).round() as usize
}

/// Converges N onto `target` without obstacles, starting from the model's
/// home configuration.
pub fn settle_configuration(model: &RobotModel, target: &Pose, params: &IkParams) -> Result<JointVector> {
    let mut q = model.home_configuration();
    for _ in 0..200 {
        let mut state = SolverState::new(model, q.clone(), DEFAULT_DT)?;
        solve_step(SolverKind::N, &mut state, target, &[], model, params)?;
        let moved = (state.q() - &q).amax();
        q = state.q().clone();
        if moved < 1e-10 {
            break;
        }
    }
    Ok(q)
}

/// Minimum distances of the arm at `q` to `obstacles`, from scratch.
pub fn clearances(model: &RobotModel, q: &JointVector, obstacles: &[crate::geometry::Capsule]) -> Result<(Option<f64>, Vec<f64>)> {
    let caps = link_capsules_world(model, q)?;
    Ok(match min_robot_obstacle_distance(&caps, obstacles) {
        Some(r) => (Some(r.global.phi), r.per_obstacle.iter().map(|w| w.phi).collect()),
        None => (None, Vec::new()),
    })
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "solver panicked".to_string()
    }
}

/// Runs one solver over the whole reference. A solver error or panic
/// truncates the log and records the reason.
pub fn run_rollout(
    kind: SolverKind,
    model: &RobotModel,
    scene: &Scene,
    traj: &ReferenceTrajectory,
    opts: &RolloutOptions,
) -> Result<RolloutLog> {
    opts.params.validate()?;
    if !(opts.dt > 0.0) {
        return Err(Error::invalid("dt", "control period must be positive"));
    }
    if let Some(op) = &opts.operator {
        op.arbitration.validate()?;
    }
    let t0 = traj.start_time();
    let q0 = match &opts.initial_q {
        Some(q) => {
            model.check_dim(q)?;
            q.clone()
        }
        None => settle_configuration(model, &traj.sample(t0), &opts.params)?,
    };
    let mut state = SolverState::new(model, q0.clone(), opts.dt)?;
    let ticks = tick_count(traj.duration(), opts.dt);
    let mut log = RolloutLog {
        kind,
        scene: scene.name.clone(),
        seed: scene.seed,
        dt: opts.dt,
        initial_q: q0,
        records: Vec::with_capacity(ticks),
        truncated: None,
    };

    for tick in 0..ticks {
        let t = (tick + 1) as f64 * opts.dt;
        let obstacles = scene.obstacles_at(t);
        let reference = traj.sample(t0 + t);
        let (target, alpha) = match &opts.operator {
            Some(op) => {
                let human = op.human.sample(t0 + t);
                let alpha = arbitration_weight(&human.position, &reference.position, &op.arbitration);
                (blend_pose(&BlendInput { human, reference }, alpha), alpha)
            }
            None => (reference, 1.0),
        };
        let step = catch_unwind(AssertUnwindSafe(|| {
            solve_step(kind, &mut state, &target, &obstacles, model, &opts.params)
        }));
        let diag = match step {
            Ok(Ok(d)) => d,
            Ok(Err(e)) => {
                log.truncated = Some(format!("tick {tick}: {e}"));
                break;
            }
            Err(payload) => {
                log.truncated = Some(format!("tick {tick}: panic: {}", panic_message(payload)));
                break;
            }
        };
        let q = state.q().clone();
        let fk = forward_kinematics(model, &q)?;
        let (phi_min, phi) = clearances(model, &q, &obstacles)?;
        log.records.push(TickRecord {
            tick,
            t,
            q,
            ee: fk.ee_pose(),
            target,
            phi_min,
            phi,
            alpha,
            status: diag.status,
            accepted: diag.accepted,
            iterations: diag.iterations,
            step_time: diag.step_time.as_secs_f64(),
            barrier: diag.barrier,
        });
    }
    Ok(log)
}

