//! Per-tick IK solvers.
//!
//! * `N` tracks the target with smoothness and self-collision terms under a
//!   manipulability constraint, ignoring the environment.
//! * `P` adds a proximity penalty over every link–obstacle pair to the
//!   objective.
//! * `B` keeps the `N` objective and adds the discrete-time barrier
//!   condition, aggregated over obstacles by log-sum-exp, as a hard
//!   inequality.

mod constraints;
mod objectives;

pub use constraints::{
    cbf_constraint, class_k, linearize_barriers, log_sum_exp, manipulability_constraint,
    BarrierLinearization, ManipulabilityValue,
};
pub use objectives::{
    penalty_objective, self_collision_objective, smoothness_objective, tracking_objective, Term,
};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{min_robot_obstacle_distance, Capsule};
use crate::pose::Pose;
use crate::robot::{forward_kinematics, JointVector, RobotModel};
use crate::sqp::{NlpProblem, SolveOptions, SolveStatus, SqpSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    N,
    P,
    B,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::N, SolverKind::P, SolverKind::B];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::N => "N",
            SolverKind::P => "P",
            SolverKind::B => "B",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" => Ok(SolverKind::N),
            "P" | "p" => Ok(SolverKind::P),
            "B" | "b" => Ok(SolverKind::B),
            other => Err(Error::UnknownSolver(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveWeights {
    pub w_track_pos: f64,
    pub w_track_ori: f64,
    pub w_vel: f64,
    pub w_acc: f64,
    pub w_jerk: f64,
    pub w_cart_vel: f64,
    pub w_selfcol: f64,
    /// `δ_self` in the self-collision term, m².
    pub self_collision_delta: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            w_track_pos: 1.0,
            w_track_ori: 0.5,
            w_vel: 1e-4,
            w_acc: 1e-8,
            w_jerk: 1e-12,
            w_cart_vel: 1e-3,
            w_selfcol: 3e-6,
            self_collision_delta: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CbfParams {
    /// Safety margin, m.
    pub epsilon: f64,
    pub gamma: f64,
    /// m⁻².
    pub beta: f64,
    pub temperature: f64,
}

impl Default for CbfParams {
    fn default() -> Self {
        Self {
            epsilon: 0.03,
            gamma: 0.4,
            beta: 40.0,
            temperature: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyParams {
    pub epsilon: f64,
    /// Regularizer in `(φ² + δ)⁻¹`, m².
    pub delta: f64,
    pub w_col: f64,
}

impl PenaltyParams {
    /// `(5ε)²`
    pub fn w_safe(&self) -> f64 {
        (5.0 * self.epsilon).powi(2)
    }
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self {
            epsilon: 0.03,
            delta: 1e-4,
            w_col: 2e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManipulabilityParams {
    pub sigma_min_threshold: f64,
    pub condition_number_cap: f64,
    /// Softmax temperature joining the two sub-terms.
    pub smoothing: f64,
}

impl Default for ManipulabilityParams {
    fn default() -> Self {
        Self {
            sigma_min_threshold: 0.02,
            condition_number_cap: 500.0,
            smoothing: 0.01,
        }
    }
}

/// Every tunable of the three solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IkParams {
    pub weights: ObjectiveWeights,
    pub cbf: CbfParams,
    pub penalty: PenaltyParams,
    pub manipulability: ManipulabilityParams,
    pub max_iterations: usize,
    pub constraint_tolerance: f64,
    pub objective_tolerance: f64,
    /// Optional per-step wall-clock budget in seconds. Makes results depend
    /// on machine speed, so it is off by default.
    pub time_budget: Option<f64>,
}

impl Default for IkParams {
    fn default() -> Self {
        Self {
            weights: ObjectiveWeights::default(),
            cbf: CbfParams::default(),
            penalty: PenaltyParams::default(),
            manipulability: ManipulabilityParams::default(),
            max_iterations: 30,
            constraint_tolerance: 1e-6,
            objective_tolerance: 1e-8,
            time_budget: None,
        }
    }
}

impl IkParams {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            max_iterations: self.max_iterations,
            constraint_tolerance: self.constraint_tolerance,
            objective_tolerance: self.objective_tolerance,
            time_budget: self.time_budget.map(Duration::from_secs_f64),
            ..SolveOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        for (name, v) in [
            ("weights.w_track_pos", w.w_track_pos),
            ("weights.w_track_ori", w.w_track_ori),
            ("weights.w_vel", w.w_vel),
            ("weights.w_acc", w.w_acc),
            ("weights.w_jerk", w.w_jerk),
            ("weights.w_cart_vel", w.w_cart_vel),
            ("weights.w_selfcol", w.w_selfcol),
            ("penalty.w_col", self.penalty.w_col),
        ] {
            if !(v >= 0.0) {
                return Err(Error::invalid(name, "weight must be nonnegative"));
            }
        }
        for (name, v) in [
            ("weights.self_collision_delta", w.self_collision_delta),
            ("cbf.epsilon", self.cbf.epsilon),
            ("cbf.gamma", self.cbf.gamma),
            ("cbf.beta", self.cbf.beta),
            ("cbf.temperature", self.cbf.temperature),
            ("penalty.epsilon", self.penalty.epsilon),
            ("penalty.delta", self.penalty.delta),
            ("manipulability.sigma_min_threshold", self.manipulability.sigma_min_threshold),
            ("manipulability.smoothing", self.manipulability.smoothing),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be strictly positive"));
            }
        }
        if !(self.manipulability.condition_number_cap > 1.0) {
            return Err(Error::invalid("manipulability.condition_number_cap", "must exceed 1"));
        }
        self.solve_options().validate()
    }
}

/// Joint configuration plus the short history used by the smoothness terms
/// and the barrier linearization.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// `[q_{t-1}, q_{t-2}, q_{t-3}]`; the first entry is the current command.
    history: [JointVector; 3],
    /// End-effector pose at the current command.
    pub last_ee: Pose,
    /// Control period, s.
    pub dt: f64,
    /// Last well-defined contact normal per obstacle, reused when witness
    /// points coincide.
    pub contact_normals: Vec<Option<Vector3<f64>>>,
    solver: SqpSolver,
}

impl SolverState {
    /// Starts at rest at `q0`: the history is padded with `q0`.
    pub fn new(model: &RobotModel, q0: JointVector, dt: f64) -> Result<Self> {
        Self::from_history(model, [q0.clone(), q0.clone(), q0], dt)
    }

    pub fn from_history(model: &RobotModel, history: [JointVector; 3], dt: f64) -> Result<Self> {
        for q in &history {
            model.check_dim(q)?;
            if !q.iter().all(|x| x.is_finite()) {
                return Err(Error::invalid("q", "joint configuration must be finite"));
            }
        }
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", "control period must be positive"));
        }
        let last_ee = forward_kinematics(model, &history[0])?.ee_pose();
        Ok(Self {
            history,
            last_ee,
            dt,
            contact_normals: Vec::new(),
            solver: SqpSolver::new(),
        })
    }

    pub fn q(&self) -> &JointVector {
        &self.history[0]
    }

    pub fn history(&self) -> [&JointVector; 3] {
        [&self.history[0], &self.history[1], &self.history[2]]
    }

    fn push(&mut self, model: &RobotModel, q_next: JointVector) -> Result<()> {
        self.last_ee = forward_kinematics(model, &q_next)?.ee_pose();
        self.history.rotate_right(1);
        self.history[0] = q_next;
        Ok(())
    }
}

/// Barrier bookkeeping for one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierStep {
    /// Obstacle with the largest aggregated term at the returned command.
    pub dominant: usize,
    /// `∇h_oᵀΔθ + K(h_o)` for the dominant obstacle; nonnegative when the
    /// discrete condition holds.
    pub dominant_margin: f64,
    /// `h_o` of the dominant obstacle at the previous configuration.
    pub dominant_h: f64,
    /// Linearized prediction `h_o + ∇h_oᵀΔθ` per obstacle.
    pub predicted_h: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_cbf: f64,
    pub degenerate_contact: bool,
}

#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    pub kind: SolverKind,
    pub status: SolveStatus,
    /// The solver result was applied. When false the previous command is
    /// held.
    pub accepted: bool,
    pub iterations: usize,
    pub objective: f64,
    pub max_violation: f64,
    pub kkt_residual: f64,
    pub manipulability: f64,
    /// Global minimum robot–obstacle distance at the new command.
    pub phi_min: Option<f64>,
    pub barrier: Option<BarrierStep>,
    pub step_time: Duration,
}

/// Runs one control tick: solves the chosen IK formulation warm-started
/// from `state.q()` and advances the state. An infeasible solve holds the
/// current command.
pub fn solve_step(
    kind: SolverKind,
    state: &mut SolverState,
    target: &Pose,
    obstacles: &[Capsule],
    model: &RobotModel,
    params: &IkParams,
) -> Result<StepDiagnostics> {
    let started = Instant::now();
    let q_prev = state.q().clone();
    model.check_dim(&q_prev)?;
    if !target.position.iter().chain(target.orientation.coords.iter()).all(|x| x.is_finite()) {
        return Err(Error::invalid("target", "pose must be finite"));
    }
    if let Some(i) = obstacles.iter().position(|o| !o.is_finite()) {
        return Err(Error::invalid(format!("obstacles[{i}]"), "capsule must be finite"));
    }

    let barrier = match kind {
        SolverKind::B => {
            linearize_barriers(model, &q_prev, obstacles, &params.cbf, &state.contact_normals)?
        }
        _ => None,
    };

    let mut solver = std::mem::take(&mut state.solver);
    let result = {
        let st: &SolverState = state;
        let weights = &params.weights;
        let penalize = kind == SolverKind::P && !obstacles.is_empty();
        let objective = move |x: &DVector<f64>| {
            let fk = forward_kinematics(model, x).expect("dimension checked");
            let (mut f, mut g) = objectives::tracking_term(&fk, target, weights);
            let (fs, gs) = objectives::smoothness_term(&fk, st, x, weights);
            f += fs;
            g += gs;
            if weights.w_selfcol > 0.0 || penalize {
                let caps = fk.link_capsules(model);
                let (fc, gc) = objectives::self_collision_term(&fk, model, &caps, weights);
                f += fc;
                g += gc;
                if penalize {
                    let (fp, gp) = objectives::penalty_term(&fk, model, &caps, obstacles, &params.penalty);
                    f += fp;
                    g += gp;
                }
            }
            (f, g)
        };
        let manip = |x: &DVector<f64>| {
            let fk = forward_kinematics(model, x).expect("dimension checked");
            let m = constraints::manipulability_term(model, x, &fk, &params.manipulability);
            (m.value, m.gradient)
        };
        let mut problem = NlpProblem::new(model.dof(), objective)
            .with_bounds(model.lower_limits(), model.upper_limits())
            .with_inequality(manip);
        if let Some(lin) = &barrier {
            problem = problem.with_inequality(|x: &DVector<f64>| lin.evaluate(x, &params.cbf));
        }
        solver.minimize(&problem, &q_prev, &params.solve_options())
    };
    state.solver = solver;

    let feasible = result.max_constraint_violation <= params.constraint_tolerance;
    let accepted = feasible
        && !matches!(result.status, SolveStatus::InfeasibleQp | SolveStatus::NonFinite);
    let q_next = if accepted { result.x_star.clone() } else { q_prev.clone() };

    let barrier_step = barrier.as_ref().map(|lin| {
        let terms = lin.terms(&q_next, &params.cbf);
        let dominant = lin.dominant(&q_next, &params.cbf);
        let dq = &q_next - &lin.q_prev;
        BarrierStep {
            dominant,
            dominant_margin: -terms[dominant],
            dominant_h: lin.h[dominant],
            predicted_h: lin.h.iter().zip(&lin.grad_h).map(|(h, g)| h + g.dot(&dq)).collect(),
            h_prev: lin.h.clone(),
            c_cbf: log_sum_exp(&terms, params.cbf.temperature).0,
            degenerate_contact: lin.degenerate.iter().any(|&d| d),
        }
    });
    if let Some(lin) = &barrier {
        state.contact_normals = lin
            .normals
            .iter()
            .zip(&lin.degenerate)
            .map(|(n, &d)| (!d).then_some(*n))
            .collect();
    }

    let fk = forward_kinematics(model, &q_next)?;
    let phi_min = min_robot_obstacle_distance(&fk.link_capsules(model), obstacles).map(|r| r.global.phi);
    let manipulability =
        constraints::manipulability_term(model, &q_next, &fk, &params.manipulability).value;
    state.push(model, q_next)?;

    Ok(StepDiagnostics {
        kind,
        status: result.status,
        accepted,
        iterations: result.iterations,
        objective: result.f_star,
        max_violation: result.max_constraint_violation,
        kkt_residual: result.kkt_residual,
        manipulability,
        phi_min,
        barrier: barrier_step,
        step_time: started.elapsed(),
    })
}
