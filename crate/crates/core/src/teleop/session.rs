//! One authoritative teleoperation session: operator target in, blended
//! and filtered joint command out, one tick at a time.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::protocol::{CapsuleRecord, ClientMessage, SetAlpha, StateUpdate};
use crate::blend::{arbitration_weight, blend_pose, ArbitrationParams, BlendInput};
use crate::error::{Error, Result};
use crate::harness::{make_scene, settle_configuration, ReferenceTrajectory, Scene, SceneKind, Waypoint, DEFAULT_DT};
use crate::ik::{solve_step, IkParams, SolverKind, SolverState};
use crate::pose::{Pose, PoseRecord};
use crate::robot::{forward_kinematics, RobotModel};
use crate::geometry::min_robot_obstacle_distance;

/// Source of the autonomy reference `T_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyConfig {
    /// The scene's own reference: its trajectory, or the nearest pick on
    /// scenes that carry pick poses.
    Scene,
    Fixed { pose: PoseRecord },
    Waypoints {
        #[serde(rename = "waypoint")]
        waypoints: Vec<Waypoint>,
        #[serde(default = "default_period")]
        period: f64,
    },
    /// The pick pose closest to the operator's target (or the tool when no
    /// target has arrived yet).
    NearestPick,
}

fn default_period() -> f64 {
    DEFAULT_DT
}

#[derive(Debug, Clone)]
enum Policy {
    Fixed(Pose),
    Trajectory(ReferenceTrajectory),
    NearestPick(Vec<Pose>),
}

impl Policy {
    fn build(config: &PolicyConfig, scene: &Scene, scene_traj: &ReferenceTrajectory) -> Result<Self> {
        Ok(match config {
            PolicyConfig::Scene if !scene.pick_poses.is_empty() => Policy::NearestPick(scene.pick_poses.clone()),
            PolicyConfig::Scene => Policy::Trajectory(scene_traj.clone()),
            PolicyConfig::Fixed { pose } => Policy::Fixed((*pose).into()),
            PolicyConfig::Waypoints { waypoints, period } => {
                Policy::Trajectory(ReferenceTrajectory::from_waypoints(waypoints, *period)?)
            }
            PolicyConfig::NearestPick => {
                if scene.pick_poses.is_empty() {
                    return Err(Error::invalid("policy", "scene has no pick poses"));
                }
                Policy::NearestPick(scene.pick_poses.clone())
            }
        })
    }

    fn reference(&self, scene_time: f64, cue: &Pose) -> Pose {
        match self {
            Policy::Fixed(p) => *p,
            Policy::Trajectory(traj) => traj.sample(traj.start_time() + scene_time),
            Policy::NearestPick(picks) => *picks
                .iter()
                .min_by(|a, b| {
                    let da = (a.position - cue.position).norm();
                    let db = (b.position - cue.position).norm();
                    da.total_cmp(&db)
                })
                .expect("non-empty picks"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub scene: SceneKind,
    pub seed: u64,
    pub solver: SolverKind,
    pub dt: f64,
    pub params: IkParams,
    pub arbitration: ArbitrationParams,
    pub policy: PolicyConfig,
    /// Operator input older than this (s) is stale and the target holds.
    pub stale_after: f64,
    /// Report measured solver time; off for byte-stable replays.
    pub record_timing: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            scene: SceneKind::Clutter,
            seed: 0,
            solver: SolverKind::B,
            dt: DEFAULT_DT,
            params: IkParams::default(),
            arbitration: ArbitrationParams::default(),
            policy: PolicyConfig::Scene,
            stale_after: 0.5,
            record_timing: true,
        }
    }
}

impl SessionConfig {
    pub fn from_toml(document: &str) -> Result<Self> {
        toml::from_str(document).map_err(|e| Error::toml(document, e))
    }
}

/// Authoritative session state. Time is tick-indexed: `t = tick · dt`.
#[derive(Debug, Clone)]
pub struct SessionState {
    model: RobotModel,
    config: SessionConfig,
    scene: Scene,
    policy: Policy,
    /// Session time at which the current scene was loaded.
    scene_start: f64,
    solver_state: SolverState,
    kind: SolverKind,
    arbitration: ArbitrationParams,
    tick: u64,
    last_human: Option<(Pose, f64)>,
    last_command: Option<(Pose, f64)>,
    episodes: u64,
    in_collision: bool,
    paused: bool,
}

impl SessionState {
    pub fn new(model: RobotModel, config: SessionConfig) -> Result<Self> {
        if !(config.dt > 0.0) {
            return Err(Error::invalid("dt", "control period must be positive"));
        }
        if !(config.stale_after > 0.0) {
            return Err(Error::invalid("stale_after", "must be positive"));
        }
        config.params.validate()?;
        config.arbitration.validate()?;
        let (scene, traj) = make_scene(config.scene, config.seed)?;
        let policy = Policy::build(&config.policy, &scene, &traj)?;
        let home = forward_kinematics(&model, &model.home_configuration())?.ee_pose();
        let start = policy.reference(0.0, &home);
        let q0 = settle_configuration(&model, &start, &config.params)?;
        let solver_state = SolverState::new(&model, q0, config.dt)?;
        Ok(Self {
            kind: config.solver,
            arbitration: config.arbitration,
            model,
            scene,
            policy,
            scene_start: 0.0,
            solver_state,
            tick: 0,
            last_human: None,
            last_command: None,
            episodes: 0,
            in_collision: false,
            paused: false,
            config,
        })
    }

    pub fn tick_index(&self) -> u64 {
        self.tick
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.config.dt
    }

    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    pub fn solver(&self) -> SolverKind {
        self.kind
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn model(&self) -> &RobotModel {
        &self.model
    }

    /// Swaps in a caller-built scene; its clock starts at the current time.
    pub fn replace_scene(&mut self, scene: Scene, traj: &ReferenceTrajectory) -> Result<()> {
        self.policy = Policy::build(&self.config.policy, &scene, traj)?;
        self.scene = scene;
        self.scene_start = self.time();
        self.in_collision = false;
        Ok(())
    }

    /// Applies a control message. Targets are stamped with the current
    /// session time and used from the next tick on.
    pub fn apply(&mut self, msg: &ClientMessage) -> Result<()> {
        match msg {
            ClientMessage::Target(p) => self.last_human = Some(((*p).into(), self.time())),
            ClientMessage::SetSolver { kind } => self.kind = *kind,
            ClientMessage::SetAlpha(a) => self.arbitration = alpha_params(&self.arbitration, a)?,
            ClientMessage::SetScene { kind, seed } => {
                let (scene, traj) = make_scene(*kind, *seed)?;
                self.replace_scene(scene, &traj)?;
            }
            ClientMessage::Pause => self.paused = true,
            ClientMessage::Resume => self.paused = false,
        }
        Ok(())
    }

    /// Advances one tick. `human` is the operator target for this tick if
    /// one arrived; otherwise the last one is reused until it goes stale,
    /// after which the previous command is held.
    pub fn tick(&mut self, human: Option<Pose>) -> Result<StateUpdate> {
        if let Some(h) = human {
            self.last_human = Some((h, self.time()));
        }
        self.tick += 1;
        let t = self.time();
        let scene_t = t - self.scene_start;
        let obstacles = self.scene.obstacles_at(scene_t);
        let ee_now = forward_kinematics(&self.model, self.solver_state.q())?.ee_pose();

        let stale = matches!(self.last_human, Some((_, at)) if t - at > self.config.stale_after + 1e-12);
        let (target, alpha) = match (&self.last_human, self.last_command) {
            (Some(_), Some(held)) if stale => held,
            (Some((h, _)), _) => {
                let reference = self.policy.reference(scene_t, h);
                let alpha = arbitration_weight(&h.position, &reference.position, &self.arbitration);
                let blended = blend_pose(&BlendInput { human: *h, reference }, alpha);
                (blended, alpha)
            }
            (None, _) => (self.policy.reference(scene_t, &ee_now), 1.0),
        };
        self.last_command = Some((target, alpha));

        let diag = solve_step(self.kind, &mut self.solver_state, &target, &obstacles, &self.model, &self.config.params)?;
        let q = self.solver_state.q().clone();
        let fk = forward_kinematics(&self.model, &q)?;
        let links = fk.link_capsules(&self.model);
        let (phi_min, phi) = match min_robot_obstacle_distance(&links, &obstacles) {
            Some(r) => (Some(r.global.phi), r.per_obstacle.iter().map(|w| w.phi).collect()),
            None => (None, Vec::new()),
        };
        let colliding = phi_min.is_some_and(|p| p < 0.0);
        if colliding && !self.in_collision {
            self.episodes += 1;
        }
        self.in_collision = colliding;

        Ok(StateUpdate {
            tick: self.tick,
            t,
            q: q.iter().copied().collect(),
            ee: PoseRecord::from(&fk.ee_pose()),
            target: PoseRecord::from(&target),
            alpha,
            phi,
            phi_min,
            solver: self.kind,
            status: diag.status.as_str().to_string(),
            accepted: diag.accepted,
            stale_input: stale,
            paused: self.paused,
            episodes: self.episodes,
            step_ms: if self.config.record_timing { millis(diag.step_time) } else { 0.0 },
            obstacles: obstacles.iter().map(CapsuleRecord::from).collect(),
            links: links.iter().map(CapsuleRecord::from).collect(),
        })
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn alpha_params(current: &ArbitrationParams, msg: &SetAlpha) -> Result<ArbitrationParams> {
    let mut next = *current;
    next.mode = msg.mode;
    if let Some(v) = msg.value {
        next.fixed_alpha = v;
    }
    if let Some(p) = msg.p {
        next.p = p;
    }
    if let Some(s) = msg.s {
        next.s = s;
    }
    if let Some(b) = msg.b {
        next.b = b;
    }
    next.validate()?;
    Ok(next)
}
