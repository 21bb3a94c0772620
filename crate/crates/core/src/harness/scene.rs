use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Unit, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::{ReferenceTrajectory, Waypoint};
use crate::error::{Error, Result};
use crate::geometry::{capsule_signed_distance, Capsule};
use crate::pose::Pose;
use crate::robot::RobotModel;

/// Default obstacle speed limit, m/s.
pub const DEFAULT_SPEED_CAP: f64 = 0.025;

/// Sampling period of generated reference trajectories, s.
pub const REFERENCE_PERIOD: f64 = 1.0 / 90.0;

/// Sinusoidal translation `axis · amplitude · sin(2πt/period + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionProfile {
    axis: Unit<Vector3<f64>>,
    amplitude: f64,
    period: f64,
    phase: f64,
    speed_cap: f64,
}

impl MotionProfile {
    pub fn new(axis: Vector3<f64>, amplitude: f64, period: f64, phase: f64, speed_cap: f64) -> Result<Self> {
        let axis = Unit::try_new(axis, 1e-12).ok_or_else(|| Error::invalid("motion.axis", "zero axis"))?;
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid("motion.amplitude", "must be finite and nonnegative"));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::invalid("motion.period", "must be positive"));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("motion.phase", "must be finite"));
        }
        let peak = TAU * amplitude / period;
        if peak > speed_cap {
            return Err(Error::invalid(
                "motion",
                format!("peak speed {peak:.4} m/s exceeds the cap of {speed_cap} m/s"),
            ));
        }
        Ok(Self {
            axis,
            amplitude,
            period,
            phase,
            speed_cap,
        })
    }

    pub fn axis(&self) -> &Vector3<f64> {
        self.axis.as_ref()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn speed_cap(&self) -> f64 {
        self.speed_cap
    }

    pub fn peak_speed(&self) -> f64 {
        TAU * self.amplitude / self.period
    }

    pub fn offset_at(&self, t: f64) -> Vector3<f64> {
        self.axis.as_ref() * (self.amplitude * (TAU * t / self.period + self.phase).sin())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObstacle {
    pub base: Capsule,
    pub motion: Option<MotionProfile>,
}

impl SceneObstacle {
    pub fn fixed(base: Capsule) -> Self {
        Self { base, motion: None }
    }

    pub fn at(&self, t: f64) -> Capsule {
        match &self.motion {
            Some(m) => self.base.translated(&m.offset_at(t)),
            None => self.base,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub seed: u64,
    pub obstacles: Vec<SceneObstacle>,
    /// Candidate grasp poses for the teleop reference policy.
    pub pick_poses: Vec<Pose>,
    pub basket: Option<Pose>,
}

impl Scene {
    pub fn new(name: impl Into<String>, seed: u64, obstacles: Vec<SceneObstacle>) -> Self {
        Self {
            name: name.into(),
            seed,
            obstacles,
            pick_poses: Vec::new(),
            basket: None,
        }
    }

    /// Same scene with every obstacle removed.
    pub fn without_obstacles(&self) -> Self {
        Self {
            obstacles: Vec::new(),
            ..self.clone()
        }
    }

    pub fn obstacles_at(&self, t: f64) -> Vec<Capsule> {
        self.obstacles.iter().map(|o| o.at(t)).collect()
    }
}

/// World capsules of every obstacle at time `t`.
pub fn obstacle_poses_at(scene: &Scene, t: f64) -> Vec<Capsule> {
    scene.obstacles_at(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    Dynamic,
    Shelf,
    Clutter,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [SceneKind::Dynamic, SceneKind::Shelf, SceneKind::Clutter];

    pub fn as_str(self) -> &'static str {
        match self {
            SceneKind::Dynamic => "dynamic",
            SceneKind::Shelf => "shelf",
            SceneKind::Clutter => "clutter",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(SceneKind::Dynamic),
            "shelf" => Ok(SceneKind::Shelf),
            "clutter" => Ok(SceneKind::Clutter),
            other => Err(Error::UnknownScene(other.to_string())),
        }
    }
}

/// Builds one of the bundled scenes for the bundled arm. The seed sets
/// obstacle phases (dynamic), grazing depths (shelf) and object jitter
/// (clutter).
pub fn make_scene(kind: SceneKind, seed: u64) -> Result<(Scene, ReferenceTrajectory)> {
    let model = RobotModel::bundled_arm7();
    match kind {
        SceneKind::Dynamic => dynamic_scene(seed),
        SceneKind::Shelf => shelf_scene(&model, seed),
        SceneKind::Clutter => clutter_scene(seed),
    }
}

/// Orientation with the tool axis pointing along world +x.
pub fn forward_grip() -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), FRAC_PI_2)
}

/// Orientation with the tool axis pointing down.
pub fn top_grip() -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), PI)
}

pub mod dynamic {
    //! Dimensions of the moving-obstacle scene. The obstacles crowd the
    //! elbow and forearm, which a redundant arm can move without
    //! disturbing the tool.
    pub const DURATION: f64 = 20.0;
    pub const CENTER: [f64; 3] = [0.56, 0.0, 0.46];
    pub const AMPLITUDE: f64 = 0.06;
    /// Periods are drawn from `[MIN_PERIOD, 1.3 · MIN_PERIOD)`; the
    /// minimum keeps the peak speed under the cap.
    pub const MIN_PERIOD: f64 = 15.2;
    pub const RAMP: f64 = 2.0;
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn dynamic_scene(seed: u64) -> Result<(Scene, ReferenceTrajectory)> {
    use dynamic::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each obstacle starts displaced away from the arm (positive offset
    // along its axis) and swings in later; the phase and period vary per seed.
    let mut moving = |base: Capsule, axis: Vector3<f64>| -> Result<SceneObstacle> {
        let period = MIN_PERIOD * rng.random_range(1.0..1.3);
        let phase = FRAC_PI_4 + rng.random_range(0.0..FRAC_PI_2);
        Ok(SceneObstacle {
            base,
            motion: Some(MotionProfile::new(axis, AMPLITUDE, period, phase, DEFAULT_SPEED_CAP)?),
        })
    };
    let obstacles = vec![
        // ball beside the elbow, left–right
        moving(Capsule::sphere(Vector3::new(0.0, 0.12, 0.68), 0.05), Vector3::y())?,
        // bar above the elbow, up–down
        moving(
            Capsule::new(Vector3::new(0.05, -0.15, 0.77), Vector3::new(0.05, 0.15, 0.77), 0.04),
            Vector3::z(),
        )?,
        // bar over the forearm, front–back
        moving(
            Capsule::new(Vector3::new(0.22, -0.15, 0.63), Vector3::new(0.22, 0.15, 0.63), 0.03),
            Vector3::x(),
        )?,
    ];
    let scene = Scene::new("dynamic", seed, obstacles);

    let center = Vector3::from(CENTER);
    let base = forward_grip();
    let traj = ReferenceTrajectory::from_fn(DURATION, REFERENCE_PERIOD, |t| {
        let ramp = smoothstep(t / RAMP);
        let w = |period: f64, phase: f64| (TAU * t / period + phase).sin() * ramp;
        let offset = Vector3::new(0.03 * w(9.0, 0.0), 0.05 * w(7.0, 1.0), 0.03 * w(11.0, 2.0));
        let sweep = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 0.6 * w(8.0, 0.0))
            * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 0.25 * w(10.0, 0.7))
            * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), 0.25 * w(12.0, 1.9));
        Pose::new(center + offset, base * sweep)
    })?;
    Ok((scene, traj))
}

pub mod shelf {
    //! Dimensions of the frame scene: a vertical frame in the plane
    //! `x = PLANE_X` split into four side-by-side windows.
    pub const PLANE_X: f64 = 0.52;
    pub const BAR_RADIUS: f64 = 0.02;
    pub const BAR_Y: [f64; 5] = [-0.44, -0.22, 0.0, 0.22, 0.44];
    pub const BOTTOM_Z: f64 = 0.22;
    pub const TOP_Z: f64 = 0.70;
    /// Tool x before and beyond the frame.
    pub const APPROACH_X: f64 = 0.40;
    pub const THROUGH_X: f64 = 0.66;
    pub const WINDOW_Z: f64 = 0.46;
    /// Deepest designed penetration of the raw reference, m.
    pub const MAX_GRAZE: f64 = 0.01;
    pub const MIN_GRAZE: f64 = 0.004;
    /// Roll of the tool about its axis per window; near π/2 the fingers
    /// stand vertical and fit the window width.
    pub const ROLL: [f64; 4] = [1.57, 1.92, 1.22, 1.77];
    /// Side of the window grazed: +1 toward +y.
    pub const SIDE: [f64; 4] = [1.0, -1.0, 1.0, -1.0];
}

/// Colliders of the last link expressed in the tool frame.
pub fn tool_colliders(model: &RobotModel) -> Vec<Capsule> {
    let last = model.dof() - 1;
    let inv = model.ee_offset.isometry().inverse();
    model
        .colliders
        .iter()
        .filter(|c| c.link_index == last)
        .map(|c| Capsule::new(c.local_segment[0], c.local_segment[1], c.radius).transformed(&inv))
        .collect()
}

/// Minimum signed distance between the tool colliders placed at `pose`
/// and the obstacles at time `t`.
pub fn tool_clearance(model: &RobotModel, scene: &Scene, pose: &Pose, t: f64) -> f64 {
    let iso = pose.isometry();
    let obstacles = scene.obstacles_at(t);
    tool_colliders(model)
        .iter()
        .map(|c| c.transformed(&iso))
        .flat_map(|c| obstacles.iter().map(move |o| capsule_signed_distance(&c, o).phi))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum tool clearance of the raw reference over all its samples.
pub fn reference_clearance(model: &RobotModel, scene: &Scene, traj: &ReferenceTrajectory) -> f64 {
    traj.samples()
        .iter()
        .map(|(t, p)| tool_clearance(model, scene, p, *t))
        .fold(f64::INFINITY, f64::min)
}

fn shelf_obstacles() -> Vec<SceneObstacle> {
    use shelf::*;
    let r = BAR_RADIUS;
    let mut obstacles: Vec<SceneObstacle> = BAR_Y
        .iter()
        .map(|&y| {
            SceneObstacle::fixed(Capsule::new(
                Vector3::new(PLANE_X, y, BOTTOM_Z),
                Vector3::new(PLANE_X, y, TOP_Z),
                r,
            ))
        })
        .collect();
    for z in [BOTTOM_Z, TOP_Z] {
        obstacles.push(SceneObstacle::fixed(Capsule::new(
            Vector3::new(PLANE_X, BAR_Y[0], z),
            Vector3::new(PLANE_X, BAR_Y[4], z),
            r,
        )));
    }
    obstacles
}

fn shelf_scene(model: &RobotModel, seed: u64) -> Result<(Scene, ReferenceTrajectory)> {
    use shelf::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = Scene::new("shelf", seed, shelf_obstacles());

    let mut waypoints = Vec::new();
    let mut t = 0.0;
    let mut push = |dt: f64, pos: Vector3<f64>, rot: UnitQuaternion<f64>| {
        t += dt;
        waypoints.push(Waypoint::new(t, &Pose::new(pos, rot)));
    };
    let start_y = 0.5 * (BAR_Y[0] + BAR_Y[1]);
    push(0.0, Vector3::new(APPROACH_X, start_y, WINDOW_Z), forward_grip());
    push(1.0, Vector3::new(APPROACH_X, start_y, WINDOW_Z), forward_grip());
    for w in 0..4 {
        let center_y = 0.5 * (BAR_Y[w] + BAR_Y[w + 1]);
        let rot = forward_grip() * UnitQuaternion::from_axis_angle(&Vector3::z_axis(), ROLL[w]);
        let depth = rng.random_range(MIN_GRAZE..MAX_GRAZE);
        let through = |y: f64| Vector3::new(THROUGH_X, y, WINDOW_Z);
        // lateral offset making the tool penetrate the bar by `depth`
        let graze_y = {
            let clearance = |off: f64| {
                tool_clearance(model, &scene, &Pose::new(through(center_y + SIDE[w] * off), rot), 0.0)
            };
            let (mut lo, mut hi) = (0.0, 0.5 * (BAR_Y[1] - BAR_Y[0]));
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if clearance(mid) > -depth {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            center_y + SIDE[w] * 0.5 * (lo + hi)
        };
        push(2.0, Vector3::new(APPROACH_X, center_y, WINDOW_Z), rot);
        push(2.5, through(center_y), rot);
        push(1.0, through(graze_y), rot);
        push(1.5, through(graze_y), rot);
        push(1.0, through(center_y), rot);
        push(2.5, Vector3::new(APPROACH_X, center_y, WINDOW_Z), rot);
    }
    let traj = ReferenceTrajectory::from_waypoints(&waypoints, REFERENCE_PERIOD)?;
    Ok((scene, traj))
}

pub mod clutter {
    //! Dimensions of the tabletop teleop scene.
    pub const TABLE_Z: f64 = 0.10;
    pub const PICKS: [[f64; 2]; 3] = [[0.55, -0.20], [0.62, 0.05], [0.50, 0.25]];
    pub const BASKET: [f64; 3] = [0.15, -0.50, 0.35];
    pub const GRASP_HEIGHT: f64 = 0.22;
    pub const DURATION: f64 = 30.0;
}

fn clutter_scene(seed: u64) -> Result<(Scene, ReferenceTrajectory)> {
    use clutter::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |s: f64| rng.random_range(-s..s);
    let mut obstacles = Vec::new();
    // bottles between and around the pick locations
    for [x, y] in [[0.45, -0.05], [0.60, -0.35], [0.70, 0.20], [0.42, 0.12], [0.58, 0.42]] {
        let (x, y) = (x + jitter(0.02), y + jitter(0.02));
        obstacles.push(SceneObstacle::fixed(Capsule::new(
            Vector3::new(x, y, TABLE_Z),
            Vector3::new(x, y, TABLE_Z + 0.22),
            0.035,
        )));
    }
    // basket rim
    let b = Vector3::from(BASKET);
    obstacles.push(SceneObstacle::fixed(Capsule::new(
        b + Vector3::new(-0.1, 0.12, -0.1),
        b + Vector3::new(0.1, 0.12, -0.1),
        0.02,
    )));
    let mut scene = Scene::new("clutter", seed, obstacles);
    scene.pick_poses = PICKS
        .iter()
        .map(|&[x, y]| Pose::new(Vector3::new(x, y, GRASP_HEIGHT), top_grip()))
        .collect();
    scene.basket = Some(Pose::new(b, top_grip()));

    // autonomy reference: visit each pick pose, then the basket
    let home = Pose::new(Vector3::new(0.45, 0.0, 0.45), top_grip());
    let mut waypoints = vec![Waypoint::new(0.0, &home)];
    let mut t = 0.0;
    for pick in &scene.pick_poses {
        let above = Pose::new(pick.position + Vector3::new(0.0, 0.0, 0.15), pick.orientation);
        for (dt, p) in [(3.0, above), (1.5, *pick), (1.5, above), (3.5, scene.basket.unwrap())] {
            t += dt;
            waypoints.push(Waypoint::new(t, &p));
        }
    }
    let traj = ReferenceTrajectory::from_waypoints(&waypoints, REFERENCE_PERIOD)?;
    Ok((scene, traj))
}
