//! Declarative run configuration (TOML).
//!
//! ```toml
//! robot = "arm.toml"        # optional, relative to this file; bundled arm otherwise
//! dt = 0.011111
//! seeds = [0, 1, 2]
//!
//! [scene]
//! kind = "dynamic"          # optional when obstacles and a trajectory are given
//!
//! [[scene.obstacle]]
//! p0 = [0.4, -0.1, 0.3]
//! p1 = [0.4, 0.1, 0.3]
//! radius = 0.03
//! motion = { axis = [0.0, 0.0, 1.0], amplitude = 0.04, period = 12.0 }
//!
//! [trajectory]
//! [[trajectory.waypoint]]
//! t = 0.0
//! pos = [0.5, 0.0, 0.4]
//! quat = [1.0, 0.0, 0.0, 0.0]
//!
//! [params.cbf]
//! gamma = 0.4
//! ```

use std::path::{Path, PathBuf};

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rollout::{OperatorScript, RolloutOptions, DEFAULT_DT};
use super::scene::{make_scene, MotionProfile, Scene, SceneKind, SceneObstacle, DEFAULT_SPEED_CAP, REFERENCE_PERIOD};
use super::trajectory::{ReferenceTrajectory, Waypoint};
use crate::blend::ArbitrationParams;
use crate::error::{Error, Result};
use crate::geometry::Capsule;
use crate::ik::IkParams;
use crate::robot::{load_robot_file, RobotModel};

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_period() -> f64 {
    REFERENCE_PERIOD
}

fn default_speed_cap() -> f64 {
    DEFAULT_SPEED_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionConfig {
    pub axis: [f64; 3],
    pub amplitude: f64,
    pub period: f64,
    /// Drawn from the run seed when absent.
    pub phase: Option<f64>,
    #[serde(default = "default_speed_cap")]
    pub speed_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub p0: [f64; 3],
    pub p1: [f64; 3],
    pub radius: f64,
    pub motion: Option<MotionConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    /// Bundled scene to start from; extra obstacles are appended to it.
    pub kind: Option<SceneKind>,
    pub name: Option<String>,
    #[serde(default, rename = "obstacle")]
    pub obstacles: Vec<ObstacleConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    /// Sample spacing of the generated reference, s.
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(rename = "waypoint")]
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    #[serde(default)]
    pub arbitration: ArbitrationParams,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(rename = "waypoint")]
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub robot: Option<PathBuf>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub scene: SceneConfig,
    /// Replaces the bundled scene's reference when given.
    pub trajectory: Option<TrajectoryConfig>,
    #[serde(default)]
    pub params: IkParams,
    /// Scripted operator; when present rollouts run in shared-autonomy
    /// replay mode.
    pub operator: Option<OperatorConfig>,
    pub initial_q: Option<Vec<f64>>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            robot: None,
            dt: DEFAULT_DT,
            seeds: None,
            scene: SceneConfig::default(),
            trajectory: None,
            params: IkParams::default(),
            operator: None,
            initial_q: None,
            base_dir: PathBuf::new(),
        }
    }
}

impl RunConfig {
    /// Config for one of the bundled scenes with default parameters.
    pub fn bundled(kind: SceneKind) -> Self {
        Self {
            scene: SceneConfig {
                kind: Some(kind),
                ..SceneConfig::default()
            },
            ..Self::default()
        }
    }

    pub fn from_toml(document: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(document).map_err(|e| Error::toml(document, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", "control period must be positive"));
        }
        if self.scene.kind.is_none() && self.trajectory.is_none() {
            return Err(Error::invalid("trajectory", "required when no bundled scene kind is given"));
        }
        if matches!(&self.seeds, Some(s) if s.is_empty()) {
            return Err(Error::invalid("seeds", "must not be empty"));
        }
        for (i, o) in self.scene.obstacles.iter().enumerate() {
            if !o.p0.iter().chain(o.p1.iter()).all(|x| x.is_finite()) {
                return Err(Error::invalid(format!("scene.obstacle[{i}]"), "endpoints must be finite"));
            }
            if !(o.radius > 0.0) || !o.radius.is_finite() {
                return Err(Error::invalid(format!("scene.obstacle[{i}].radius"), "must be positive"));
            }
        }
        self.params.validate()?;
        if let Some(op) = &self.operator {
            op.arbitration.validate()?;
        }
        Ok(())
    }

    pub fn robot_model(&self) -> Result<RobotModel> {
        match &self.robot {
            Some(p) => load_robot_file(self.base_dir.join(p)),
            None => Ok(RobotModel::bundled_arm7()),
        }
    }

    /// The seed list for a batch: `0..n` when `n` is given, else the
    /// configured list, else `[0]`.
    pub fn seed_list(&self, n: Option<usize>) -> Vec<u64> {
        match (n, &self.seeds) {
            (Some(n), _) => (0..n as u64).collect(),
            (None, Some(s)) => s.clone(),
            (None, None) => vec![0],
        }
    }

    /// Scene and reference for one seed.
    pub fn build(&self, seed: u64) -> Result<(Scene, ReferenceTrajectory)> {
        let (mut scene, mut traj) = match self.scene.kind {
            Some(kind) => {
                let (s, t) = make_scene(kind, seed)?;
                (s, Some(t))
            }
            None => (Scene::new("custom", seed, Vec::new()), None),
        };
        if let Some(name) = &self.scene.name {
            scene.name = name.clone();
        }
        // separate stream from the bundled scene's own draws
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_c0f1);
        for (i, o) in self.scene.obstacles.iter().enumerate() {
            let base = Capsule::new(Vector3::from(o.p0), Vector3::from(o.p1), o.radius);
            let motion = match &o.motion {
                Some(m) => {
                    let phase = m.phase.unwrap_or_else(|| rng.random_range(0.0..std::f64::consts::TAU));
                    Some(
                        MotionProfile::new(Vector3::from(m.axis), m.amplitude, m.period, phase, m.speed_cap)
                            .map_err(|e| Error::invalid(format!("scene.obstacle[{i}].motion"), e.to_string()))?,
                    )
                }
                None => None,
            };
            scene.obstacles.push(SceneObstacle { base, motion });
        }
        if let Some(t) = &self.trajectory {
            traj = Some(ReferenceTrajectory::from_waypoints(&t.waypoints, t.period)?);
        }
        let traj = traj.ok_or_else(|| Error::invalid("trajectory", "missing"))?;
        Ok((scene, traj))
    }

    pub fn rollout_options(&self, model: &RobotModel) -> Result<RolloutOptions> {
        let operator = match &self.operator {
            Some(op) => Some(OperatorScript {
                human: ReferenceTrajectory::from_waypoints(&op.waypoints, op.period)?,
                arbitration: op.arbitration,
            }),
            None => None,
        };
        let initial_q = match &self.initial_q {
            Some(q) => {
                let q = DVector::from_column_slice(q);
                model.check_dim(&q)?;
                Some(q)
            }
            None => None,
        };
        Ok(RolloutOptions {
            dt: self.dt,
            params: self.params,
            operator,
            initial_q,
        })
    }
}
