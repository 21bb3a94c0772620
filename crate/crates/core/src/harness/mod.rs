//! Scenes, reference trajectories, batch rollouts and metrics.

mod compare;
mod config;
mod csv;
mod metrics;
mod rollout;
mod scene;
mod trajectory;

pub use compare::{
    batch_compare, compare_scenes, compare_scenes_logged, ComparisonTable, RunSummary, Stat, METRIC_NAMES, SUMMARY_COLUMNS,
};
pub use config::{MotionConfig, ObstacleConfig, OperatorConfig, RunConfig, SceneConfig, TrajectoryConfig};
pub use csv::rollout_csv;
pub use metrics::{clearance_stats, compute_metrics, mean_jerk, MetricsReport};
pub use rollout::{
    clearances, run_rollout, settle_configuration, tick_count, OperatorScript, RolloutLog,
    RolloutOptions, TickRecord, DEFAULT_DT,
};
pub use scene::{
    clutter, dynamic, forward_grip, make_scene, obstacle_poses_at, reference_clearance, shelf,
    tool_clearance, tool_colliders, top_grip, MotionProfile, Scene, SceneKind, SceneObstacle,
    DEFAULT_SPEED_CAP, REFERENCE_PERIOD,
};
pub use trajectory::{ReferenceTrajectory, Waypoint};
