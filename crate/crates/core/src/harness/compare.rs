use std::fmt::Write;

use rayon::prelude::*;

use super::metrics::{compute_metrics, MetricsReport};
use super::rollout::{run_rollout, RolloutLog, RolloutOptions};
use super::scene::{make_scene, Scene, SceneKind};
use super::trajectory::ReferenceTrajectory;
use crate::error::Result;
use crate::ik::SolverKind;
use crate::robot::RobotModel;

/// Column order of the summary CSV (one row per run).
pub const SUMMARY_COLUMNS: [&str; 13] = [
    "scene",
    "seed",
    "solver",
    "collisions",
    "min_clearance",
    "violation_time_pct",
    "pos_err_mean",
    "ori_err_mean_deg",
    "task_jerk",
    "joint_jerk",
    "ticks",
    "held_ticks",
    "truncated",
];

/// Metric names in table order.
pub const METRIC_NAMES: [&str; 7] = [
    "collisions",
    "min_clearance",
    "violation_time_pct",
    "pos_err_mean",
    "ori_err_mean_deg",
    "task_jerk",
    "joint_jerk",
];

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scene: String,
    pub seed: u64,
    pub kind: SolverKind,
    pub metrics: MetricsReport,
    pub ticks: usize,
    pub held_ticks: usize,
    pub truncated: Option<String>,
}

impl RunSummary {
    pub fn from_log(log: &RolloutLog, reference: &ReferenceTrajectory) -> Result<Self> {
        Ok(Self {
            scene: log.scene.clone(),
            seed: log.seed,
            kind: log.kind,
            metrics: compute_metrics(log, reference)?,
            ticks: log.records.len(),
            held_ticks: log.held_ticks(),
            truncated: log.truncated.clone(),
        })
    }

    fn metric_values(&self) -> [Option<f64>; 7] {
        let m = &self.metrics;
        [
            Some(m.collisions as f64),
            m.min_clearance,
            Some(m.violation_time_pct),
            Some(m.pos_err_mean),
            Some(m.ori_err_mean),
            m.task_jerk,
            m.joint_jerk,
        ]
    }
}

/// Mean and sample standard deviation; `sd = 0` for a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stat { mean, sd })
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub scene: String,
    pub seeds: Vec<u64>,
    pub kinds: Vec<SolverKind>,
    /// Ordered by seed, then by kind.
    pub runs: Vec<RunSummary>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ComparisonTable {
    pub fn runs_of(&self, kind: SolverKind) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().filter(move |r| r.kind == kind)
    }

    /// Per-kind statistics of every metric, in `METRIC_NAMES` order.
    pub fn stats(&self, kind: SolverKind) -> [Option<Stat>; 7] {
        std::array::from_fn(|i| {
            let values: Vec<f64> = self.runs_of(kind).filter_map(|r| r.metric_values()[i]).collect();
            Stat::of(&values)
        })
    }

    pub fn mean(&self, kind: SolverKind, metric: &str) -> Option<f64> {
        let i = METRIC_NAMES.iter().position(|m| *m == metric)?;
        self.stats(kind)[i].map(|s| s.mean)
    }

    /// One row per run, columns as in `SUMMARY_COLUMNS`.
    pub fn summary_csv(&self) -> String {
        let mut out = SUMMARY_COLUMNS.join(",");
        out.push('\n');
        for r in &self.runs {
            let m = &r.metrics;
            let row = [
                csv_field(&r.scene),
                r.seed.to_string(),
                r.kind.to_string(),
                m.collisions.to_string(),
                fmt_opt(m.min_clearance),
                m.violation_time_pct.to_string(),
                m.pos_err_mean.to_string(),
                m.ori_err_mean.to_string(),
                fmt_opt(m.task_jerk),
                fmt_opt(m.joint_jerk),
                r.ticks.to_string(),
                r.held_ticks.to_string(),
                csv_field(r.truncated.as_deref().unwrap_or("")),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// `solver,<metric>_mean,<metric>_sd,…` with one row per kind.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("solver");
        for m in METRIC_NAMES {
            let _ = write!(out, ",{m}_mean,{m}_sd");
        }
        out.push('\n');
        for &k in &self.kinds {
            out.push_str(k.as_str());
            for s in self.stats(k) {
                match s {
                    Some(s) => {
                        let _ = write!(out, ",{},{}", s.mean, s.sd);
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Terminal table, one row per solver, cells `mean ± sd`.
    pub fn render(&self) -> String {
        let headers = [
            "Solver",
            "Collisions",
            "Min clear. [m]",
            "Viol. time [%]",
            "Pos. err [m]",
            "Ori. err [deg]",
            "Task jerk [m/s³]",
            "Joint jerk [rad/s³]",
        ];
        let precision = [2, 4, 2, 4, 2, 1, 1];
        let mut rows: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
        for &k in &self.kinds {
            let mut row = vec![k.to_string()];
            for (s, p) in self.stats(k).iter().zip(precision) {
                row.push(match s {
                    Some(s) => format!("{:.p$} ± {:.p$}", s.mean, s.sd),
                    None => "n/a".to_string(),
                });
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!("{} scene, {} seed(s)\n", self.scene, self.seeds.len());
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
                out.push('\n');
            }
        }
        out
    }
}

/// Runs every `(seed, kind)` pair in parallel on caller-supplied scenes
/// and joins results in seed order.
pub fn compare_scenes(
    kinds: &[SolverKind],
    model: &RobotModel,
    scenes: &[(Scene, ReferenceTrajectory)],
    opts: &RolloutOptions,
) -> Result<ComparisonTable> {
    compare_scenes_logged(kinds, model, scenes, opts).map(|(table, _)| table)
}

/// As [`compare_scenes`], also returning each run's log in table order.
pub fn compare_scenes_logged(
    kinds: &[SolverKind],
    model: &RobotModel,
    scenes: &[(Scene, ReferenceTrajectory)],
    opts: &RolloutOptions,
) -> Result<(ComparisonTable, Vec<RolloutLog>)> {
    let jobs: Vec<(usize, SolverKind)> = (0..scenes.len())
        .flat_map(|i| kinds.iter().map(move |&k| (i, k)))
        .collect();
    let (runs, logs): (Vec<_>, Vec<_>) = jobs
        .par_iter()
        .map(|&(i, k)| {
            let (scene, traj) = &scenes[i];
            let log = run_rollout(k, model, scene, traj, opts)?;
            Ok((RunSummary::from_log(&log, traj)?, log))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let table = ComparisonTable {
        scene: scenes.first().map(|(s, _)| s.name.clone()).unwrap_or_default(),
        seeds: scenes.iter().map(|(s, _)| s.seed).collect(),
        kinds: kinds.to_vec(),
        runs,
    };
    Ok((table, logs))
}

/// Runs a bundled scene for each seed and each solver kind.
pub fn batch_compare(
    kinds: &[SolverKind],
    model: &RobotModel,
    scene: SceneKind,
    seeds: &[u64],
    opts: &RolloutOptions,
) -> Result<ComparisonTable> {
    let scenes = seeds
        .iter()
        .map(|&s| make_scene(scene, s))
        .collect::<Result<Vec<_>>>()?;
    compare_scenes(kinds, model, &scenes, opts)
}
