use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use safe_ik::gradcheck::check_gradients;
use safe_ik::harness::{compare_scenes_logged, rollout_csv, run_rollout, RunConfig, RunSummary};
use safe_ik::ik::SolverKind;
use safe_ik::robot::RobotModel;
use safe_ik::teleop::{parse_script, replay, serve, SessionConfig, SessionState};

#[derive(Parser)]
#[command(name = "safe-ik", version, about = "Shared-autonomy IK rollouts, comparisons and teleop service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one seed and write the per-tick CSV.
    Rollout {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        solver: SolverKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-tick CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append measured solver time (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run every solver over seeds 0..n and print the comparison table.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "N,P,B")]
        solvers: Vec<SolverKind>,
        /// Directory for summary.csv, table.csv and one CSV per run.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Finite-difference check of every analytic gradient.
    CheckGradients {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the teleoperation session over WebSocket.
    Serve {
        #[arg(long, default_value_t = 8765)]
        port: u16,
        /// Session config TOML.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Replay a recorded client script and print the server frames.
    Replay {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Exit status when a rollout was truncated by a solver panic or error.
const TRUNCATED: u8 = 3;

fn run(command: Command) -> safe_ik::Result<ExitCode> {
    match command {
        Command::Rollout { config, solver, seed, out, timing } => {
            let cfg = RunConfig::load(&config)?;
            let model = cfg.robot_model()?;
            let (scene, traj) = cfg.build(seed)?;
            let log = run_rollout(solver, &model, &scene, &traj, &cfg.rollout_options(&model)?)?;
            write_or_print(out.as_deref(), &rollout_csv(&log, timing))?;
            let summary = RunSummary::from_log(&log, &traj)?;
            eprintln!(
                "{} seed {} {}: {} ticks, {} collisions, min clearance {:.4} m, pos err {:.4} m",
                summary.scene,
                seed,
                solver,
                summary.ticks,
                summary.metrics.collisions,
                summary.metrics.min_clearance.unwrap_or(f64::INFINITY),
                summary.metrics.pos_err_mean,
            );
            if let Some(reason) = &log.truncated {
                eprintln!("rollout truncated: {reason}");
                return Ok(ExitCode::from(TRUNCATED));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { config, seeds, solvers, out_dir } => {
            let cfg = RunConfig::load(&config)?;
            let model = cfg.robot_model()?;
            let opts = cfg.rollout_options(&model)?;
            let scenes = cfg
                .seed_list(seeds)
                .into_iter()
                .map(|s| cfg.build(s))
                .collect::<safe_ik::Result<Vec<_>>>()?;
            let (table, logs) = compare_scenes_logged(&solvers, &model, &scenes, &opts)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("summary.csv"), table.summary_csv())?;
                std::fs::write(dir.join("table.csv"), table.table_csv())?;
                for log in &logs {
                    let name = format!("{}_{}_seed{}.csv", log.scene, log.kind, log.seed);
                    std::fs::write(dir.join(name), rollout_csv(log, false))?;
                }
            } else {
                print!("{}", table.summary_csv());
                println!();
            }
            print!("{}", table.render());
            let truncated: Vec<_> = table.runs.iter().filter(|r| r.truncated.is_some()).collect();
            for r in &truncated {
                eprintln!("{} seed {} {} truncated: {}", r.scene, r.seed, r.kind, r.truncated.as_deref().unwrap_or(""));
            }
            Ok(if truncated.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(TRUNCATED) })
        }
        Command::CheckGradients { instances, seed } => {
            let checks = check_gradients(&RobotModel::bundled_arm7(), instances, seed)?;
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed()) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Serve { port, config } => {
            let session = SessionState::new(RobotModel::bundled_arm7(), session_config(config.as_deref())?)?;
            serve(port, session)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { script, steps, config } => {
            let script = parse_script(&std::fs::read_to_string(script)?)?;
            let frames = replay(RobotModel::bundled_arm7(), session_config(config.as_deref())?, &script, steps)?;
            for f in frames {
                println!("{f}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn session_config(path: Option<&Path>) -> safe_ik::Result<SessionConfig> {
    match path {
        Some(p) => SessionConfig::from_toml(&std::fs::read_to_string(p)?),
        None => Ok(SessionConfig::default()),
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> safe_ik::Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
