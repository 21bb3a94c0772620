//! Full rollout of one solver on the shelf scene, printing metrics and
//! optionally writing the per-tick CSV.
//!
//! cargo run --release --example shelf_rollout -- B 3 /tmp/shelf.csv

use safe_ik::harness::{compute_metrics, make_scene, reference_clearance, rollout_csv, run_rollout, RolloutOptions, SceneKind};
use safe_ik::ik::SolverKind;
use safe_ik::robot::RobotModel;

fn main() -> safe_ik::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: SolverKind = args.next().as_deref().unwrap_or("B").parse()?;
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next();

    let model = RobotModel::bundled_arm7();
    let (scene, traj) = make_scene(SceneKind::Shelf, seed)?;
    println!("reference clearance of the tool: {:+.3} m", reference_clearance(&model, &scene, &traj));
    let log = run_rollout(kind, &model, &scene, &traj, &RolloutOptions::default())?;
    let m = compute_metrics(&log, &traj)?;
    println!("solver {kind} seed {seed}: {} ticks, {} held", log.records.len(), log.held_ticks());
    println!("  collisions        {}", m.collisions);
    println!("  min clearance     {:+.4} m", m.min_clearance.unwrap_or(f64::NAN));
    println!("  violation time    {:.2} %", m.violation_time_pct);
    println!("  position error    {:.4} m", m.pos_err_mean);
    println!("  orientation error {:.2} deg", m.ori_err_mean);
    if let Some(path) = out {
        std::fs::write(&path, rollout_csv(&log, false))?;
        println!("wrote {path}");
    }
    Ok(())
}
