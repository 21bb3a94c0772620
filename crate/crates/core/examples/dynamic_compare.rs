//! N, P and B over several seeds of the moving-obstacle scene, summarized
//! as mean ± sd per solver.
//!
//! cargo run --release --example dynamic_compare -- 5

use safe_ik::harness::{batch_compare, RolloutOptions, SceneKind};
use safe_ik::ik::SolverKind;
use safe_ik::robot::RobotModel;

fn main() -> safe_ik::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let seeds: Vec<u64> = (0..n).collect();
    let table = batch_compare(
        &[SolverKind::N, SolverKind::P, SolverKind::B],
        &RobotModel::bundled_arm7(),
        SceneKind::Dynamic,
        &seeds,
        &RolloutOptions::default(),
    )?;
    print!("{}", table.render());
    println!();
    print!("{}", table.summary_csv());
    Ok(())
}
