//! Loads a TOML run config with a hand-built scene and compares the solvers
//! on it.
//!
//! cargo run --release --example custom_scene -- configs/custom.toml

use safe_ik::harness::{compare_scenes, RunConfig};
use safe_ik::ik::SolverKind;

fn main() -> safe_ik::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/custom.toml").to_string());
    let cfg = RunConfig::load(&path)?;
    let model = cfg.robot_model()?;
    let scenes = cfg
        .seed_list(None)
        .into_iter()
        .map(|s| cfg.build(s))
        .collect::<safe_ik::Result<Vec<_>>>()?;
    let table = compare_scenes(&[SolverKind::N, SolverKind::P, SolverKind::B], &model, &scenes, &cfg.rollout_options(&model)?)?;
    print!("{}", table.render());
    Ok(())
}
