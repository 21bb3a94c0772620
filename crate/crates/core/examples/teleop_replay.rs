//! Scripted teleoperation: the operator drags the target through a bottle
//! with sigmoid arbitration, first under N and then under B, replayed
//! deterministically through the wire protocol.

use nalgebra::Vector3;
use safe_ik::harness::{clutter, make_scene, top_grip, SceneKind};
use safe_ik::ik::SolverKind;
use safe_ik::pose::{Pose, PoseRecord};
use safe_ik::robot::RobotModel;
use safe_ik::teleop::{decode_server, encode_client, replay, ClientMessage, ScriptLine, ServerMessage, SessionConfig};

fn script(kind: SolverKind) -> Vec<ScriptLine> {
    let (scene, _) = make_scene(SceneKind::Clutter, 0).expect("bundled scene");
    let bottle = scene.obstacles[0].base.p0;
    let mut lines = vec![ClientMessage::SetSolver { kind }];
    for k in 0..=360 {
        let y = bottle.y - 0.25 + 0.5 * k as f64 / 360.0;
        let pose = Pose::new(Vector3::new(bottle.x, y, clutter::GRASP_HEIGHT), top_grip());
        lines.push(ClientMessage::Target(PoseRecord::from(&pose)));
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, m)| ScriptLine {
            step: i.saturating_sub(1) as u64,
            frame: serde_json::from_str(&encode_client(m)).expect("encoded frame is json"),
        })
        .collect()
}

fn main() -> safe_ik::Result<()> {
    for kind in [SolverKind::N, SolverKind::B] {
        let config = SessionConfig {
            solver: kind,
            ..SessionConfig::default()
        };
        let frames = replay(RobotModel::bundled_arm7(), config, &script(kind), 540)?;
        let mut worst = f64::INFINITY;
        let mut last = None;
        for f in &frames {
            if let Ok(ServerMessage::State(u)) = decode_server(f) {
                worst = worst.min(u.phi_min.unwrap_or(f64::INFINITY));
                last = Some(u);
            }
        }
        let last = last.expect("state frames");
        println!(
            "solver {kind}: {} frames, {} collision episodes, min clearance {:+.4} m, final alpha {:.2}",
            frames.len(),
            last.episodes,
            worst,
            last.alpha
        );
    }
    Ok(())
}
