//! Runs the teleop service on a local port and drives it with an
//! in-process WebSocket client for three seconds.
//!
//! cargo run --release --example teleop_server

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use safe_ik::harness::top_grip;
use safe_ik::ik::SolverKind;
use safe_ik::pose::{Pose, PoseRecord};
use safe_ik::robot::RobotModel;
use safe_ik::teleop::{decode_server, encode_client, ClientMessage, ServerMessage, Server, SessionConfig, SessionState};
use tungstenite::Message;

fn main() -> safe_ik::Result<()> {
    let session = SessionState::new(RobotModel::bundled_arm7(), SessionConfig::default())?;
    let server = Server::bind("127.0.0.1:0", session)?;
    let addr = server.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let handle = {
        let stop = stop.clone();
        std::thread::spawn(move || server.run(stop))
    };
    println!("serving on ws://{addr}");

    let (mut ws, _) = tungstenite::connect(format!("ws://{addr}/")).expect("connect");
    let send = |ws: &mut tungstenite::WebSocket<_>, m: &ClientMessage| ws.send(Message::text(encode_client(m))).expect("send");
    send(&mut ws, &ClientMessage::SetSolver { kind: SolverKind::B });

    let started = Instant::now();
    let mut frames = 0;
    while started.elapsed() < Duration::from_secs(3) {
        let s = started.elapsed().as_secs_f64();
        let pose = Pose::new(Vector3::new(0.5, -0.3 + 0.2 * s, 0.25), top_grip());
        send(&mut ws, &ClientMessage::Target(PoseRecord::from(&pose)));
        let Ok(Message::Text(text)) = ws.read() else { continue };
        if let Ok(ServerMessage::State(u)) = decode_server(&text) {
            frames += 1;
            if u.tick % 45 == 0 {
                println!(
                    "tick {:>4}  t {:.2}  alpha {:.2}  phi_min {:+.4}  episodes {}  {:.2} ms",
                    u.tick,
                    u.t,
                    u.alpha,
                    u.phi_min.unwrap_or(f64::NAN),
                    u.episodes,
                    u.step_ms
                );
            }
        }
    }
    println!("{frames} state frames received");
    let _ = ws.close(None);
    stop.store(true, Ordering::SeqCst);
    handle.join().expect("server thread")?;
    Ok(())
}
