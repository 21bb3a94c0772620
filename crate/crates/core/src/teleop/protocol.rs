//! Wire protocol: UTF-8 JSON frames with envelope `{v: 1, type, payload}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::blend::ArbitrationMode;
use crate::geometry::Capsule;
use crate::harness::SceneKind;
use crate::ik::SolverKind;
use crate::pose::PoseRecord;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetAlpha {
    pub mode: ArbitrationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClientMessage {
    Target(PoseRecord),
    SetSolver { kind: SolverKind },
    SetAlpha(SetAlpha),
    SetScene { kind: SceneKind, seed: u64 },
    Pause,
    Resume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapsuleRecord {
    pub p0: [f64; 3],
    pub p1: [f64; 3],
    pub r: f64,
}

impl From<&Capsule> for CapsuleRecord {
    fn from(c: &Capsule) -> Self {
        Self {
            p0: c.p0.into(),
            p1: c.p1.into(),
            r: c.radius,
        }
    }
}

/// Per-tick session snapshot broadcast to every client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateUpdate {
    pub tick: u64,
    pub t: f64,
    pub q: Vec<f64>,
    pub ee: PoseRecord,
    /// Blended command handed to the solver.
    pub target: PoseRecord,
    pub alpha: f64,
    pub phi: Vec<f64>,
    pub phi_min: Option<f64>,
    pub solver: SolverKind,
    pub status: String,
    /// False when the solver result was rejected and the pose held.
    pub accepted: bool,
    /// Operator input older than the stale limit; the target is frozen.
    pub stale_input: bool,
    pub paused: bool,
    pub episodes: u64,
    pub step_ms: f64,
    pub obstacles: Vec<CapsuleRecord>,
    pub links: Vec<CapsuleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorFrame {
    pub code: String,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ServerMessage {
    State(StateUpdate),
    Error(ErrorFrame),
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    v: u32,
    #[serde(flatten)]
    body: T,
}

pub fn encode_client(msg: &ClientMessage) -> String {
    serde_json::to_string(&Envelope {
        v: PROTOCOL_VERSION,
        body: msg,
    })
    .expect("client message serializes")
}

pub fn encode_server(msg: &ServerMessage) -> String {
    serde_json::to_string(&Envelope {
        v: PROTOCOL_VERSION,
        body: msg,
    })
    .expect("server message serializes")
}

pub fn error_frame(code: &str, msg: impl Into<String>) -> ServerMessage {
    ServerMessage::Error(ErrorFrame {
        code: code.to_string(),
        msg: msg.into(),
    })
}

/// Parses and validates a client frame. Failures come back as the error
/// frame to send: `malformed`, `version` or `invalid`.
pub fn decode_client(text: &str) -> Result<ClientMessage, ErrorFrame> {
    let err = |code: &str, msg: String| ErrorFrame {
        code: code.to_string(),
        msg,
    };
    let value: Value = serde_json::from_str(text).map_err(|e| err("malformed", e.to_string()))?;
    match value.get("v").and_then(Value::as_u64) {
        Some(v) if v == PROTOCOL_VERSION as u64 => {}
        Some(v) => return Err(err("version", format!("unsupported protocol version {v}, expected {PROTOCOL_VERSION}"))),
        None => return Err(err("malformed", "missing protocol version `v`".to_string())),
    }
    let env: Envelope<ClientMessage> = serde_json::from_value(value).map_err(|e| err("malformed", e.to_string()))?;
    validate(&env.body).map_err(|m| err("invalid", m))?;
    Ok(env.body)
}

fn validate(msg: &ClientMessage) -> Result<(), String> {
    match msg {
        ClientMessage::Target(p) => {
            if !p.pos.iter().chain(&p.quat).all(|x| x.is_finite()) {
                return Err("target has non-finite values".into());
            }
            let n = p.quat.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n > 1e-9) {
                return Err("target quaternion has zero norm".into());
            }
        }
        ClientMessage::SetAlpha(a) => {
            if [a.value, a.p, a.s, a.b].iter().flatten().any(|x| !x.is_finite()) {
                return Err("set_alpha has non-finite values".into());
            }
        }
        _ => {}
    }
    Ok(())
}

pub fn decode_server(text: &str) -> Result<ServerMessage, serde_json::Error> {
    let env: Envelope<ServerMessage> = serde_json::from_str(text)?;
    Ok(env.body)
}
