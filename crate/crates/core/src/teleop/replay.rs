//! Deterministic replay of a recorded client message script.
//!
//! A script is JSON lines, one client frame per line, keyed by loop step:
//!
//! ```text
//! {"step": 0, "frame": {"v": 1, "type": "set_solver", "payload": {"kind": "B"}}}
//! {"step": 5, "frame": {"v": 1, "type": "target", "payload": {"pos": [0.5, 0, 0.3], "quat": [0, 1, 0, 0]}}}
//! ```
//!
//! `frame` may also be a string holding raw frame text, which is how
//! malformed frames are recorded. Each loop step applies that step's frames
//! in order, then ticks the session unless it is paused.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::protocol::{decode_client, encode_server, error_frame, ServerMessage};
use super::session::{SessionConfig, SessionState};
use crate::error::{Error, Result};
use crate::robot::RobotModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub step: u64,
    pub frame: Value,
}

impl ScriptLine {
    fn text(&self) -> String {
        match &self.frame {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>> {
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let l: ScriptLine = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: Some(i + 1),
            message: e.to_string(),
        })?;
        if lines.last().is_some_and(|p: &ScriptLine| p.step > l.step) {
            return Err(Error::Parse {
                line: Some(i + 1),
                message: "steps must be nondecreasing".into(),
            });
        }
        lines.push(l);
    }
    Ok(lines)
}

/// Runs `steps` loop steps and returns every server frame produced, in
/// order. Solver timing is forced off so the output depends only on the
/// inputs.
pub fn replay(model: RobotModel, mut config: SessionConfig, script: &[ScriptLine], steps: u64) -> Result<Vec<String>> {
    config.record_timing = false;
    let mut session = SessionState::new(model, config)?;
    let mut out = Vec::new();
    let mut next = 0;
    for step in 0..steps {
        while next < script.len() && script[next].step == step {
            let frame = match decode_client(&script[next].text()) {
                Ok(msg) => session.apply(&msg).err().map(|e| error_frame("invalid", e.to_string())),
                Err(e) => Some(ServerMessage::Error(e)),
            };
            if let Some(f) = frame {
                out.push(encode_server(&f));
            }
            next += 1;
        }
        if !session.is_paused() {
            out.push(encode_server(&ServerMessage::State(session.tick(None)?)));
        }
    }
    Ok(out)
}
