//! Teleoperation service: session loop, wire protocol, replay and server.

mod protocol;
mod replay;
mod server;
mod session;

pub use protocol::{
    decode_client, decode_server, encode_client, encode_server, error_frame, CapsuleRecord, ClientMessage,
    ErrorFrame, ServerMessage, SetAlpha, StateUpdate, PROTOCOL_VERSION,
};
pub use replay::{parse_script, replay, ScriptLine};
pub use server::{serve, Role, Server, QUEUE_DEPTH};
pub use session::{PolicyConfig, SessionConfig, SessionState};
