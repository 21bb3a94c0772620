//! WebSocket endpoint around one [`SessionState`].
//!
//! The first client to connect holds control; later clients, and any
//! client connecting on `/observe`, are observers whose frames are
//! rejected. Control messages are applied at the next tick boundary in
//! arrival order. While no control client is connected, or the session is
//! paused, the clock does not advance.

use std::collections::BTreeMap;
use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, Sender, SyncSender, TrySendError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use tungstenite::handshake::server::{Request, Response};
use tungstenite::{Message, WebSocket};

use super::protocol::{decode_client, encode_server, error_frame, ServerMessage};
use super::session::SessionState;
use crate::error::Result;

/// Outbound frames buffered per client before frames are dropped.
pub const QUEUE_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Control,
    Observer,
}

enum Inbound {
    Connected { id: u64, tx: SyncSender<String>, observe: bool },
    Frame { id: u64, text: String },
    Disconnected { id: u64 },
}

struct Client {
    tx: SyncSender<String>,
    role: Role,
    dropped: u64,
}

pub struct Server {
    listener: TcpListener,
    session: SessionState,
}

impl Server {
    /// Binds the listening socket; fails if the address is in use.
    pub fn bind(addr: impl ToSocketAddrs, session: SessionState) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        Ok(Self { listener, session })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Runs the session loop until `stop` is set.
    pub fn run(self, stop: Arc<AtomicBool>) -> Result<()> {
        let (in_tx, in_rx) = mpsc::channel();
        self.listener.set_nonblocking(true)?;
        let acceptor = {
            let stop = stop.clone();
            let listener = self.listener;
            thread::spawn(move || accept_loop(listener, in_tx, stop))
        };
        let result = session_loop(self.session, in_rx, &stop);
        stop.store(true, Ordering::SeqCst);
        let _ = acceptor.join();
        result
    }
}

fn accept_loop(listener: TcpListener, inbound: Sender<Inbound>, stop: Arc<AtomicBool>) {
    let mut next_id = 0;
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, _)) => {
                let id = next_id;
                next_id += 1;
                let inbound = inbound.clone();
                let stop = stop.clone();
                thread::spawn(move || connection(id, stream, inbound, stop));
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(5)),
            Err(_) => thread::sleep(Duration::from_millis(5)),
        }
    }
}

fn connection(id: u64, stream: TcpStream, inbound: Sender<Inbound>, stop: Arc<AtomicBool>) {
    if stream.set_nonblocking(false).is_err() {
        return;
    }
    let mut observe = false;
    let ws = tungstenite::accept_hdr(stream, |req: &Request, resp: Response| {
        observe = req.uri().path().starts_with("/observe");
        Ok(resp)
    });
    let Ok(mut ws) = ws else { return };
    if ws.get_ref().set_read_timeout(Some(Duration::from_millis(2))).is_err() {
        return;
    }
    let (tx, rx) = mpsc::sync_channel(QUEUE_DEPTH);
    if inbound.send(Inbound::Connected { id, tx, observe }).is_err() {
        return;
    }
    pump(id, &mut ws, &rx, &inbound, &stop);
    let _ = inbound.send(Inbound::Disconnected { id });
    let _ = ws.close(None);
    let _ = ws.flush();
}

fn pump(id: u64, ws: &mut WebSocket<TcpStream>, rx: &Receiver<String>, inbound: &Sender<Inbound>, stop: &AtomicBool) {
    while !stop.load(Ordering::SeqCst) {
        match ws.read() {
            Ok(Message::Text(text)) => {
                if inbound.send(Inbound::Frame { id, text: text.to_string() }).is_err() {
                    return;
                }
            }
            Ok(Message::Binary(bytes)) => {
                let text = String::from_utf8_lossy(&bytes).into_owned();
                if inbound.send(Inbound::Frame { id, text }).is_err() {
                    return;
                }
            }
            Ok(Message::Close(_)) => return,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e)) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {}
            Err(_) => return,
        }
        loop {
            match rx.try_recv() {
                Ok(frame) => {
                    if ws.send(Message::text(frame)).is_err() {
                        return;
                    }
                }
                Err(mpsc::TryRecvError::Empty) => break,
                Err(mpsc::TryRecvError::Disconnected) => return,
            }
        }
    }
}

fn deliver(client: &mut Client, frame: String) {
    match client.tx.try_send(frame) {
        Ok(()) => {}
        Err(TrySendError::Full(_)) => client.dropped += 1,
        Err(TrySendError::Disconnected(_)) => {}
    }
}

fn session_loop(mut session: SessionState, inbound: Receiver<Inbound>, stop: &AtomicBool) -> Result<()> {
    let period = Duration::from_secs_f64(session.dt());
    let mut clients: BTreeMap<u64, Client> = BTreeMap::new();
    let mut control: Option<u64> = None;
    let mut deadline = Instant::now();
    while !stop.load(Ordering::SeqCst) {
        // tick boundary: apply everything that arrived, in order
        while let Ok(event) = inbound.try_recv() {
            match event {
                Inbound::Connected { id, tx, observe } => {
                    let role = if !observe && control.is_none() {
                        control = Some(id);
                        Role::Control
                    } else {
                        Role::Observer
                    };
                    clients.insert(id, Client { tx, role, dropped: 0 });
                }
                Inbound::Disconnected { id } => {
                    clients.remove(&id);
                    if control == Some(id) {
                        control = None;
                    }
                }
                Inbound::Frame { id, text } => {
                    let Some(client) = clients.get_mut(&id) else { continue };
                    let reply = match decode_client(&text) {
                        Err(e) => Some(ServerMessage::Error(e)),
                        Ok(_) if client.role == Role::Observer => {
                            Some(error_frame("read_only", "observers cannot send control messages"))
                        }
                        Ok(msg) => session.apply(&msg).err().map(|e| error_frame("invalid", e.to_string())),
                    };
                    if let Some(r) = reply {
                        deliver(client, encode_server(&r));
                    }
                }
            }
        }
        if control.is_some() && !session.is_paused() {
            let frame = match session.tick(None) {
                Ok(update) => encode_server(&ServerMessage::State(update)),
                Err(e) => encode_server(&error_frame("solver", e.to_string())),
            };
            for client in clients.values_mut() {
                deliver(client, frame.clone());
            }
        }
        deadline += period;
        let now = Instant::now();
        if deadline > now {
            thread::sleep(deadline - now);
        } else {
            deadline = now;
        }
    }
    Ok(())
}

/// Serves `session` on `0.0.0.0:port` until the process exits.
pub fn serve(port: u16, session: SessionState) -> Result<()> {
    let server = Server::bind(("0.0.0.0", port), session)?;
    eprintln!("listening on ws://{}", server.local_addr()?);
    server.run(Arc::new(AtomicBool::new(false)))
}
