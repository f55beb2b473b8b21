//! Newline-delimited JSON request loop.
//!
//! Verbs: `spec`, `reset`, `step`, `close`. Every request line gets exactly
//! one response line; malformed input yields `{"error": .., "code": ..}` and
//! the session carries on.

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener};
use std::thread;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{decode_action, encode_observation, RawAction};
use crate::agent::PerAgent;
use crate::error::Error;
use crate::{Real, WorldConfig, WorldState};

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase")]
enum Request {
    Spec,
    Reset {
        #[serde(default)]
        seed: Option<u64>,
    },
    Step {
        actions: PerAgent<[Real; 2]>,
    },
    Close,
}

#[derive(Debug, Serialize)]
struct StepInfo {
    f1: PerAgent<Real>,
    f2: PerAgent<Real>,
    f3: Real,
    alive: usize,
    battery: PerAgent<Real>,
}

#[derive(Debug, Serialize)]
struct StepReply {
    obs: Vec<Real>,
    rewards: PerAgent<Real>,
    done: bool,
    info: StepInfo,
}

/// One client's environment.
pub struct Session {
    config: WorldConfig,
    world: Option<WorldState>,
    closed: bool,
}

impl Session {
    pub fn new(config: WorldConfig) -> Self {
        Self {
            config,
            world: None,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn world(&self) -> Option<&WorldState> {
        self.world.as_ref()
    }

    /// Handles one request line (without the trailing newline) and returns
    /// the response line.
    pub fn handle_line(&mut self, line: &[u8]) -> String {
        let reply = match self.dispatch(line) {
            Ok(v) => v,
            Err((code, message)) => json!({ "error": message, "code": code }),
        };
        serde_json::to_string(&reply).expect("JSON values always serialize")
    }

    fn dispatch(&mut self, line: &[u8]) -> Result<Value, (&'static str, String)> {
        let text = std::str::from_utf8(line)
            .map_err(|e| ("parse_error", format!("invalid UTF-8: {e}")))?;
        let value: Value = serde_json::from_str(text.trim())
            .map_err(|e| ("parse_error", format!("invalid JSON: {e}")))?;
        let request: Request =
            serde_json::from_value(value).map_err(|e| ("bad_request", e.to_string()))?;

        match request {
            Request::Spec => Ok(json!({
                "obs_dim": self.config.obs_dim(),
                "n_agents": 2,
                "action_dim": 2,
                "action_low": [0, 0],
                "action_high": [1, 1],
            })),
            Request::Reset { seed } => {
                let seed = seed.unwrap_or(self.config.scenario.seed);
                let world = WorldState::reset(&self.config, seed)
                    .map_err(|e| ("config_error", e.to_string()))?;
                let reply = json!({ "obs": encode_observation(&world), "t": world.t });
                self.world = Some(world);
                Ok(reply)
            }
            Request::Step { actions } => {
                let world = self
                    .world
                    .as_mut()
                    .ok_or(("no_episode", "send reset before step".to_string()))?;
                let mut moves = PerAgent::new(crate::Move::stay(), crate::Move::stay());
                for (agent, [u_theta, u_d]) in actions.iter() {
                    moves[agent] = decode_action(RawAction::new(*u_theta, *u_d), &self.config)
                        .map_err(|e| ("invalid_action", format!("{agent}: {e}")))?;
                }
                let outcome = world.step(moves).map_err(|e| match e {
                    Error::EpisodeDone => ("episode_done", e.to_string()),
                    other => ("invalid_action", other.to_string()),
                })?;
                let m = outcome.metrics;
                let reply = StepReply {
                    obs: encode_observation(world),
                    rewards: m.rewards,
                    done: outcome.done,
                    info: StepInfo {
                        f1: m.f1,
                        f2: m.f2,
                        f3: m.f3,
                        alive: m.alive_count,
                        battery: m.battery,
                    },
                };
                Ok(serde_json::to_value(reply).expect("step reply serializes"))
            }
            Request::Close => {
                self.closed = true;
                Ok(json!({ "ok": true }))
            }
        }
    }
}

/// Runs one session over a byte stream until `close` or end of input.
pub fn serve_stream<R: BufRead, W: Write>(
    config: WorldConfig,
    mut reader: R,
    mut writer: W,
) -> io::Result<()> {
    let mut session = Session::new(config);
    let mut line = Vec::new();
    loop {
        line.clear();
        if reader.read_until(b'\n', &mut line)? == 0 {
            return Ok(());
        }
        if line.last() == Some(&b'\n') {
            line.pop();
        }
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        let reply = session.handle_line(&line);
        writer.write_all(reply.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if session.is_closed() {
            return Ok(());
        }
    }
}

pub fn serve_stdio(config: WorldConfig) -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_stream(config, stdin.lock(), stdout.lock())
}

/// Accepts connections forever, one session per connection, each on its own
/// thread. `on_bound` receives the bound address before the first accept.
pub fn serve_tcp(
    config: WorldConfig,
    port: u16,
    on_bound: impl FnOnce(SocketAddr),
) -> io::Result<()> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    on_bound(listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(_) => continue,
        };
        let config = config.clone();
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = serve_stream(config, reader, BufWriter::new(stream));
        });
    }
    Ok(())
}
