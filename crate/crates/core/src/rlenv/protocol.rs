//! Line-delimited JSON protocol between the environment and external
//! trainers. See `PROTOCOL.md` at the repository root for the schemas.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{EnvError, Episode, Observation};
use crate::generators::{gen_gabriel, gen_grid_city, CbdCount, GabrielParams, GridCityParams};
use crate::instance::io::InstanceDoc;
use crate::instance::Instance;
use crate::pmp::density_init;

pub const PROTOCOL_VERSION: u64 = 1;
pub const MAX_LINE_BYTES: usize = 16 << 20;
pub const MAX_NODES: usize = 2000;
pub const MAX_BATCH: usize = 256;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Reset {
        #[serde(default)]
        instance_id: Option<String>,
        #[serde(default)]
        instance: Option<InstanceDoc>,
        #[serde(default)]
        f0: Option<Vec<usize>>,
        #[serde(default)]
        p: Option<usize>,
        #[serde(default)]
        k: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Step {
        u1: usize,
        u2: usize,
    },
    BatchGenerate {
        params: GenerateSpec,
    },
    Shutdown {
        #[serde(default)]
        server: bool,
    },
    Act {
        observation: Box<Observation>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenerateSpec {
    Grid {
        width: usize,
        #[serde(default)]
        n_cbds: Option<u8>,
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    Gabriel {
        n: usize,
        #[serde(default)]
        knn: Option<usize>,
        count: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl GenerateSpec {
    fn count(&self) -> usize {
        match self {
            GenerateSpec::Grid { count, .. } | GenerateSpec::Gabriel { count, .. } => *count,
        }
    }

    fn nodes(&self) -> usize {
        match self {
            GenerateSpec::Grid { width, .. } => width.saturating_mul(*width),
            GenerateSpec::Gabriel { n, .. } => *n,
        }
    }

    /// Instance `index` of the batch; seeds run sequentially from `seed`.
    pub fn generate(&self, index: usize) -> Result<Instance, EnvError> {
        Ok(match *self {
            GenerateSpec::Grid {
                width,
                n_cbds,
                seed,
                ..
            } => gen_grid_city(&GridCityParams {
                width,
                n_cbds: n_cbds.map_or(CbdCount::Random, CbdCount::Fixed),
                seed: seed.wrapping_add(index as u64),
                ..Default::default()
            })?,
            GenerateSpec::Gabriel { n, knn, seed, .. } => gen_gabriel(&GabrielParams {
                n,
                knn: knn.unwrap_or(3),
                seed: seed.wrapping_add(index as u64),
                ..Default::default()
            })?,
        })
    }
}

/// Stable machine-readable error codes.
pub mod code {
    pub const MALFORMED: &str = "malformed";
    pub const VERSION: &str = "version";
    pub const INVALID: &str = "invalid_request";
    pub const UNKNOWN_INSTANCE: &str = "unknown_instance";
    pub const NO_EPISODE: &str = "no_episode";
    pub const EPISODE_DONE: &str = "episode_done";
    pub const MASK: &str = "mask_violation";
    pub const LIMIT: &str = "limit_exceeded";
    pub const UNSUPPORTED: &str = "unsupported";
}

/// What the transport should do after sending a reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    CloseSession,
    StopServer,
}

#[derive(Debug, Clone)]
pub struct Reply {
    pub body: Value,
    pub control: Control,
}

impl Reply {
    pub fn line(&self) -> String {
        serde_json::to_string(&self.body).expect("reply serialises")
    }
}

pub fn error_body(id: Option<&Value>, code: &str, message: impl Into<String>) -> Value {
    envelope(
        id,
        "error",
        json!({ "code": code, "message": message.into() }),
    )
}

fn envelope(id: Option<&Value>, kind: &str, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("version".into(), json!(PROTOCOL_VERSION));
    if let Some(id) = id {
        map.insert("id".into(), id.clone());
    }
    map.insert("type".into(), json!(kind));
    if let Value::Object(extra) = fields {
        map.extend(extra);
    }
    Value::Object(map)
}

fn env_error_code(e: &EnvError) -> &'static str {
    match e {
        EnvError::Mask { .. } => code::MASK,
        EnvError::EpisodeDone => code::EPISODE_DONE,
        _ => code::INVALID,
    }
}

/// Per-connection protocol state: stored instances and the active episode.
#[derive(Default)]
pub struct Session {
    instances: HashMap<String, Arc<Instance>>,
    episode: Option<Episode>,
    next_id: usize,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn episode(&self) -> Option<&Episode> {
        self.episode.as_ref()
    }

    pub fn instance(&self, id: &str) -> Option<&Arc<Instance>> {
        self.instances.get(id)
    }

    /// Parses one request line and produces the reply. Never panics on
    /// malformed input; every failure is reported as an `error` reply.
    pub fn handle_line(&mut self, line: &str) -> Reply {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return self.err(None, code::MALFORMED, format!("invalid JSON: {e}")),
        };
        let Value::Object(mut obj) = value else {
            return self.err(None, code::MALFORMED, "message must be a JSON object");
        };
        let id = obj.remove("id");
        match obj.remove("version") {
            Some(v) if v.as_u64() == Some(PROTOCOL_VERSION) => {}
            Some(v) => {
                return self.err(
                    id.as_ref(),
                    code::VERSION,
                    format!("unsupported version {v}, expected {PROTOCOL_VERSION}"),
                )
            }
            None => {
                return self.err(
                    id.as_ref(),
                    code::VERSION,
                    "missing mandatory field `version`",
                )
            }
        }
        let request: Request = match serde_json::from_value(Value::Object(obj)) {
            Ok(r) => r,
            Err(e) => return self.err(id.as_ref(), code::MALFORMED, format!("bad request: {e}")),
        };
        self.handle(id.as_ref(), request)
    }

    fn err(&self, id: Option<&Value>, code: &str, message: impl Into<String>) -> Reply {
        Reply {
            body: error_body(id, code, message),
            control: Control::Continue,
        }
    }

    fn ok(&self, id: Option<&Value>, kind: &str, fields: Value) -> Reply {
        Reply {
            body: envelope(id, kind, fields),
            control: Control::Continue,
        }
    }

    pub fn handle(&mut self, id: Option<&Value>, request: Request) -> Reply {
        match request {
            Request::Reset {
                instance_id,
                instance,
                f0,
                p,
                k,
                seed,
            } => {
                let instance = match (instance_id, instance) {
                    (Some(key), None) => match self.instances.get(&key) {
                        Some(inst) => inst.clone(),
                        None => {
                            return self.err(
                                id,
                                code::UNKNOWN_INSTANCE,
                                format!("no instance with id {key:?} in this session"),
                            )
                        }
                    },
                    (None, Some(doc)) => {
                        if doc.nodes.len() > MAX_NODES {
                            return self.err(
                                id,
                                code::LIMIT,
                                format!("inline instance exceeds {MAX_NODES} nodes"),
                            );
                        }
                        match doc.to_instance() {
                            Ok(inst) => Arc::new(inst),
                            Err(e) => return self.err(id, code::INVALID, e.to_string()),
                        }
                    }
                    _ => {
                        return self.err(
                            id,
                            code::INVALID,
                            "reset needs exactly one of `instance_id` or `instance`",
                        )
                    }
                };
                let seed = seed.unwrap_or(0);
                let f0 = match (f0, p) {
                    (Some(f0), _) => f0,
                    (None, Some(p)) => match density_init(&instance, p, seed) {
                        Ok(f) => f,
                        Err(e) => return self.err(id, code::INVALID, e.to_string()),
                    },
                    (None, None) => return self.err(id, code::INVALID, "reset needs `f0` or `p`"),
                };
                let k = k.unwrap_or((f0.len() / 2).max(1));
                match Episode::reset(instance, &f0, k, seed) {
                    Ok((episode, obs)) => {
                        self.episode = Some(episode);
                        self.ok(id, "observation", json!({ "observation": obs }))
                    }
                    Err(e) => self.err(id, code::INVALID, e.to_string()),
                }
            }
            Request::Step { u1, u2 } => {
                let Some(episode) = self.episode.as_mut() else {
                    return self.err(id, code::NO_EPISODE, "step before reset");
                };
                match episode.step(u1, u2) {
                    Ok(res) => self.ok(
                        id,
                        "step_result",
                        json!({ "observation": res.observation, "reward": res.reward, "done": res.done }),
                    ),
                    Err(e) => self.err(id, env_error_code(&e), e.to_string()),
                }
            }
            Request::BatchGenerate { params } => {
                if params.count() == 0 || params.count() > MAX_BATCH {
                    return self.err(id, code::LIMIT, format!("count must be in 1..={MAX_BATCH}"));
                }
                if params.nodes() > MAX_NODES {
                    return self.err(
                        id,
                        code::LIMIT,
                        format!("instances are limited to {MAX_NODES} nodes"),
                    );
                }
                let mut ids = Vec::with_capacity(params.count());
                let mut generated = Vec::with_capacity(params.count());
                for i in 0..params.count() {
                    match params.generate(i) {
                        Ok(inst) => generated.push(inst),
                        Err(e) => return self.err(id, code::INVALID, e.to_string()),
                    }
                }
                let mut sizes = Vec::with_capacity(generated.len());
                for inst in generated {
                    let key = format!("inst-{}", self.next_id);
                    self.next_id += 1;
                    sizes.push(inst.n());
                    self.instances.insert(key.clone(), Arc::new(inst));
                    ids.push(key);
                }
                self.ok(id, "instances", json!({ "ids": ids, "nodes": sizes }))
            }
            Request::Shutdown { server } => Reply {
                body: envelope(id, "bye", json!({})),
                control: if server {
                    Control::StopServer
                } else {
                    Control::CloseSession
                },
            },
            Request::Act { .. } => self.err(
                id,
                code::UNSUPPORTED,
                "`act` is answered by policy servers, not the environment",
            ),
        }
    }
}

/// Builds an `act` request for a policy server.
pub fn act_request(observation: &Observation) -> Value {
    json!({ "version": PROTOCOL_VERSION, "type": "act", "observation": observation })
}

/// Parses an `action` reply from a policy server into `(u1, u2)`.
pub fn parse_action(line: &str) -> Result<(usize, usize), String> {
    let v: Value = serde_json::from_str(line)
        .map_err(|e| format!("invalid JSON from policy server: {e}: {line}"))?;
    if v.get("version").and_then(Value::as_u64) != Some(PROTOCOL_VERSION) {
        return Err(format!(
            "policy server reply has missing or unsupported version: {line}"
        ));
    }
    match v.get("type").and_then(Value::as_str) {
        Some("action") => {
            let u1 = v.get("u1").and_then(Value::as_u64);
            let u2 = v.get("u2").and_then(Value::as_u64);
            match (u1, u2) {
                (Some(a), Some(b)) => Ok((a as usize, b as usize)),
                _ => Err(format!("action reply lacks integer u1/u2: {line}")),
            }
        }
        Some("error") => Err(format!("policy server error: {line}")),
        _ => Err(format!("unexpected reply from policy server: {line}")),
    }
}
