//! The relocation MDP as an environment for external learners.
//!
//! An [`Episode`] starts from `F0` with budget `k`. Each step applies the
//! swap `(u1, u2)` unconditionally and rewards the change in improvement
//! ratio, so rewards telescope to the final `Q`. Episodes are served over a
//! line-delimited JSON protocol ([`protocol`], [`server`]) and greedy
//! rollouts can be recorded as expert data ([`expert`]).

mod episode;
pub mod expert;
mod features;
pub mod protocol;
pub mod server;

use thiserror::Error;

use crate::instance::InstanceError;

pub use episode::{Episode, LoggedStep, StepResult};
pub use expert::{
    read_trajectories, read_trajectory_file, record_expert, record_expert_to_file, replay,
    rollout_greedy, TrajectoryRecord, TrajectoryStep,
};
pub use features::{col, observe, observe_with, Observation, FEATURE_DIM};
pub use protocol::{Session, PROTOCOL_VERSION};
pub use server::{serve_session, serve_stdio, EnvServer};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("relocation budget k = {k} must be in 1..={p}")]
    InvalidBudget { k: usize, p: usize },
    #[error("action violates mask at node {node}: {reason}")]
    Mask { node: usize, reason: String },
    #[error("episode is done; reset before stepping again")]
    EpisodeDone,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{0}")]
    Config(String),
    #[error("trajectory file: {0}")]
    Trajectory(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Generator(#[from] crate::generators::GenError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
