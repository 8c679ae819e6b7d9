//! Expert trajectories: Greedy-swap rollouts recorded through the
//! environment.
//!
//! The file is line-delimited JSON. The first line is the header
//! `{"format":"swapfl-trajectory","version":1}`; every further line is one
//! [`TrajectoryRecord`]. See `FORMATS.md` at the repository root.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EnvError, Episode, Observation};
use crate::instance::io::InstanceDoc;
use crate::instance::Instance;
use crate::pmp::density_init;
use crate::rng;
use crate::swap::{is_improvement, GreedySwapAgent, SwapContext};

pub const TRAJECTORY_FORMAT: &str = "swapfl-trajectory";
pub const TRAJECTORY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub format: String,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    /// Observation the action was chosen from.
    pub observation: Observation,
    /// `[u1, u2]`: facility removed, node inserted.
    pub action: [usize; 2],
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub instance: InstanceDoc,
    pub f0: Vec<usize>,
    pub p: usize,
    pub k: usize,
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
    pub final_q: f64,
}

/// Rolls the Greedy-swap agent through an episode from `f0`, stopping at
/// the budget or when no improving swap exists.
pub fn rollout_greedy(
    instance: Arc<Instance>,
    f0: &[usize],
    k: usize,
    seed: u64,
) -> Result<TrajectoryRecord, EnvError> {
    let (mut episode, mut obs) = Episode::reset(instance.clone(), f0, k, seed)?;
    let mut steps = Vec::new();
    while !episode.done() {
        let ctx = SwapContext {
            instance: &instance,
            solution: episode.solution(),
            base_facilities: episode.base_facilities(),
            base_objective: episode.base_objective(),
            step: episode.step_index(),
            budget: k,
        };
        let Some((u1, u2, delta)) = GreedySwapAgent::best_pair(&ctx) else {
            break;
        };
        if !is_improvement(delta, episode.solution().objective()) {
            break;
        }
        let result = episode.step(u1, u2)?;
        steps.push(TrajectoryStep {
            observation: obs,
            action: [u1, u2],
            reward: result.reward,
        });
        obs = result.observation;
    }
    Ok(TrajectoryRecord {
        instance: InstanceDoc::from_instance(&instance),
        f0: episode.base_facilities().to_vec(),
        p: f0.len(),
        k,
        seed,
        steps,
        final_q: episode.current_q(),
    })
}

/// Records one greedy rollout per instance, with `F0` drawn by density
/// initialization. Writes the header and one record per line.
pub fn record_expert<W: Write>(
    corpus: &[Instance],
    p: usize,
    k: usize,
    seed: u64,
    out: W,
) -> Result<usize, EnvError> {
    if corpus.is_empty() {
        return Err(EnvError::EmptyCorpus);
    }
    let mut out = BufWriter::new(out);
    let header = TrajectoryHeader {
        format: TRAJECTORY_FORMAT.into(),
        version: TRAJECTORY_VERSION,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut total = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let s = rng::derive_seed(seed, i as u64);
        let f0 = density_init(inst, p, s).map_err(|e| EnvError::Config(e.to_string()))?;
        let record = rollout_greedy(Arc::new(inst.clone()), &f0, k, s)?;
        total += record.steps.len();
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(total)
}

pub fn record_expert_to_file(
    corpus: &[Instance],
    p: usize,
    k: usize,
    seed: u64,
    path: impl AsRef<Path>,
) -> Result<usize, EnvError> {
    record_expert(corpus, p, k, seed, File::create(path)?)
}

/// Reads a trajectory file, checking the header.
pub fn read_trajectories<R: BufRead>(reader: R) -> Result<Vec<TrajectoryRecord>, EnvError> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| EnvError::Trajectory("empty file".into()))??;
    let header: TrajectoryHeader = serde_json::from_str(&header_line)
        .map_err(|e| EnvError::Trajectory(format!("bad header: {e}")))?;
    if header.format != TRAJECTORY_FORMAT || header.version != TRAJECTORY_VERSION {
        return Err(EnvError::Trajectory(format!(
            "unsupported trajectory format {} version {}",
            header.format, header.version
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| EnvError::Trajectory(format!("record {}: {e}", i + 1)))?;
        records.push(record);
    }
    Ok(records)
}

pub fn read_trajectory_file(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRecord>, EnvError> {
    read_trajectories(BufReader::new(File::open(path)?))
}

/// Replays `record` through a fresh episode and returns the rewards.
pub fn replay(record: &TrajectoryRecord) -> Result<Vec<f64>, EnvError> {
    let instance = Arc::new(record.instance.to_instance()?);
    let (mut episode, _) = Episode::reset(instance, &record.f0, record.k, record.seed)?;
    record
        .steps
        .iter()
        .map(|s| Ok(episode.step(s.action[0], s.action[1])?.reward))
        .collect()
}
