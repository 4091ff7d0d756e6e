//! The learn-to-defer decision process.
//!
//! Every node starts deferred (state 0). Each step the policy proposes a
//! label in `0..=S` for every deferred node; the proposals are written in and
//! a clean-up pass sends back to 0 everything involved in a violated
//! constraint, including nodes fixed in earlier steps. Labels index a palette
//! of beamforming vectors (IA mode) or plain colors (coloring mode).

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::{is_proper, Coloring};
use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, UndirectedGraph};
use crate::ia::{receiver_ranks, verify, CodingScheme, Method, DEFAULT_TRIALS};
use crate::linalg::VectorSet;

/// Iteration limit used unless configured otherwise.
pub const DEFAULT_LIMIT: usize = 32;

/// Palette for IA mode: entry `s - 1` holds the `b` vectors given to a node
/// in state `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IaPalette {
    pub b: usize,
    pub c: usize,
    pub n: usize,
    pub entries: Vec<Vec<Vec<i64>>>,
    /// Channel draws for the generic rank when `n > 1`.
    pub trials: usize,
    pub seed: u64,
}

impl IaPalette {
    /// One vector per entry, taken from `set` in order.
    pub fn scalar(set: &VectorSet, n: usize) -> Self {
        IaPalette {
            b: 1,
            c: set.dim,
            n,
            entries: set.vectors.iter().map(|v| vec![v.clone()]).collect(),
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.b == 0 || self.c == 0 || self.n == 0 {
            return Err(Error::InvalidParameter(
                "b, c and n must be positive".into(),
            ));
        }
        if self.b > self.c {
            return Err(Error::StreamsExceedDimension {
                b: self.b,
                c: self.c,
            });
        }
        for entry in &self.entries {
            if entry.len() != self.b {
                return Err(Error::DimensionMismatch {
                    expected: self.b,
                    found: entry.len(),
                });
            }
            if let Some(v) = entry.iter().find(|v| v.len() != self.c) {
                return Err(Error::DimensionMismatch {
                    expected: self.c,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Ia(IaPalette),
    Coloring,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Iteration limit `L`.
    pub limit: usize,
    /// Weight of the early-termination reward.
    pub beta: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            limit: DEFAULT_LIMIT,
            beta: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnvState {
    /// Per node: 0 = deferred, otherwise a palette index in `1..=S`.
    pub node_state: Vec<usize>,
    pub t: usize,
}

impl EnvState {
    pub fn deferred(&self) -> Vec<usize> {
        (0..self.node_state.len())
            .filter(|&v| self.node_state[v] == 0)
            .collect()
    }

    pub fn fixed_count(&self) -> usize {
        self.node_state.iter().filter(|&&s| s != 0).count()
    }

    pub fn is_complete(&self) -> bool {
        self.node_state.iter().all(|&s| s != 0)
    }
}

/// Proposed labels for the deferred nodes (0-based node ids).
pub type Action = BTreeMap<usize, usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub next: EnvState,
    pub reward: f64,
    pub done: bool,
    pub rolled_back: Vec<usize>,
    pub newly_fixed: Vec<usize>,
}

/// One line of an episode trace, with 1-based node ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub action: BTreeMap<usize, usize>,
    pub rolled_back: Vec<usize>,
    pub newly_fixed: Vec<usize>,
    pub reward: f64,
}

impl TraceRecord {
    pub fn new(action: &Action, outcome: &StepOutcome) -> Self {
        TraceRecord {
            t: outcome.next.t,
            action: action.iter().map(|(&v, &s)| (v + 1, s)).collect(),
            rolled_back: outcome.rolled_back.iter().map(|v| v + 1).collect(),
            newly_fixed: outcome.newly_fixed.iter().map(|v| v + 1).collect(),
            reward: outcome.reward,
        }
    }
}

/// Change in the number of fixed nodes, normalized by the node count.
pub fn reward_cardinality(prev: &EnvState, next: &EnvState) -> f64 {
    let k = prev.node_state.len();
    if k == 0 {
        return 0.0;
    }
    (next.fixed_count() as f64 - prev.fixed_count() as f64) / k as f64
}

/// `β (L − t) / L`.
pub fn reward_terminal(t: usize, limit: usize, beta: f64) -> f64 {
    if limit == 0 {
        return 0.0;
    }
    beta * (limit.saturating_sub(t)) as f64 / limit as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub final_state: EnvState,
    /// The snapshot with the most fixed nodes (earliest on ties).
    pub best: EnvState,
    pub rewards: Vec<f64>,
    pub steps: usize,
}

impl Episode {
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    pub fn completed(&self) -> bool {
        self.final_state.is_complete()
    }
}

#[derive(Clone, Debug)]
pub struct Env {
    graph: ConflictGraph,
    undirected: UndirectedGraph,
    mode: Mode,
    s: usize,
    config: EnvConfig,
}

impl Env {
    /// `s` is the number of labels; in IA mode it must equal the palette size.
    pub fn new(graph: ConflictGraph, s: usize, mode: Mode, config: EnvConfig) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter(
                "palette size must be at least 1".into(),
            ));
        }
        if let Mode::Ia(p) = &mode {
            p.validate()?;
            if p.entries.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: p.entries.len(),
                });
            }
        }
        let undirected = graph.underlying_undirected();
        Ok(Env {
            graph,
            undirected,
            mode,
            s,
            config,
        })
    }

    /// Coloring mode on an undirected graph (each edge becomes a 2-cycle).
    pub fn coloring(u: &UndirectedGraph, s: usize, config: EnvConfig) -> Result<Self> {
        let edges = u.edges().flat_map(|(a, b)| [(a, b), (b, a)]);
        let graph = ConflictGraph::from_edges(u.node_count(), edges)?;
        Env::new(graph, s, Mode::Coloring, config)
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn undirected(&self) -> &UndirectedGraph {
        &self.undirected
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn palette_size(&self) -> usize {
        self.s
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn reset(&self) -> EnvState {
        EnvState {
            node_state: vec![0; self.graph.node_count()],
            t: 0,
        }
    }

    pub fn is_terminal(&self, state: &EnvState) -> bool {
        state.is_complete() || state.t >= self.config.limit
    }

    pub fn step(&self, state: &EnvState, action: &Action) -> Result<StepOutcome> {
        if self.is_terminal(state) {
            return Err(Error::InvalidAction("step on a terminal state".into()));
        }
        let deferred = state.deferred();
        if action.len() != deferred.len() || !deferred.iter().all(|v| action.contains_key(v)) {
            let stray = action.keys().find(|v| !deferred.contains(v));
            return Err(Error::InvalidAction(match stray {
                Some(v) => format!("node {} is not deferred", v + 1),
                None => "every deferred node needs an action".into(),
            }));
        }
        if let Some((v, s)) = action.iter().find(|(_, &s)| s > self.s) {
            return Err(Error::InvalidAction(format!(
                "label {s} for node {} exceeds palette size {}",
                v + 1,
                self.s
            )));
        }

        let mut next = state.node_state.clone();
        let mut assigned = Vec::new();
        for (&v, &s) in action {
            next[v] = s;
            if s != 0 {
                assigned.push(v);
            }
        }
        let updated = next.clone();
        match &self.mode {
            Mode::Ia(p) => self.clean_up_ia(p, &mut next, &assigned),
            Mode::Coloring => self.clean_up_coloring(&mut next, &assigned),
        }

        let rolled_back: Vec<usize> = (0..next.len())
            .filter(|&v| updated[v] != 0 && next[v] == 0)
            .collect();
        let newly_fixed: Vec<usize> = assigned.iter().copied().filter(|&v| next[v] != 0).collect();
        let next = EnvState {
            node_state: next,
            t: state.t + 1,
        };
        let done = self.is_terminal(&next);
        let mut reward = reward_cardinality(state, &next);
        if done {
            reward += reward_terminal(next.t, self.config.limit, self.config.beta);
        }
        Ok(StepOutcome {
            next,
            reward,
            done,
            rolled_back,
            newly_fixed,
        })
    }

    /// Receivers whose constraint can only have changed through `assigned`,
    /// checked in ascending order; a violation resets the whole closed
    /// in-neighborhood at once. Repeats until a sweep changes nothing.
    fn clean_up_ia(&self, p: &IaPalette, state: &mut [usize], assigned: &[usize]) {
        let mut candidates: Vec<usize> = assigned
            .iter()
            .flat_map(|&v| std::iter::once(v).chain(self.graph.out_neighbors(v).iter().copied()))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let mut vectors: Vec<Vec<Vec<i64>>> = state
            .iter()
            .map(|&s| {
                if s == 0 {
                    Vec::new()
                } else {
                    p.entries[s - 1].clone()
                }
            })
            .collect();
        loop {
            let mut changed = false;
            for &j in &candidates {
                if !self.graph.closed_in(j).all(|v| state[v] != 0) {
                    continue;
                }
                let (rank_s, rank_i) =
                    receiver_ranks(&self.graph, &vectors, p.c, p.n, j, p.trials, p.seed);
                if rank_s - rank_i != p.b {
                    for v in self.graph.closed_in(j) {
                        state[v] = 0;
                        vectors[v].clear();
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Both ends of every monochromatic edge go back to deferred.
    fn clean_up_coloring(&self, state: &mut [usize], assigned: &[usize]) {
        let mut clash = Vec::new();
        for &v in assigned {
            for &w in self.undirected.neighbors(v) {
                if state[w] == state[v] {
                    clash.push(v);
                    clash.push(w);
                }
            }
        }
        for v in clash {
            state[v] = 0;
        }
    }

    /// Uniform label in `0..=S` for every deferred node.
    pub fn random_action(&self, state: &EnvState, rng: &mut impl Rng) -> Action {
        state
            .deferred()
            .into_iter()
            .map(|v| (v, rng.gen_range(0..=self.s)))
            .collect()
    }

    /// Runs `policy` from the reset state until termination.
    pub fn run_episode<F>(&self, mut policy: F) -> Result<Episode>
    where
        F: FnMut(&EnvState) -> Action,
    {
        let mut state = self.reset();
        let mut best = state.clone();
        let mut rewards = Vec::new();
        while !self.is_terminal(&state) {
            let action = policy(&state);
            let out = self.step(&state, &action)?;
            rewards.push(out.reward);
            state = out.next;
            if state.fixed_count() > best.fixed_count() {
                best = state.clone();
            }
        }
        Ok(Episode {
            steps: state.t,
            final_state: state,
            best,
            rewards,
        })
    }

    /// The scheme encoded by a complete IA-mode state.
    pub fn to_scheme(&self, state: &EnvState) -> Result<CodingScheme> {
        let Mode::Ia(p) = &self.mode else {
            return Err(Error::InvalidParameter("not an IA-mode environment".into()));
        };
        let mut assignment = Vec::with_capacity(state.node_state.len());
        for (v, &s) in state.node_state.iter().enumerate() {
            if s == 0 {
                return Err(Error::Unassigned(v + 1));
            }
            assignment.push(p.entries[s - 1].clone());
        }
        Ok(CodingScheme {
            c: p.c,
            b: p.b,
            n: p.n,
            assignment,
            method: if p.b == 1 { Method::Ssia } else { Method::Svia },
        })
    }

    /// The coloring encoded by a complete state, on the underlying graph.
    pub fn to_coloring(&self, state: &EnvState) -> Result<Coloring> {
        if let Some(v) = state.node_state.iter().position(|&s| s == 0) {
            return Err(Error::Unassigned(v + 1));
        }
        Ok(Coloring::for_undirected(
            &self.undirected,
            state.node_state.clone(),
        ))
    }

    /// Independent check of a complete state: `verify` in IA mode, a proper
    /// coloring check otherwise.
    pub fn check(&self, state: &EnvState) -> Result<bool> {
        match &self.mode {
            Mode::Ia(p) => {
                Ok(verify(&self.graph, &self.to_scheme(state)?, p.trials, p.seed)?.valid)
            }
            Mode::Coloring => {
                self.to_coloring(state)?;
                Ok(is_proper(&self.undirected, &state.node_state))
            }
        }
    }
}
