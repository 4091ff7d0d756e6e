//! Graph policy/value network and PPO training for the learn-to-defer
//! environment.
//!
//! The network sees only the subgraph induced on the deferred nodes. Each
//! layer computes `H W1 + Â H W2` with `Â` the symmetrically normalized
//! adjacency (self-loops included); the first three layers apply ReLU, the
//! fourth produces `S + 1` logits per node. The value estimate is a linear map
//! of the sum-pooled third-layer embeddings. Gradients are derived by hand.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Action, Env, EnvState};
use crate::error::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 128;
pub const DEFAULT_ROLLOUTS: usize = 20;
const LAYERS: usize = 4;
const CHECKPOINT_VERSION: u32 = 1;

/// Features and normalized adjacency of the deferred-induced subgraph.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    /// Deferred nodes, ascending; row `r` of the matrices is `nodes[r]`.
    pub nodes: Vec<usize>,
    pub features: Array2<f64>,
    pub adjacency: Array2<f64>,
}

/// `[t / L] ++ Σ_{w ~ v} onehot(state[w])` for every deferred `v`, where
/// `w` ranges over in- and out-neighbors.
pub fn featurize(env: &Env, state: &EnvState) -> Observation {
    let s = env.palette_size();
    let u = env.undirected();
    let nodes = state.deferred();
    let m = nodes.len();
    let mut features = Array2::zeros((m, s + 2));
    let limit = env.config().limit.max(1) as f64;
    let mut row_of = vec![usize::MAX; state.node_state.len()];
    for (r, &v) in nodes.iter().enumerate() {
        row_of[v] = r;
        features[[r, 0]] = state.t as f64 / limit;
        for &w in u.neighbors(v) {
            features[[r, 1 + state.node_state[w]]] += 1.0;
        }
    }
    let mut adjacency = Array2::<f64>::eye(m);
    for (r, &v) in nodes.iter().enumerate() {
        for &w in u.neighbors(v) {
            if row_of[w] != usize::MAX {
                adjacency[[r, row_of[w]]] = 1.0;
            }
        }
    }
    let inv_sqrt: Vec<f64> = adjacency
        .sum_axis(Axis(1))
        .iter()
        .map(|d| 1.0 / d.sqrt())
        .collect();
    for ((r, c), x) in adjacency.indexed_iter_mut() {
        *x *= inv_sqrt[r] * inv_sqrt[c];
    }
    Observation {
        nodes,
        features,
        adjacency,
    }
}

/// Network weights: `tensors` holds `W1, W2` for each of the four layers in
/// order, then the `hidden × 1` value head.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    pub palette: usize,
    pub hidden: usize,
    pub tensors: Vec<Array2<f64>>,
}

impl PolicyParams {
    fn shapes(palette: usize, hidden: usize) -> Vec<(usize, usize)> {
        let widths = [palette + 2, hidden, hidden, hidden, palette + 1];
        let mut shapes = Vec::new();
        for l in 0..LAYERS {
            shapes.push((widths[l], widths[l + 1]));
            shapes.push((widths[l], widths[l + 1]));
        }
        shapes.push((hidden, 1));
        shapes
    }

    /// Uniform in `±1/√fan_in`.
    pub fn init(palette: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = Self::shapes(palette, hidden)
            .into_iter()
            .map(|(r, c)| {
                let bound = 1.0 / (r as f64).sqrt();
                Array2::from_shape_fn((r, c), |_| rng.gen_range(-bound..=bound))
            })
            .collect();
        PolicyParams {
            palette,
            hidden,
            tensors,
        }
    }

    pub fn zeros(palette: usize, hidden: usize) -> Self {
        PolicyParams {
            palette,
            hidden,
            tensors: Self::shapes(palette, hidden)
                .into_iter()
                .map(Array2::zeros)
                .collect(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.tensors.iter().map(Array2::len).sum()
    }

    fn w1(&self, l: usize) -> &Array2<f64> {
        &self.tensors[2 * l]
    }

    fn w2(&self, l: usize) -> &Array2<f64> {
        &self.tensors[2 * l + 1]
    }

    fn value_head(&self) -> &Array2<f64> {
        &self.tensors[2 * LAYERS]
    }

    fn check(&self, obs: &Observation) -> Result<()> {
        let (m, f) = obs.features.dim();
        if f != self.palette + 2 {
            return Err(Error::DimensionMismatch {
                expected: self.palette + 2,
                found: f,
            });
        }
        if obs.adjacency.dim() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: obs.adjacency.nrows(),
            });
        }
        Ok(())
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            palette: self.palette,
            hidden: self.hidden,
            tensors: self
                .tensors
                .iter()
                .map(|t| t.outer_iter().map(|row| row.to_vec()).collect())
                .collect(),
            config: None,
        }
    }
}

/// Serialized weights plus the training configuration that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub palette: usize,
    pub hidden: usize,
    pub tensors: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub config: Option<TrainConfig>,
}

impl Checkpoint {
    pub fn into_params(self) -> Result<PolicyParams> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let shapes = PolicyParams::shapes(self.palette, self.hidden);
        if shapes.len() != self.tensors.len() {
            return Err(Error::CheckpointMismatch(format!(
                "expected {} tensors, found {}",
                shapes.len(),
                self.tensors.len()
            )));
        }
        let mut tensors = Vec::with_capacity(shapes.len());
        for ((r, c), rows) in shapes.into_iter().zip(self.tensors) {
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            if rows.len() != r || flat.len() != r * c {
                return Err(Error::CheckpointMismatch(format!("tensor is not {r}x{c}")));
            }
            tensors.push(Array2::from_shape_vec((r, c), flat).expect("shape checked"));
        }
        Ok(PolicyParams {
            palette: self.palette,
            hidden: self.hidden,
            tensors,
        })
    }
}

struct Cache {
    /// Inputs to each layer (`H0 = X`, then the three hidden outputs).
    inputs: Vec<Array2<f64>>,
    /// `Â H` for each layer input.
    mixed: Vec<Array2<f64>>,
    /// Pre-activations of the three ReLU layers.
    pre: Vec<Array2<f64>>,
    probs: Array2<f64>,
    pooled: Array1<f64>,
    value: f64,
}

fn softmax_rows(z: &Array2<f64>) -> Array2<f64> {
    let mut out = z.clone();
    for mut row in out.outer_iter_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}

fn forward(p: &PolicyParams, obs: &Observation) -> Cache {
    let a = &obs.adjacency;
    let mut inputs = vec![obs.features.clone()];
    let mut mixed = Vec::with_capacity(LAYERS);
    let mut pre = Vec::with_capacity(LAYERS - 1);
    for l in 0..LAYERS - 1 {
        let h = &inputs[l];
        let ah = a.dot(h);
        let z = h.dot(p.w1(l)) + ah.dot(p.w2(l));
        inputs.push(z.mapv(|x| x.max(0.0)));
        mixed.push(ah);
        pre.push(z);
    }
    let h = &inputs[LAYERS - 1];
    let ah = a.dot(h);
    let logits = h.dot(p.w1(LAYERS - 1)) + ah.dot(p.w2(LAYERS - 1));
    mixed.push(ah);
    let pooled = h.sum_axis(Axis(0));
    let value = pooled.dot(&p.value_head().column(0));
    Cache {
        probs: softmax_rows(&logits),
        inputs,
        mixed,
        pre,
        pooled,
        value,
    }
}

/// Gradients of a scalar loss given `∂/∂logits` and `∂/∂value`.
fn backward(
    p: &PolicyParams,
    obs: &Observation,
    cache: &Cache,
    d_logits: &Array2<f64>,
    d_value: f64,
) -> Vec<Array2<f64>> {
    let a = &obs.adjacency;
    let mut grads: Vec<Array2<f64>> = p.tensors.iter().map(|t| Array2::zeros(t.dim())).collect();
    let top = LAYERS - 1;
    grads[2 * top] = cache.inputs[top].t().dot(d_logits);
    grads[2 * top + 1] = cache.mixed[top].t().dot(d_logits);
    let mut dh = d_logits.dot(&p.w1(top).t()) + a.t().dot(&d_logits.dot(&p.w2(top).t()));
    grads[2 * LAYERS] = cache.pooled.clone().insert_axis(Axis(1)) * d_value;
    let head = p.value_head().column(0).to_owned() * d_value;
    for mut row in dh.outer_iter_mut() {
        row += &head;
    }
    for l in (0..top).rev() {
        let mut dz = dh;
        dz.zip_mut_with(&cache.pre[l], |g, &z| {
            if z <= 0.0 {
                *g = 0.0;
            }
        });
        grads[2 * l] = cache.inputs[l].t().dot(&dz);
        grads[2 * l + 1] = cache.mixed[l].t().dot(&dz);
        dh = dz.dot(&p.w1(l).t()) + a.t().dot(&dz.dot(&p.w2(l).t()));
    }
    grads
}

/// Per-node distribution over `0..=S`, one row per deferred node.
pub fn policy_forward(p: &PolicyParams, obs: &Observation) -> Result<Array2<f64>> {
    p.check(obs)?;
    Ok(forward(p, obs).probs)
}

/// Sum-pooled value estimate (0 for an empty observation).
pub fn value_forward(p: &PolicyParams, obs: &Observation) -> Result<f64> {
    p.check(obs)?;
    Ok(forward(p, obs).value)
}

fn sample_row(probs: ndarray::ArrayView1<f64>, rng: &mut impl Rng) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &q) in probs.iter().enumerate() {
        acc += q;
        if x < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// One recorded decision.
#[derive(Clone, Debug)]
pub struct Transition {
    pub obs: Observation,
    /// Chosen label per row of `obs`.
    pub labels: Vec<usize>,
    /// Log-probability of each chosen label under the behavior policy.
    pub log_probs: Vec<f64>,
    pub value: f64,
    pub reward: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub transitions: Vec<Transition>,
    pub final_state: EnvState,
}

impl Trajectory {
    pub fn episode_return(&self) -> f64 {
        self.transitions.iter().map(|t| t.reward).sum()
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Generalized advantage estimates and return targets, bootstrapping
    /// with 0 after the last step.
    pub fn advantages(&self, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.transitions.len();
        let mut adv = vec![0.0; n];
        let mut next_value = 0.0;
        let mut running = 0.0;
        for i in (0..n).rev() {
            let t = &self.transitions[i];
            let delta = t.reward + gamma * next_value - t.value;
            running = delta + gamma * lambda * running;
            adv[i] = running;
            next_value = t.value;
        }
        let returns = adv
            .iter()
            .zip(&self.transitions)
            .map(|(a, t)| a + t.value)
            .collect();
        (adv, returns)
    }
}

/// Samples one episode (or takes the most likely label when `greedy`).
pub fn run_policy(
    env: &Env,
    p: &PolicyParams,
    rng: &mut impl Rng,
    greedy: bool,
) -> Result<Trajectory> {
    if p.palette != env.palette_size() {
        return Err(Error::CheckpointMismatch(format!(
            "network palette {} vs environment palette {}",
            p.palette,
            env.palette_size()
        )));
    }
    let mut state = env.reset();
    let mut transitions = Vec::new();
    while !env.is_terminal(&state) {
        let obs = featurize(env, &state);
        let cache = forward(p, &obs);
        let mut labels = Vec::with_capacity(obs.nodes.len());
        let mut log_probs = Vec::with_capacity(obs.nodes.len());
        for row in cache.probs.outer_iter() {
            let k = if greedy {
                row.iter()
                    .enumerate()
                    .fold(0, |best, (k, &q)| if q > row[best] { k } else { best })
            } else {
                sample_row(row, rng)
            };
            log_probs.push(row[k].ln());
            labels.push(k);
        }
        let action: Action = obs
            .nodes
            .iter()
            .copied()
            .zip(labels.iter().copied())
            .collect();
        let out = env.step(&state, &action)?;
        transitions.push(Transition {
            obs,
            labels,
            log_probs,
            value: cache.value,
            reward: out.reward,
        });
        state = out.next;
    }
    Ok(Trajectory {
        transitions,
        final_state: state,
    })
}

fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct RolloutResult {
    /// Index and terminal state of the chosen complete episode.
    pub best: Option<(usize, EnvState)>,
    pub completed: usize,
    pub attempts: usize,
}

impl RolloutResult {
    pub fn success(&self) -> bool {
        self.best.is_some()
    }
}

/// `k` sampled episodes in parallel; episode `i` uses its own stream of
/// `seed`, so the first `k` episodes are shared across calls with larger `k`.
/// Picks the complete episode with the fewest steps (lowest index on ties).
pub fn rollout_best_of(env: &Env, p: &PolicyParams, k: usize, seed: u64) -> Result<RolloutResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one rollout".into()));
    }
    let runs: Vec<Trajectory> = (0..k)
        .into_par_iter()
        .map(|i| run_policy(env, p, &mut episode_rng(seed, i as u64), false))
        .collect::<Result<_>>()?;
    let complete: Vec<(usize, &Trajectory)> = runs
        .iter()
        .enumerate()
        .filter(|(_, t)| t.final_state.is_complete())
        .collect();
    let best = complete
        .iter()
        .min_by_key(|(i, t)| (t.len(), *i))
        .map(|(i, t)| (*i, t.final_state.clone()));
    Ok(RolloutResult {
        best,
        completed: complete.len(),
        attempts: k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpoConfig {
    pub clip: f64,
    pub lr: f64,
    pub grad_clip: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    /// Passes over each batch.
    pub epochs: usize,
    /// Shuffled minibatches per pass.
    pub minibatches: usize,
    pub per_node_ratio: bool,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            clip: 0.2,
            lr: 1e-3,
            grad_clip: 0.2,
            gamma: 1.0,
            lambda: 0.95,
            value_coef: 0.5,
            entropy_coef: 0.01,
            epochs: 4,
            minibatches: 4,
            per_node_ratio: true,
        }
    }
}

/// A transition with its (already normalized) advantage and return target.
#[derive(Clone, Debug)]
pub struct Sample<'a> {
    pub transition: &'a Transition,
    pub advantage: f64,
    pub target: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    pub total: f64,
}

/// Clipped surrogate `min(r A, clip(r) A)` and its derivative in `log r`.
fn clipped_surrogate(log_ratio: f64, a: f64, clip: f64) -> (f64, f64) {
    let ratio = log_ratio.exp();
    let clipped = ratio.clamp(1.0 - clip, 1.0 + clip);
    let flat = (a > 0.0 && ratio > 1.0 + clip) || (a < 0.0 && ratio < 1.0 - clip);
    (
        (ratio * a).min(clipped * a),
        if flat { 0.0 } else { a * ratio },
    )
}

/// Mean PPO loss over `samples` and its gradient.
///
/// With `per_node_ratio` each deferred node's label is its own clipped term
/// (averaged over the nodes of the step); otherwise the step's joint
/// probability forms a single ratio.
pub fn ppo_loss(
    p: &PolicyParams,
    samples: &[Sample<'_>],
    cfg: &PpoConfig,
) -> (LossParts, Vec<Array2<f64>>) {
    let n = samples.len().max(1) as f64;
    let mut parts = LossParts::default();
    let mut grads: Vec<Array2<f64>> = p.tensors.iter().map(|t| Array2::zeros(t.dim())).collect();
    for s in samples {
        let tr = s.transition;
        let cache = forward(p, &tr.obs);
        let probs = &cache.probs;
        let m = probs.nrows();
        let a = s.advantage;
        let new_lp: Vec<f64> = tr
            .labels
            .iter()
            .enumerate()
            .map(|(r, &k)| probs[[r, k]].ln())
            .collect();
        // d(surrogate)/d(log π(label_r)) per row.
        let (surrogate, d_lp): (f64, Vec<f64>) = if cfg.per_node_ratio {
            let w = 1.0 / m.max(1) as f64;
            let terms: Vec<(f64, f64)> = new_lp
                .iter()
                .zip(&tr.log_probs)
                .map(|(new, old)| clipped_surrogate(new - old, a, cfg.clip))
                .collect();
            (
                terms.iter().map(|t| t.0 * w).sum(),
                terms.iter().map(|t| t.1 * w).collect(),
            )
        } else {
            let log_ratio: f64 = new_lp.iter().sum::<f64>() - tr.log_probs.iter().sum::<f64>();
            let (value, d) = clipped_surrogate(log_ratio, a, cfg.clip);
            (value, vec![d; m])
        };

        let mut d_logits = Array2::zeros(probs.dim());
        let mut entropy = 0.0;
        for r in 0..m {
            let row = probs.row(r);
            let h: f64 = -row
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| q * q.ln())
                .sum::<f64>();
            entropy += h;
            for k in 0..row.len() {
                let q = row[k];
                let indicator = if k == tr.labels[r] { 1.0 } else { 0.0 };
                let mut g = -d_lp[r] * (indicator - q);
                if q > 0.0 {
                    g += cfg.entropy_coef / m as f64 * q * (q.ln() + h);
                }
                d_logits[[r, k]] = g / n;
            }
        }
        let entropy = if m > 0 { entropy / m as f64 } else { 0.0 };
        let err = cache.value - s.target;
        let d_value = 2.0 * cfg.value_coef * err / n;

        parts.policy -= surrogate / n;
        parts.value += err * err / n;
        parts.entropy += entropy / n;
        for (g, d) in grads
            .iter_mut()
            .zip(backward(p, &tr.obs, &cache, &d_logits, d_value))
        {
            *g += &d;
        }
    }
    parts.total = parts.policy + cfg.value_coef * parts.value - cfg.entropy_coef * parts.entropy;
    (parts, grads)
}

/// Adaptive-moment optimizer state.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
}

impl Adam {
    pub fn new(p: &PolicyParams, lr: f64) -> Self {
        let zeros: Vec<Array2<f64>> = p.tensors.iter().map(|t| Array2::zeros(t.dim())).collect();
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn apply(&mut self, p: &mut PolicyParams, grads: &[Array2<f64>]) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        for i in 0..grads.len() {
            let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
            self.m[i].zip_mut_with(&grads[i], |m, &g| *m = b1 * *m + (1.0 - b1) * g);
            self.v[i].zip_mut_with(&grads[i], |v, &g| *v = b2 * *v + (1.0 - b2) * g * g);
            ndarray::Zip::from(&mut p.tensors[i])
                .and(&self.m[i])
                .and(&self.v[i])
                .for_each(|w, &m, &v| *w -= lr * (m / c1) / ((v / c2).sqrt() + eps));
        }
    }
}

fn clip_global_norm(grads: &mut [Array2<f64>], max_norm: f64) -> f64 {
    let norm = grads
        .iter()
        .map(|g| g.iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            g.mapv_inplace(|x| x * scale);
        }
    }
    norm
}

/// Clipped-surrogate update on a batch of trajectories, advantages
/// normalized across the batch; `seed` drives the minibatch shuffle.
/// Returns the loss of the first minibatch.
pub fn ppo_update(
    p: &mut PolicyParams,
    adam: &mut Adam,
    batch: &[Trajectory],
    cfg: &PpoConfig,
    seed: u64,
) -> Result<LossParts> {
    let mut samples = Vec::new();
    for tr in batch {
        let (adv, ret) = tr.advantages(cfg.gamma, cfg.lambda);
        for ((t, a), r) in tr.transitions.iter().zip(adv).zip(ret) {
            samples.push(Sample {
                transition: t,
                advantage: a,
                target: r,
            });
        }
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty PPO batch".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.advantage).sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|s| (s.advantage - mean).powi(2))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    for s in &mut samples {
        s.advantage = if std > 1e-8 {
            (s.advantage - mean) / std
        } else {
            s.advantage - mean
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chunk = samples.len().div_ceil(cfg.minibatches.max(1));
    let mut first = None;
    for _ in 0..cfg.epochs.max(1) {
        samples.shuffle(&mut rng);
        for mb in samples.chunks(chunk) {
            let (parts, mut grads) = ppo_loss(p, mb, cfg);
            if !parts.total.is_finite() || grads.iter().any(|g| g.iter().any(|x| !x.is_finite())) {
                return Err(Error::NonFiniteLoss(format!(
                    "policy {} value {} entropy {}",
                    parts.policy, parts.value, parts.entropy
                )));
            }
            clip_global_norm(&mut grads, cfg.grad_clip);
            adam.apply(p, &grads);
            first.get_or_insert(parts);
        }
    }
    Ok(first.expect("at least one epoch"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: usize,
    /// Episodes collected per PPO update.
    pub episodes_per_iteration: usize,
    pub hidden: usize,
    pub seed: u64,
    pub ppo: PpoConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 300,
            episodes_per_iteration: 16,
            hidden: DEFAULT_HIDDEN,
            seed: 0,
            ppo: PpoConfig::default(),
        }
    }
}

/// One row of the training curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub iteration: usize,
    pub mean_return: f64,
    pub mean_length: f64,
    pub completion_rate: f64,
    pub loss: f64,
}

/// Trains a fresh network on `envs`, which must share one palette size.
pub fn train(envs: &[Env], config: &TrainConfig) -> Result<(PolicyParams, Vec<TrainRow>)> {
    let s = envs
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty training set".into()))?
        .palette_size();
    let params = PolicyParams::init(s, config.hidden, config.seed);
    train_from(params, envs, config)
}

pub fn train_from(
    mut params: PolicyParams,
    envs: &[Env],
    config: &TrainConfig,
) -> Result<(PolicyParams, Vec<TrainRow>)> {
    if envs.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    if let Some(env) = envs.iter().find(|e| e.palette_size() != params.palette) {
        return Err(Error::CheckpointMismatch(format!(
            "network palette {} vs environment palette {}",
            params.palette,
            env.palette_size()
        )));
    }
    let mut adam = Adam::new(&params, config.ppo.lr);
    let mut pick = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut log = Vec::with_capacity(config.iterations);
    for it in 0..config.iterations {
        let chosen: Vec<usize> = (0..config.episodes_per_iteration.max(1))
            .map(|_| pick.gen_range(0..envs.len()))
            .collect();
        let p = &params;
        let batch: Vec<Trajectory> = chosen
            .par_iter()
            .enumerate()
            .map(|(i, &e)| {
                let index = (it * config.episodes_per_iteration.max(1) + i) as u64;
                run_policy(&envs[e], p, &mut episode_rng(config.seed, index), false)
            })
            .collect::<Result<_>>()?;
        let episodes = batch.len() as f64;
        let mean_return = batch.iter().map(Trajectory::episode_return).sum::<f64>() / episodes;
        let mean_length = batch.iter().map(|t| t.len() as f64).sum::<f64>() / episodes;
        let completion_rate =
            batch.iter().filter(|t| t.final_state.is_complete()).count() as f64 / episodes;
        let nonempty: Vec<Trajectory> = batch.into_iter().filter(|t| !t.is_empty()).collect();
        let loss = if nonempty.is_empty() {
            0.0
        } else {
            ppo_update(
                &mut params,
                &mut adam,
                &nonempty,
                &config.ppo,
                config.seed ^ it as u64,
            )?
            .total
        };
        log.push(TrainRow {
            iteration: it,
            mean_return,
            mean_length,
            completion_rate,
            loss,
        });
    }
    Ok((params, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EnvConfig, Mode};
    use crate::graph::{ConflictGraph, UndirectedGraph};

    fn path_env(s: usize) -> Env {
        Env::coloring(
            &UndirectedGraph::from_edges(3, &[(0, 1), (1, 2)]),
            s,
            EnvConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn featurize_path() {
        let env = path_env(3);
        let state = EnvState {
            node_state: vec![0, 2, 0],
            t: 1,
        };
        let obs = featurize(&env, &state);
        assert_eq!(obs.nodes, vec![0, 2]);
        assert_eq!(
            obs.features.row(0).to_vec(),
            vec![1.0 / 32.0, 0.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(obs.adjacency, Array2::<f64>::eye(2));
    }

    #[test]
    fn featurize_all_deferred() {
        let env = path_env(2);
        let obs = featurize(&env, &env.reset());
        assert_eq!(obs.features.column(1).to_vec(), vec![1.0, 2.0, 1.0]);
        assert!(obs
            .features
            .slice(ndarray::s![.., 2..])
            .iter()
            .all(|&x| x == 0.0));
        // Normalized path adjacency with self-loops: degrees 2, 3, 2.
        let expected = 1.0 / 6f64.sqrt();
        assert!((obs.adjacency[[0, 1]] - expected).abs() < 1e-15);
        assert!((obs.adjacency[[1, 1]] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_give_uniform_policy() {
        let env = path_env(3);
        let obs = featurize(&env, &env.reset());
        let probs = policy_forward(&PolicyParams::zeros(3, 8), &obs).unwrap();
        assert!(probs.iter().all(|&q| (q - 0.25).abs() < 1e-15));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let env = path_env(3);
        let obs = featurize(&env, &env.reset());
        assert!(policy_forward(&PolicyParams::zeros(4, 8), &obs).is_err());
    }

    #[test]
    fn empty_observation_has_zero_value() {
        let p = PolicyParams::init(3, 8, 1);
        let obs = Observation {
            nodes: vec![],
            features: Array2::zeros((0, 5)),
            adjacency: Array2::zeros((0, 0)),
        };
        assert_eq!(value_forward(&p, &obs).unwrap(), 0.0);
    }

    #[test]
    fn isolated_node_only_sees_itself() {
        let p = PolicyParams::init(2, 6, 3);
        let features = Array2::from_shape_vec((1, 4), vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        let alone = Observation {
            nodes: vec![0],
            features: features.clone(),
            adjacency: Array2::eye(1),
        };
        let mut two = Array2::zeros((2, 4));
        two.row_mut(0).assign(&features.row(0));
        two.row_mut(1)
            .assign(&Array1::from(vec![0.1, 0.0, 1.0, 3.0]));
        let pair = Observation {
            nodes: vec![0, 1],
            features: two,
            adjacency: Array2::eye(2),
        };
        let a = policy_forward(&p, &alone).unwrap();
        let b = policy_forward(&p, &pair).unwrap();
        for k in 0..3 {
            assert!((a[[0, k]] - b[[0, k]]).abs() < 1e-12);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = PolicyParams::init(3, 5, 9);
        let text = serde_json::to_string(&p.to_checkpoint()).unwrap();
        let back: Checkpoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_params().unwrap(), p);
        let mut bad = p.to_checkpoint();
        bad.palette = 4;
        assert!(matches!(
            bad.into_params(),
            Err(Error::CheckpointMismatch(_))
        ));
    }

    #[test]
    fn zero_advantage_leaves_only_value_gradient() {
        let env = path_env(2);
        let p = PolicyParams::init(2, 4, 5);
        let obs = featurize(&env, &env.reset());
        let t = Transition {
            obs,
            labels: vec![1, 2, 0],
            log_probs: vec![-1.0, -0.5, -0.5],
            value: 0.0,
            reward: 1.0,
        };
        let cfg = PpoConfig {
            entropy_coef: 0.0,
            ..PpoConfig::default()
        };
        let s = [Sample {
            transition: &t,
            advantage: 0.0,
            target: 1.0,
        }];
        let (parts, grads) = ppo_loss(&p, &s, &cfg);
        assert_eq!(parts.policy, 0.0);
        // The output layer only feeds the policy head.
        assert!(grads[6].iter().chain(grads[7].iter()).all(|&g| g == 0.0));
        assert!(grads[8].iter().any(|&g| g != 0.0));
    }

    #[test]
    fn clip_boundary_is_continuous() {
        let env = path_env(2);
        let p = PolicyParams::init(2, 4, 6);
        let obs = featurize(&env, &env.reset());
        let labels = vec![0, 1, 2];
        let probs = policy_forward(&p, &obs).unwrap();
        let lp: Vec<f64> = labels
            .iter()
            .enumerate()
            .map(|(r, &k)| probs[[r, k]].ln())
            .collect();
        for per_node_ratio in [true, false] {
            let cfg = PpoConfig {
                entropy_coef: 0.0,
                value_coef: 0.0,
                per_node_ratio,
                ..PpoConfig::default()
            };
            // Old log-probs chosen so that every ratio sits exactly at 1 + clip.
            let shift = if per_node_ratio { 1.0 } else { 1.0 / 3.0 } * (1.0 + cfg.clip).ln();
            let t = Transition {
                obs: obs.clone(),
                labels: labels.clone(),
                log_probs: lp.iter().map(|x| x - shift).collect(),
                value: 0.0,
                reward: 0.0,
            };
            let s = [Sample {
                transition: &t,
                advantage: 1.0,
                target: 0.0,
            }];
            let (parts, _) = ppo_loss(&p, &s, &cfg);
            assert!((parts.policy + (1.0 + cfg.clip)).abs() < 1e-12);
        }
    }

    #[test]
    fn untrained_run_is_sound() {
        let env = path_env(2);
        let p = PolicyParams::init(2, 8, 2);
        let res = rollout_best_of(&env, &p, 20, 4).unwrap();
        assert!(res.success());
        let (_, state) = res.best.unwrap();
        assert!(env.check(&state).unwrap());
    }

    #[test]
    fn zero_iterations_return_initialization() {
        let env = path_env(2);
        let cfg = TrainConfig {
            iterations: 0,
            hidden: 8,
            ..TrainConfig::default()
        };
        let (p, log) = train(std::slice::from_ref(&env), &cfg).unwrap();
        assert_eq!(p, PolicyParams::init(2, 8, cfg.seed));
        assert!(log.is_empty());
    }

    #[test]
    fn ia_mode_runs() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let set = crate::linalg::gen_binary_vectors(2).unwrap();
        let env = Env::new(
            g,
            3,
            Mode::Ia(crate::env::IaPalette::scalar(&set, 1)),
            EnvConfig::default(),
        )
        .unwrap();
        let p = PolicyParams::init(3, 8, 0);
        let res = rollout_best_of(&env, &p, 5, 0).unwrap();
        assert!(res.success());
        assert!(env.check(&res.best.unwrap().1).unwrap());
    }
}
