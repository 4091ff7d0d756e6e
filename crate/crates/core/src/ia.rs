//! Interference-alignment schemes: verification, construction from
//! colorings, binary subspace search and the method ladder.
//!
//! A scheme assigns each message `b` beamforming vectors in a `C`-dimensional
//! coding space. It is valid when, at every receiver `j`,
//! `rank(S_j) − rank(I_j) = b`, where `I_j` spans the vectors of `j`'s
//! in-neighbors and `S_j` adds `j`'s own. With `n` receive antennas each
//! vector `v` from transmitter `i` is seen as `h_ji ⊗ v` for a generic
//! channel `h_ji ∈ Z^n`. A valid scheme is decodable by zero forcing: any
//! combiner whose rows span the left null space of `I_j` keeps `b`
//! independent dimensions of the desired signal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{mais, DofBound};
use crate::coloring::{
    chromatic_coloring, fractional_local_coloring_bounded, fractional_local_width,
    local_coloring_bounded, Search,
};
use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::linalg::{
    binary_vector, gen_generic_vectors, generic_rank_lifted, rank_of_columns, GenericChannels,
    LiftedBlock, ModBasis, BINARY_CAP,
};
use crate::Dof;

/// Default number of channel draws for lifted ranks.
pub const DEFAULT_TRIALS: usize = 3;

/// Default node-expansion budget for one exact search call.
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Tdma,
    Osia,
    Ovia,
    Ssia,
    Svia,
    SimoScalar,
    SimoVector,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Tdma,
        Method::Osia,
        Method::Ovia,
        Method::Ssia,
        Method::Svia,
        Method::SimoScalar,
        Method::SimoVector,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Tdma => "TDMA",
            Method::Osia => "OSIA",
            Method::Ovia => "OVIA",
            Method::Ssia => "SSIA",
            Method::Svia => "SVIA",
            Method::SimoScalar => "SIMO_SCALAR",
            Method::SimoVector => "SIMO_VECTOR",
        }
    }

    /// Position in the simplicity order; multi-antenna searches share the
    /// slots of their single-antenna counterparts.
    pub fn rank(self) -> usize {
        match self {
            Method::Tdma => 0,
            Method::Osia => 1,
            Method::Ovia => 2,
            Method::Ssia | Method::SimoScalar => 3,
            Method::Svia | Method::SimoVector => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingScheme {
    pub c: usize,
    pub b: usize,
    pub n: usize,
    /// `assignment[v]` holds the `b` vectors of node `v`, each of length `c`.
    pub assignment: Vec<Vec<Vec<i64>>>,
    pub method: Method,
}

impl CodingScheme {
    /// Single-stream scheme from one vector per node.
    pub fn scalar(c: usize, n: usize, vectors: Vec<Vec<i64>>, method: Method) -> Self {
        CodingScheme {
            c,
            b: 1,
            n,
            assignment: vectors.into_iter().map(|v| vec![v]).collect(),
            method,
        }
    }

    pub fn dof(&self) -> Dof {
        Dof::new(self.b as u64, self.c as u64)
    }

    fn check_shape(&self, g: &ConflictGraph) -> Result<()> {
        if self.b == 0 || self.n == 0 || self.c == 0 {
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
        if self.assignment.len() != g.node_count() {
            return Err(Error::DimensionMismatch {
                expected: g.node_count(),
                found: self.assignment.len(),
            });
        }
        for vectors in &self.assignment {
            if vectors.len() != self.b {
                return Err(Error::DimensionMismatch {
                    expected: self.b,
                    found: vectors.len(),
                });
            }
            if let Some(v) = vectors.iter().find(|v| v.len() != self.c) {
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
pub struct NodeRanks {
    /// 1-based node label.
    pub node: usize,
    pub rank_s: usize,
    pub rank_i: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub per_node: Vec<NodeRanks>,
    #[serde(with = "crate::dof_serde")]
    pub dof: Dof,
}

impl VerifyReport {
    /// 1-based labels of the nodes where the rank condition fails.
    pub fn violations(&self, b: usize) -> Vec<usize> {
        self.per_node
            .iter()
            .filter(|r| r.rank_s - r.rank_i != b)
            .map(|r| r.node)
            .collect()
    }
}

/// Checks the rank condition at every node. Exact for one antenna; for
/// `n > 1` the ranks are generic ranks of the lifted matrices.
pub fn verify(
    g: &ConflictGraph,
    scheme: &CodingScheme,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    scheme.check_shape(g)?;
    let per_node: Vec<NodeRanks> = (0..g.node_count())
        .map(|j| {
            let (rank_s, rank_i) =
                receiver_ranks(g, &scheme.assignment, scheme.c, scheme.n, j, trials, seed);
            NodeRanks {
                node: j + 1,
                rank_s,
                rank_i,
            }
        })
        .collect();
    let valid = per_node.iter().all(|r| r.rank_s - r.rank_i == scheme.b);
    Ok(VerifyReport {
        valid,
        per_node,
        dof: scheme.dof(),
    })
}

/// `(rank S_j, rank I_j)` at receiver `j`. Only the closed in-neighborhood
/// of `j` is read from `assignment`. Exact for `n = 1`; for `n > 1` the
/// generic rank over `trials` channel draws seeded from `seed` and `j`.
pub fn receiver_ranks(
    g: &ConflictGraph,
    assignment: &[Vec<Vec<i64>>],
    c: usize,
    n: usize,
    j: usize,
    trials: usize,
    seed: u64,
) -> (usize, usize) {
    let inn = g.in_neighbors(j);
    if n == 1 {
        let interference: Vec<&[i64]> = inn
            .iter()
            .flat_map(|&i| assignment[i].iter().map(Vec::as_slice))
            .collect();
        let mut all = interference.clone();
        all.extend(assignment[j].iter().map(Vec::as_slice));
        return (rank_of_columns(c, &all), rank_of_columns(c, &interference));
    }
    let interference: Vec<LiftedBlock> = inn
        .iter()
        .map(|&i| LiftedBlock {
            antennas: n,
            vectors: &assignment[i],
        })
        .collect();
    let mut all = interference.clone();
    all.push(LiftedBlock {
        antennas: n,
        vectors: &assignment[j],
    });
    let node_seed = seed ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    (
        generic_rank_lifted(&all, c, trials, node_seed),
        generic_rank_lifted(&interference, c, trials, node_seed),
    )
}

/// [`verify`] with the default trial count, reduced to a flag.
pub fn is_valid(g: &ConflictGraph, scheme: &CodingScheme) -> Result<bool> {
    Ok(verify(g, scheme, DEFAULT_TRIALS, 0)?.valid)
}

/// One-to-one scheme from a (possibly multi-) coloring: color `i` becomes
/// the `i`-th vector of an MDS family in `c` dimensions.
pub fn scheme_from_coloring(
    g: &ConflictGraph,
    colors: &[Vec<usize>],
    c: usize,
    n: usize,
) -> Result<CodingScheme> {
    let b = colors.first().map_or(1, Vec::len);
    if b == 0 || colors.iter().any(|cs| cs.len() != b || cs.contains(&0)) {
        return Err(Error::InvalidParameter(
            "every node needs b positive colors".into(),
        ));
    }
    if colors.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            found: colors.len(),
        });
    }
    if b > c {
        return Err(Error::StreamsExceedDimension { b, c });
    }
    let width = fractional_local_width(g, colors);
    if width > c {
        return Err(Error::WidthViolation {
            target: c,
            found: width,
        });
    }
    let palette = colors.iter().flatten().copied().max().unwrap_or(1);
    let family = gen_generic_vectors(c, palette.max(c), None)?;
    let assignment = colors
        .iter()
        .map(|cs| {
            cs.iter()
                .map(|&col| family.by_index(col).to_vec())
                .collect()
        })
        .collect();
    Ok(CodingScheme {
        c,
        b,
        n,
        assignment,
        method: if b == 1 { Method::Osia } else { Method::Ovia },
    })
}

/// Orthogonal access: an optimal proper coloring, color `i` using the unit
/// vector `e_i` of a `χ`-dimensional space.
pub fn tdma_scheme(g: &ConflictGraph) -> Result<CodingScheme> {
    let col = chromatic_coloring(&g.underlying_undirected())?;
    let chi = col.palette_size.max(1);
    let vectors = col
        .colors
        .iter()
        .map(|&color| (1..=chi).map(|r| i64::from(r == color)).collect())
        .collect();
    Ok(CodingScheme::scalar(chi, 1, vectors, Method::Tdma))
}

/// Combinatorial validity of a one-vector-per-node assignment over an MDS
/// family (`assignment[v]` is a 1-based family index): at every node `j`, at
/// most `n − 1` in-neighbors reuse `j`'s vector and the closed in-neighborhood
/// uses at most `c` distinct vectors.
///
/// The test is exact whenever it passes, and whenever `n = 1` or the family
/// has exactly `c` members; with larger families and `n > 1` a failing
/// distinct-count can still be rescued by the extra antennas.
pub fn simo_scalar_check(g: &ConflictGraph, assignment: &[usize], c: usize, n: usize) -> bool {
    (0..g.node_count()).all(|j| {
        let own = assignment[j];
        let shared = g
            .in_neighbors(j)
            .iter()
            .filter(|&&i| assignment[i] == own)
            .count();
        let mut distinct: Vec<usize> = g.closed_in(j).map(|v| assignment[v]).collect();
        distinct.sort_unstable();
        distinct.dedup();
        shared < n && distinct.len() <= c
    })
}

/// Knobs for [`subspace_search_with`].
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Node expansions allowed per call; `None` searches to exhaustion.
    pub budget: Option<u64>,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: Some(DEFAULT_BUDGET),
            seed: 0,
            trials: DEFAULT_TRIALS,
        }
    }
}

/// Backtracking search over binary beamforming vectors for a valid scheme
/// with `b` streams in `c` dimensions and `n` receive antennas.
pub fn subspace_search(
    g: &ConflictGraph,
    b: usize,
    c: usize,
    n: usize,
    budget: Option<u64>,
) -> Result<Search<CodingScheme>> {
    subspace_search_with(
        g,
        b,
        c,
        n,
        SearchConfig {
            budget,
            ..SearchConfig::default()
        },
    )
}

pub fn subspace_search_with(
    g: &ConflictGraph,
    b: usize,
    c: usize,
    n: usize,
    config: SearchConfig,
) -> Result<Search<CodingScheme>> {
    if b == 0 || n == 0 {
        return Err(Error::InvalidParameter("b and n must be positive".into()));
    }
    if b > c {
        return Err(Error::StreamsExceedDimension { b, c });
    }
    if c > BINARY_CAP {
        return Err(Error::OverCap {
            size: c,
            cap: BINARY_CAP,
        });
    }
    let mut patterns: Vec<Vec<u32>> = vec![Vec::new(); g.node_count()];
    let mut budget = config.budget;
    for comp in g.weak_components() {
        let sub = g.induced(&comp);
        let seed = config.seed ^ (comp[0] as u64).wrapping_mul(0x2545_f491_4f6c_dd1d);
        let mut search = Subspace::new(&sub, b, c, n, seed);
        match search.run(&mut budget) {
            Search::Found(found) => {
                for (r, &v) in comp.iter().enumerate() {
                    patterns[v] = found[r].clone();
                }
            }
            Search::Exhausted => return Ok(Search::Exhausted),
            Search::BudgetHit => return Ok(Search::BudgetHit),
        }
    }
    let assignment = patterns
        .iter()
        .map(|ps| ps.iter().map(|&p| binary_vector(c, p)).collect())
        .collect();
    let method = match (n, b) {
        (1, 1) => Method::Ssia,
        (1, _) => Method::Svia,
        (_, 1) => Method::SimoScalar,
        _ => Method::SimoVector,
    };
    let scheme = CodingScheme {
        c,
        b,
        n,
        assignment,
        method,
    };
    // Multi-antenna pruning works over GF(p); accept only what the
    // independent check confirms.
    if verify(g, &scheme, config.trials, config.seed)?.valid {
        Ok(Search::Found(scheme))
    } else {
        Ok(Search::BudgetHit)
    }
}

/// Search on one weakly connected graph. Each node owns `b` slots, the
/// copies of the node-split graph, filled one at a time; the copies of a
/// node share that node's channels. Every receiver keeps two growing
/// echelon bases: its interference span and its full received span.
struct Subspace<'a> {
    h: &'a ConflictGraph,
    b: usize,
    c: usize,
    n: usize,
    order: Vec<usize>,
    assigned: Vec<Vec<u32>>,
    channels: Option<GenericChannels>,
    interference: Vec<ModBasis>,
    received: Vec<ModBasis>,
}

impl<'a> Subspace<'a> {
    fn new(h: &'a ConflictGraph, b: usize, c: usize, n: usize, seed: u64) -> Self {
        let k = h.node_count();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(h.in_degree(v)), v));
        Subspace {
            h,
            b,
            c,
            n,
            order,
            assigned: vec![Vec::with_capacity(b); k],
            channels: (n > 1).then(|| GenericChannels::new(k, n, seed)),
            interference: vec![ModBasis::new(); k],
            received: vec![ModBasis::new(); k],
        }
    }

    fn run(&mut self, budget: &mut Option<u64>) -> Search<Vec<Vec<u32>>> {
        match self.rec(0, &[(0, self.c)], budget) {
            Some(true) => Search::Found(self.assigned.clone()),
            Some(false) => Search::Exhausted,
            None => Search::BudgetHit,
        }
    }

    /// Vector `p` of transmitter `v` as seen by receiver `j`.
    fn seen(&self, j: usize, v: usize, p: u32) -> Vec<u64> {
        match &self.channels {
            None => (0..self.c).map(|r| u64::from((p >> r) & 1)).collect(),
            Some(ch) => ch.lift(j, v, &binary_vector(self.c, p)),
        }
    }

    /// Places pattern `p` in the next slot of `v`; returns the basis sizes
    /// to restore and whether every affected receiver can still succeed:
    /// its interference leaves room for `b` dimensions and its own vectors
    /// stay independent of that interference and of each other.
    fn place(&mut self, v: usize, p: u32) -> (Vec<(usize, usize, usize)>, bool) {
        self.assigned[v].push(p);
        let mut undo = Vec::with_capacity(1 + self.h.out_neighbors(v).len());
        let mut ok = true;
        undo.push((v, self.interference[v].len(), self.received[v].len()));
        let x = self.seen(v, v, p);
        ok &= self.received[v].insert(x);
        for idx in 0..self.h.out_neighbors(v).len() {
            let j = self.h.out_neighbors(v)[idx];
            undo.push((j, self.interference[j].len(), self.received[j].len()));
            let x = self.seen(j, v, p);
            self.interference[j].insert(x.clone());
            self.received[j].insert(x);
            let rank_i = self.interference[j].len();
            ok &= rank_i + self.b <= self.n * self.c
                && self.received[j].len() == rank_i + self.assigned[j].len();
        }
        ok &= self.interference[v].len() + self.b <= self.n * self.c;
        (undo, ok)
    }

    fn unplace(&mut self, v: usize, undo: &[(usize, usize, usize)]) {
        self.assigned[v].pop();
        for &(j, li, ls) in undo {
            self.interference[j].truncate(li);
            self.received[j].truncate(ls);
        }
    }

    fn rec(
        &mut self,
        depth: usize,
        classes: &[(usize, usize)],
        budget: &mut Option<u64>,
    ) -> Option<bool> {
        if depth == self.order.len() * self.b {
            return Some(true);
        }
        let v = self.order[depth / self.b];
        // Copies of one node are interchangeable: keep their patterns increasing.
        let floor = self.assigned[v].last().copied().unwrap_or(0);
        for (p, counts) in class_prefix_patterns(classes) {
            if p <= floor {
                continue;
            }
            if let Some(b) = budget {
                if *b == 0 {
                    return None;
                }
                *b -= 1;
            }
            let (undo, ok) = self.place(v, p);
            if ok {
                let refined: Vec<(usize, usize)> = classes
                    .iter()
                    .zip(&counts)
                    .flat_map(|(&(start, len), &t)| [(start, t), (start + t, len - t)])
                    .filter(|&(_, len)| len > 0)
                    .collect();
                match self.rec(depth + 1, &refined, budget) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => {
                        self.unplace(v, &undo);
                        return None;
                    }
                }
            }
            self.unplace(v, &undo);
        }
        Some(false)
    }
}

/// Candidate patterns under coordinate symmetry. Coordinates on which every
/// vector assigned so far agrees form a class (a contiguous range) and can be
/// permuted freely, so within each class the next vector's ones come first.
/// Returns the patterns in increasing order with their per-class one counts.
fn class_prefix_patterns(classes: &[(usize, usize)]) -> Vec<(u32, Vec<usize>)> {
    let mut out = vec![(0u32, Vec::with_capacity(classes.len()))];
    for &(start, len) in classes {
        out = out
            .into_iter()
            .flat_map(|(p, counts)| {
                (0..=len).map(move |t| {
                    let mut counts = counts.clone();
                    counts.push(t);
                    (p | (((1u32 << t) - 1) << start), counts)
                })
            })
            .collect();
    }
    out.retain(|(p, _)| *p != 0);
    out.sort_by_key(|(p, _)| *p);
    out
}

/// Which ladder stages to run. TDMA always runs: it is the floor every other
/// stage has to beat. With `n > 1` receive antennas `ssia` also enables the
/// scalar multi-antenna search; the vector one is opt-in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSet {
    pub osia: bool,
    pub ovia: bool,
    pub ssia: bool,
    pub svia: bool,
    pub simo_vector: bool,
}

impl MethodSet {
    pub const ALL: MethodSet = MethodSet {
        osia: true,
        ovia: true,
        ssia: true,
        svia: true,
        simo_vector: false,
    };

    /// TDMA, OSIA, OVIA and SSIA: the four-way attribution.
    pub const NO_SVIA: MethodSet = MethodSet {
        svia: false,
        ..MethodSet::ALL
    };
}

impl Default for MethodSet {
    fn default() -> Self {
        MethodSet::ALL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderConfig {
    /// Largest stream count tried by the vector stages.
    pub max_b: usize,
    pub methods: MethodSet,
    /// Node-expansion budget per exact search call.
    pub budget: Option<u64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            max_b: 2,
            methods: MethodSet::ALL,
            budget: Some(DEFAULT_BUDGET),
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub method: Method,
    /// DoF of the scheme this stage found, if it beat the running best.
    #[serde(with = "crate::dof_serde::option")]
    pub found: Option<Dof>,
    /// Best DoF after this stage.
    #[serde(with = "crate::dof_serde")]
    pub best: Dof,
    /// Whether some search call of this stage ran out of budget.
    pub budget_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderReport {
    pub scheme: CodingScheme,
    #[serde(with = "crate::dof_serde")]
    pub dof: Dof,
    pub bound: DofBound,
    pub stages: Vec<StageRecord>,
}

impl LadderReport {
    pub fn method(&self) -> Method {
        self.scheme.method
    }

    /// Best DoF after the last stage of the given method, if it ran.
    pub fn dof_after(&self, method: Method) -> Option<Dof> {
        self.stages
            .iter()
            .rev()
            .find(|s| s.method == method)
            .map(|s| s.best)
    }

    pub fn reaches_bound(&self) -> bool {
        self.dof == self.bound.bound()
    }
}

/// Runs the method ladder and returns the best scheme, attributed to the
/// simplest method that achieves its DoF.
pub fn best_scheme(g: &ConflictGraph, n: usize, config: &LadderConfig) -> Result<LadderReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let bound = mais(g)?;
    let mut ladder = Ladder::new(g, config, bound.mais_size)?;
    ladder.single_antenna();
    if n > 1 {
        ladder.multi_antenna(n)?;
    }
    let Ladder { best, stages, .. } = ladder;
    let mut scheme = best;
    scheme.n = n;
    debug_assert!(verify(g, &scheme, config.trials, config.seed)?.valid);
    Ok(LadderReport {
        dof: scheme.dof(),
        scheme,
        bound,
        stages,
    })
}

struct Ladder<'a> {
    g: &'a ConflictGraph,
    config: &'a LadderConfig,
    mais: usize,
    best: CodingScheme,
    stages: Vec<StageRecord>,
}

impl<'a> Ladder<'a> {
    fn new(g: &'a ConflictGraph, config: &'a LadderConfig, mais: usize) -> Result<Self> {
        let best = tdma_scheme(g)?;
        let stages = vec![StageRecord {
            method: Method::Tdma,
            found: Some(best.dof()),
            best: best.dof(),
            budget_hit: false,
        }];
        Ok(Ladder {
            g,
            config,
            mais,
            best,
            stages,
        })
    }

    fn beats(&self, b: usize, c: usize) -> bool {
        Dof::new(b as u64, c as u64) > self.best.dof()
    }

    /// Tries `C = start, start + 1, …` while `b / C` beats the running best.
    /// `attempt` returns `Ok(None)` on exhaustion and `Err(())` on a budget
    /// hit (both move on to the next `C`).
    fn climb<F>(&mut self, method: Method, b: usize, start: usize, mut attempt: F)
    where
        F: FnMut(&ConflictGraph, usize) -> std::result::Result<Option<CodingScheme>, ()>,
    {
        let mut found = None;
        let mut budget_hit = false;
        let mut c = start.max(b);
        while self.beats(b, c) {
            match attempt(self.g, c) {
                Ok(Some(scheme)) => {
                    found = Some(scheme.dof());
                    self.best = scheme;
                    break;
                }
                Ok(None) => {}
                Err(()) => budget_hit = true,
            }
            c += 1;
        }
        self.record(method, found, budget_hit);
    }

    fn record(&mut self, method: Method, found: Option<Dof>, budget_hit: bool) {
        // Several calls of one stage (different b) collapse into one record.
        if let Some(last) = self.stages.last_mut() {
            if last.method == method {
                last.found = found.or(last.found);
                last.best = self.best.dof();
                last.budget_hit |= budget_hit;
                return;
            }
        }
        self.stages.push(StageRecord {
            method,
            found,
            best: self.best.dof(),
            budget_hit,
        });
    }

    fn single_antenna(&mut self) {
        let cfg = *self.config;
        let mais = self.mais;
        if cfg.methods.osia {
            self.climb(Method::Osia, 1, mais, |g, c| {
                match local_coloring_bounded(g, c, cfg.budget) {
                    Ok(Search::Found(col)) => {
                        let colors: Vec<Vec<usize>> = col.colors.iter().map(|&x| vec![x]).collect();
                        scheme_from_coloring(g, &colors, c, 1)
                            .map(Some)
                            .map_err(|_| ())
                    }
                    Ok(Search::Exhausted) => Ok(None),
                    _ => Err(()),
                }
            });
        }
        if cfg.methods.ovia {
            for b in 2..=cfg.max_b {
                self.climb(
                    Method::Ovia,
                    b,
                    b * mais,
                    |g, c| match fractional_local_coloring_bounded(g, b, c, cfg.budget) {
                        Ok(Search::Found(colors)) => scheme_from_coloring(g, &colors, c, 1)
                            .map(Some)
                            .map_err(|_| ()),
                        Ok(Search::Exhausted) => Ok(None),
                        _ => Err(()),
                    },
                );
            }
        }
        if cfg.methods.ssia {
            self.climb(Method::Ssia, 1, mais, |g, c| search_step(g, 1, c, 1, &cfg));
        }
        if cfg.methods.svia {
            for b in 2..=cfg.max_b {
                self.climb(Method::Svia, b, b * mais, |g, c| {
                    search_step(g, b, c, 1, &cfg)
                });
            }
        }
    }

    /// Multi-antenna searches, floored by the single-antenna result (any
    /// valid single-antenna scheme stays valid with more antennas).
    fn multi_antenna(&mut self, n: usize) -> Result<()> {
        let cfg = *self.config;
        self.best.n = n;
        if cfg.methods.ssia {
            self.climb(Method::SimoScalar, 1, 1, |g, c| {
                search_step(g, 1, c, n, &cfg)
            });
        }
        if cfg.methods.simo_vector {
            for b in 2..=cfg.max_b {
                self.climb(Method::SimoVector, b, b, |g, c| {
                    search_step(g, b, c, n, &cfg)
                });
            }
        }
        Ok(())
    }
}

fn search_step(
    g: &ConflictGraph,
    b: usize,
    c: usize,
    n: usize,
    cfg: &LadderConfig,
) -> std::result::Result<Option<CodingScheme>, ()> {
    if c > BINARY_CAP {
        return Err(());
    }
    let sc = SearchConfig {
        budget: cfg.budget,
        seed: cfg.seed,
        trials: cfg.trials,
    };
    match subspace_search_with(g, b, c, n, sc) {
        Ok(Search::Found(s)) => Ok(Some(s)),
        Ok(Search::Exhausted) => Ok(None),
        _ => Err(()),
    }
}
