//! Proper, local and fractional local colorings.
//!
//! Colors are 1-based throughout. A *local* coloring of a digraph is a proper
//! coloring of its underlying undirected graph; its width is the largest
//! number of distinct colors inside any closed in-neighborhood. Fractional
//! (b-fold) local colorings are obtained by local-coloring the b-order split
//! graph and merging the copies back.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, UndirectedGraph};

/// Node cap for [`chromatic_number`].
pub const CHROMATIC_CAP: usize = 40;
/// Node cap for [`local_coloring_exact`] (split graphs included).
pub const LOCAL_CAP: usize = 64;

/// Outcome of a bounded exact search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// The search space was exhausted: no solution exists.
    Exhausted,
    /// The node budget ran out before a verdict.
    BudgetHit,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::Exhausted => Search::Exhausted,
            Search::BudgetHit => Search::BudgetHit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    /// `colors[v]` is the 1-based color of node `v`.
    pub colors: Vec<usize>,
    pub palette_size: usize,
    pub local_width: usize,
}

impl Coloring {
    /// Coloring of a conflict graph; width measured on closed
    /// in-neighborhoods.
    pub fn for_digraph(g: &ConflictGraph, colors: Vec<usize>) -> Self {
        let local_width = local_width(g, &colors);
        let palette_size = colors.iter().copied().max().unwrap_or(0);
        Coloring {
            colors,
            palette_size,
            local_width,
        }
    }

    /// Coloring of an undirected graph; width measured on closed
    /// neighborhoods (the bidirected reading of the graph).
    pub fn for_undirected(u: &UndirectedGraph, colors: Vec<usize>) -> Self {
        let local_width = (0..u.node_count())
            .map(|v| {
                let mut seen: Vec<usize> = u.neighbors(v).iter().map(|&w| colors[w]).collect();
                seen.push(colors[v]);
                seen.sort_unstable();
                seen.dedup();
                seen.len()
            })
            .max()
            .unwrap_or(0);
        let palette_size = colors.iter().copied().max().unwrap_or(0);
        Coloring {
            colors,
            palette_size,
            local_width,
        }
    }

    pub fn distinct_colors(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

pub fn is_proper(u: &UndirectedGraph, colors: &[usize]) -> bool {
    colors.len() == u.node_count()
        && colors.iter().all(|&c| c >= 1)
        && u.edges().all(|(a, b)| colors[a] != colors[b])
}

/// Largest number of distinct colors in a closed in-neighborhood.
pub fn local_width(g: &ConflictGraph, colors: &[usize]) -> usize {
    (0..g.node_count())
        .map(|j| {
            let mut seen: Vec<usize> = g.closed_in(j).map(|v| colors[v]).collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
        .max()
        .unwrap_or(0)
}

/// Largest number of distinct colors in a closed in-neighborhood when every
/// node carries a set of colors.
pub fn fractional_local_width(g: &ConflictGraph, colors: &[Vec<usize>]) -> usize {
    (0..g.node_count())
        .map(|j| {
            let mut seen: Vec<usize> = g
                .closed_in(j)
                .flat_map(|v| colors[v].iter().copied())
                .collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
        .max()
        .unwrap_or(0)
}

/// Smallest-last ordering: repeatedly remove a minimum-degree node (ties
/// broken at random); the coloring order is the reverse removal order.
pub fn smallest_last_order(u: &UndirectedGraph, rng: &mut impl Rng) -> Vec<usize> {
    let n = u.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| u.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    for _ in 0..n {
        let min = (0..n)
            .filter(|&v| !removed[v])
            .map(|v| degree[v])
            .min()
            .expect("node left");
        let ties: Vec<usize> = (0..n)
            .filter(|&v| !removed[v] && degree[v] == min)
            .collect();
        let v = *ties.choose(rng).expect("nonempty");
        removed[v] = true;
        removal.push(v);
        for &w in u.neighbors(v) {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    removal.reverse();
    removal
}

/// Smallest-last greedy coloring with two-color (Kempe chain) interchange.
pub fn sli_greedy(u: &UndirectedGraph, seed: u64) -> Coloring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = smallest_last_order(u, &mut rng);
    let n = u.node_count();
    let mut colors = vec![0usize; n];
    let mut k = 0;
    for v in order {
        let mut used = vec![false; k + 2];
        for &w in u.neighbors(v) {
            used[colors[w]] = true;
        }
        if let Some(c) = (1..=k).find(|&c| !used[c]) {
            colors[v] = c;
            continue;
        }
        if let Some(c) = try_interchange(u, &mut colors, v, k) {
            colors[v] = c;
        } else {
            k += 1;
            colors[v] = k;
        }
    }
    Coloring::for_undirected(u, colors)
}

/// Frees a color for `v` by swapping colors `a`/`b` on the Kempe chains
/// through `v`'s `a`-colored neighbors, when none of those chains reaches a
/// `b`-colored neighbor of `v`.
fn try_interchange(u: &UndirectedGraph, colors: &mut [usize], v: usize, k: usize) -> Option<usize> {
    for a in 1..=k {
        for b in 1..=k {
            if a == b {
                continue;
            }
            let starts: Vec<usize> = u
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| colors[w] == a)
                .collect();
            let mut in_chain = vec![false; u.node_count()];
            let mut chain = Vec::new();
            for &s in &starts {
                if in_chain[s] {
                    continue;
                }
                in_chain[s] = true;
                let mut stack = vec![s];
                while let Some(x) = stack.pop() {
                    chain.push(x);
                    for &y in u.neighbors(x) {
                        if !in_chain[y] && (colors[y] == a || colors[y] == b) {
                            in_chain[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            let blocked = u
                .neighbors(v)
                .iter()
                .any(|&w| colors[w] == b && in_chain[w]);
            if !blocked {
                for x in chain {
                    colors[x] = if colors[x] == a { b } else { a };
                }
                return Some(a);
            }
        }
    }
    None
}

/// TabuCol: tabu search over k-colorings minimizing the number of
/// conflicting edges. `None` when `max_iter` moves do not reach zero
/// conflicts.
pub fn tabucol(u: &UndirectedGraph, k: usize, max_iter: usize, seed: u64) -> Option<Coloring> {
    assert!(k >= 1, "tabucol needs at least one color");
    let n = u.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // gamma[v][c]: neighbors of v currently colored c.
    let mut gamma = vec![vec![0usize; k]; n];
    for v in 0..n {
        for &w in u.neighbors(v) {
            gamma[v][colors[w]] += 1;
        }
    }
    let mut conflicts: usize = u.edges().filter(|&(a, b)| colors[a] == colors[b]).count();
    let mut best_conflicts = conflicts;
    let mut tabu = vec![vec![0usize; k]; n];

    for iter in 0..max_iter {
        if conflicts == 0 {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        let mut best_delta = i64::MAX;
        let mut ties = 0u32;
        for v in 0..n {
            let own = gamma[v][colors[v]];
            if own == 0 {
                continue;
            }
            for c in 0..k {
                if c == colors[v] {
                    continue;
                }
                let delta = gamma[v][c] as i64 - own as i64;
                let aspiration = (conflicts as i64 + delta) < best_conflicts as i64;
                if tabu[v][c] > iter && !aspiration {
                    continue;
                }
                if delta < best_delta {
                    best_delta = delta;
                    best = Some((v, c));
                    ties = 1;
                } else if delta == best_delta {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = Some((v, c));
                    }
                }
            }
        }
        let (v, c) = match best {
            Some(m) => m,
            None => {
                // Every move is tabu: take a random conflicting recolor.
                let conflicted: Vec<usize> = (0..n).filter(|&v| gamma[v][colors[v]] > 0).collect();
                let v = *conflicted.choose(&mut rng).expect("conflicts > 0");
                let c = (colors[v] + rng.gen_range(1..k.max(2))) % k;
                if c == colors[v] {
                    continue;
                }
                best_delta = gamma[v][c] as i64 - gamma[v][colors[v]] as i64;
                (v, c)
            }
        };
        let old = colors[v];
        colors[v] = c;
        conflicts = (conflicts as i64 + best_delta) as usize;
        for &w in u.neighbors(v) {
            gamma[w][old] -= 1;
            gamma[w][c] += 1;
        }
        let tenure = (0.6 * conflicts as f64) as usize + rng.gen_range(0..=9);
        tabu[v][old] = iter + 1 + tenure;
        best_conflicts = best_conflicts.min(conflicts);
    }
    (conflicts == 0)
        .then(|| Coloring::for_undirected(u, colors.into_iter().map(|c| c + 1).collect()))
}

/// Greedy clique lower bound: extend from every start node by repeatedly
/// adding the candidate with the most candidate neighbors.
pub fn greedy_clique(u: &UndirectedGraph) -> Vec<usize> {
    let n = u.node_count();
    let mut best = Vec::new();
    for start in 0..n {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = u.neighbors(start).to_vec();
        while !cand.is_empty() {
            let &next = cand
                .iter()
                .max_by_key(|&&x| {
                    (
                        cand.iter().filter(|&&y| u.adjacent(x, y)).count(),
                        usize::MAX - x,
                    )
                })
                .expect("nonempty");
            clique.push(next);
            cand.retain(|&y| y != next && u.adjacent(next, y));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// DSATUR backtracking for a proper coloring with at most `k` colors.
pub fn k_coloring(u: &UndirectedGraph, k: usize) -> Option<Vec<usize>> {
    let n = u.node_count();
    let mut colors = vec![0usize; n];
    fn rec(
        u: &UndirectedGraph,
        k: usize,
        colors: &mut Vec<usize>,
        colored: usize,
        max_used: usize,
    ) -> bool {
        let n = u.node_count();
        if colored == n {
            return true;
        }
        // Max saturation, then max degree among uncolored, then lowest index.
        let mut pick = None;
        let mut key = (0usize, 0usize);
        for v in (0..n).filter(|&v| colors[v] == 0) {
            let mut sat: Vec<usize> = u
                .neighbors(v)
                .iter()
                .map(|&w| colors[w])
                .filter(|&c| c > 0)
                .collect();
            sat.sort_unstable();
            sat.dedup();
            let deg = u.neighbors(v).iter().filter(|&&w| colors[w] == 0).count();
            if pick.is_none() || (sat.len(), deg) > key {
                pick = Some(v);
                key = (sat.len(), deg);
            }
        }
        let v = pick.expect("uncolored node");
        for c in 1..=(max_used + 1).min(k) {
            if u.neighbors(v).iter().any(|&w| colors[w] == c) {
                continue;
            }
            colors[v] = c;
            if rec(u, k, colors, colored + 1, max_used.max(c)) {
                return true;
            }
            colors[v] = 0;
        }
        false
    }
    if n == 0 {
        return Some(colors);
    }
    if k == 0 {
        return None;
    }
    rec(u, k, &mut colors, 0, 0).then_some(colors)
}

/// An optimal proper coloring: clique lower bound, SLI upper bound and
/// DSATUR backtracking for each k in between.
pub fn chromatic_coloring(u: &UndirectedGraph) -> Result<Coloring> {
    let n = u.node_count();
    if n > CHROMATIC_CAP {
        return Err(Error::OverCap {
            size: n,
            cap: CHROMATIC_CAP,
        });
    }
    if n == 0 {
        return Ok(Coloring::for_undirected(u, Vec::new()));
    }
    let upper = sli_greedy(u, 0);
    let lower = greedy_clique(u).len().max(1);
    for k in lower..upper.palette_size {
        if let Some(colors) = k_coloring(u, k) {
            return Ok(Coloring::for_undirected(u, colors));
        }
    }
    Ok(upper)
}

pub fn chromatic_number(u: &UndirectedGraph) -> Result<usize> {
    Ok(chromatic_coloring(u)?.palette_size)
}

/// Exact local coloring at a fixed width: a proper coloring of the
/// underlying undirected graph with at most `c_target` distinct colors in
/// every closed in-neighborhood.
pub fn local_coloring_exact(g: &ConflictGraph, c_target: usize) -> Result<Search<Coloring>> {
    local_coloring_bounded(g, c_target, None)
}

/// [`local_coloring_exact`] with an optional cap on search nodes.
pub fn local_coloring_bounded(
    g: &ConflictGraph,
    c_target: usize,
    budget: Option<u64>,
) -> Result<Search<Coloring>> {
    let k = g.node_count();
    if k > LOCAL_CAP {
        return Err(Error::OverCap {
            size: k,
            cap: LOCAL_CAP,
        });
    }
    if c_target == 0 {
        return Err(Error::InvalidParameter(
            "local width target must be at least 1".into(),
        ));
    }
    let mut colors = vec![0usize; k];
    let mut budget = budget;
    // Components never constrain each other.
    for comp in g.weak_components() {
        let sub = g.induced(&comp);
        match LocalSearch::new(&sub, c_target).solve(&mut budget) {
            Search::Found(sub_colors) => {
                for (r, &v) in comp.iter().enumerate() {
                    colors[v] = sub_colors[r];
                }
            }
            Search::Exhausted => return Ok(Search::Exhausted),
            Search::BudgetHit => return Ok(Search::BudgetHit),
        }
    }
    Ok(Search::Found(Coloring::for_digraph(g, colors)))
}

struct LocalSearch<'a> {
    g: &'a ConflictGraph,
    u: UndirectedGraph,
    target: usize,
    colors: Vec<usize>,
    /// `count[j][c]`: nodes of color `c` in the closed in-neighborhood of `j`.
    count: Vec<Vec<usize>>,
    distinct: Vec<usize>,
}

impl<'a> LocalSearch<'a> {
    fn new(g: &'a ConflictGraph, target: usize) -> Self {
        let k = g.node_count();
        LocalSearch {
            g,
            u: g.underlying_undirected(),
            target,
            colors: vec![0; k],
            count: vec![vec![0; k + 2]; k],
            distinct: vec![0; k],
        }
    }

    fn solve(mut self, budget: &mut Option<u64>) -> Search<Vec<usize>> {
        match self.rec(0, 0, budget) {
            Some(true) => Search::Found(self.colors),
            Some(false) => Search::Exhausted,
            None => Search::BudgetHit,
        }
    }

    /// Nodes whose closed in-neighborhood contains `v`.
    fn watchers(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(v).chain(self.g.out_neighbors(v).iter().copied())
    }

    fn place(&mut self, v: usize, c: usize) -> bool {
        self.colors[v] = c;
        let mut ok = true;
        let watchers: Vec<usize> = self.watchers(v).collect();
        for j in watchers {
            self.count[j][c] += 1;
            if self.count[j][c] == 1 {
                self.distinct[j] += 1;
                if self.distinct[j] > self.target {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unplace(&mut self, v: usize) {
        let c = self.colors[v];
        let watchers: Vec<usize> = self.watchers(v).collect();
        for j in watchers {
            self.count[j][c] -= 1;
            if self.count[j][c] == 0 {
                self.distinct[j] -= 1;
            }
        }
        self.colors[v] = 0;
    }

    fn rec(&mut self, colored: usize, max_used: usize, budget: &mut Option<u64>) -> Option<bool> {
        let k = self.g.node_count();
        if colored == k {
            return Some(true);
        }
        if let Some(b) = budget {
            if *b == 0 {
                return None;
            }
            *b -= 1;
        }
        let mut pick = None;
        let mut key = (0usize, 0usize);
        for v in (0..k).filter(|&v| self.colors[v] == 0) {
            let mut sat: Vec<usize> = self
                .u
                .neighbors(v)
                .iter()
                .map(|&w| self.colors[w])
                .filter(|&c| c > 0)
                .collect();
            sat.sort_unstable();
            sat.dedup();
            let key_v = (sat.len(), self.u.degree(v));
            if pick.is_none() || key_v > key {
                pick = Some(v);
                key = key_v;
            }
        }
        let v = pick.expect("uncolored node");
        for c in 1..=(max_used + 1).min(k) {
            if self.u.neighbors(v).iter().any(|&w| self.colors[w] == c) {
                continue;
            }
            let ok = self.place(v, c);
            if ok {
                match self.rec(colored + 1, max_used.max(c), budget) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => {
                        self.unplace(v);
                        return None;
                    }
                }
            }
            self.unplace(v);
        }
        Some(false)
    }
}

/// b-fold local coloring of width `c_target`: local coloring of the b-order
/// split graph merged back, each node receiving `b` distinct colors.
pub fn fractional_local_coloring(
    g: &ConflictGraph,
    b: usize,
    c_target: usize,
) -> Result<Search<Vec<Vec<usize>>>> {
    fractional_local_coloring_bounded(g, b, c_target, None)
}

pub fn fractional_local_coloring_bounded(
    g: &ConflictGraph,
    b: usize,
    c_target: usize,
    budget: Option<u64>,
) -> Result<Search<Vec<Vec<usize>>>> {
    let split = g.node_split(b)?;
    match local_coloring_bounded(&split.graph, c_target, budget)? {
        Search::Found(col) => {
            let labels: Vec<Option<usize>> = col.colors.into_iter().map(Some).collect();
            Ok(Search::Found(split.merge_assignment(&labels)?))
        }
        Search::Exhausted => Ok(Search::Exhausted),
        Search::BudgetHit => Ok(Search::BudgetHit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> UndirectedGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        UndirectedGraph::from_edges(n, &edges)
    }

    fn complete(n: usize) -> UndirectedGraph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        UndirectedGraph::from_edges(n, &edges)
    }

    fn bidirected(u: &UndirectedGraph) -> ConflictGraph {
        ConflictGraph::from_edges(
            u.node_count(),
            u.edges().flat_map(|(a, b)| [(a, b), (b, a)]),
        )
        .unwrap()
    }

    fn random_undirected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> UndirectedGraph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        UndirectedGraph::from_edges(n, &edges)
    }

    /// Exhaustive chromatic number for tiny graphs.
    fn brute_chromatic(u: &UndirectedGraph) -> usize {
        let n = u.node_count();
        for k in 1..=n {
            let total = k.pow(n as u32);
            for code in 0..total {
                let colors: Vec<usize> = (0..n).map(|v| code / k.pow(v as u32) % k + 1).collect();
                if is_proper(u, &colors) {
                    return k;
                }
            }
        }
        0
    }

    #[test]
    fn sli_small_graphs() {
        let path = UndirectedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = sli_greedy(&path, 1);
        assert!(is_proper(&path, &c.colors));
        assert_eq!(c.palette_size, 2);
        let c5 = sli_greedy(&cycle(5), 2);
        assert!(is_proper(&cycle(5), &c5.colors));
        assert_eq!(c5.palette_size, 3);
    }

    #[test]
    fn sli_within_clique_and_degree_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..5 {
            let u = random_undirected(&mut rng, 100, 0.1);
            let c = sli_greedy(&u, seed);
            assert!(is_proper(&u, &c.colors));
            let max_deg = (0..100).map(|v| u.degree(v)).max().unwrap();
            assert!(c.palette_size >= greedy_clique(&u).len());
            assert!(c.palette_size <= max_deg + 1);
        }
    }

    #[test]
    fn tabucol_cases() {
        let c5 = cycle(5);
        let col = tabucol(&c5, 3, 1000, 7).expect("C5 is 3-colorable");
        assert!(is_proper(&c5, &col.colors));
        assert!(tabucol(&c5, 2, 5000, 7).is_none());
        let k4 = complete(4);
        for seed in 0..10 {
            assert!(tabucol(&k4, 4, 50, seed).is_some());
        }
    }

    #[test]
    fn chromatic_numbers() {
        assert_eq!(chromatic_number(&complete(4)).unwrap(), 4);
        assert_eq!(chromatic_number(&cycle(5)).unwrap(), 3);
        assert_eq!(chromatic_number(&cycle(6)).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // Random bipartite graph.
        let edges: Vec<(usize, usize)> = (0..6)
            .flat_map(|i| (6..12).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let bip = UndirectedGraph::from_edges(12, &edges);
        assert_eq!(chromatic_number(&bip).unwrap(), 2);
        assert!(chromatic_number(&UndirectedGraph::from_edges(41, &[])).is_err());
    }

    #[test]
    fn chromatic_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let n = rng.gen_range(1..=7);
            let u = random_undirected(&mut rng, n, 0.5);
            let col = chromatic_coloring(&u).unwrap();
            assert!(is_proper(&u, &col.colors));
            assert_eq!(col.palette_size, brute_chromatic(&u));
        }
    }

    #[test]
    fn local_coloring_of_cliques_and_odd_cycles() {
        let k4 = bidirected(&complete(4));
        assert_eq!(local_coloring_exact(&k4, 3).unwrap(), Search::Exhausted);
        let col = local_coloring_exact(&k4, 4).unwrap().found().unwrap();
        assert_eq!(col.local_width, 4);
        let c5 = bidirected(&cycle(5));
        assert_eq!(local_coloring_exact(&c5, 2).unwrap(), Search::Exhausted);
        assert!(local_coloring_exact(&c5, 3).unwrap().is_found());
    }

    #[test]
    fn local_coloring_monotone_in_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let k = rng.gen_range(2..=8);
            let edges: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j)
                .filter(|_| rng.gen_bool(0.35))
                .collect();
            let g = ConflictGraph::from_edges(k, edges).unwrap();
            let mut feasible_seen = false;
            for w in 1..=k {
                match local_coloring_exact(&g, w).unwrap() {
                    Search::Found(col) => {
                        feasible_seen = true;
                        assert!(is_proper(&g.underlying_undirected(), &col.colors));
                        assert!(col.local_width <= w);
                    }
                    _ => assert!(!feasible_seen, "infeasible above a feasible width"),
                }
            }
            assert!(feasible_seen);
        }
    }

    #[test]
    fn fractional_b1_is_local_coloring() {
        let c5 = bidirected(&cycle(5));
        let frac = fractional_local_coloring(&c5, 1, 3)
            .unwrap()
            .found()
            .unwrap();
        let plain = local_coloring_exact(&c5, 3).unwrap().found().unwrap();
        let flat: Vec<usize> = frac.iter().map(|c| c[0]).collect();
        assert_eq!(flat, plain.colors);
    }

    #[test]
    fn fractional_pentagon_two_fold() {
        let c5 = bidirected(&cycle(5));
        let frac = fractional_local_coloring(&c5, 2, 5)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(fractional_local_width(&c5, &frac), 5);
        for (v, cols) in frac.iter().enumerate() {
            assert_ne!(cols[0], cols[1]);
            for &w in c5.out_neighbors(v) {
                assert!(cols.iter().all(|c| !frac[w].contains(c)));
            }
        }
        assert_eq!(
            fractional_local_coloring(&c5, 2, 4).unwrap(),
            Search::Exhausted
        );
    }
}
