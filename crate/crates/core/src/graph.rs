//! Topology matrices, directed message conflict graphs and the structural
//! transforms built on top of them.
//!
//! Node ids are dense `0..k` internally. Everything that crosses a file or
//! display boundary (JSON, DOT, CLI output) uses 1-based labels, which is the
//! convention of the figures these instances are drawn from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// K×K 0/1 connectivity between sources (columns) and destinations (rows),
/// together with the antenna configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyMatrix {
    k: usize,
    /// `entries[j][i]` is 1 when source `i` reaches destination `j`.
    entries: Vec<Vec<u8>>,
    m: usize,
    n: usize,
}

impl TopologyMatrix {
    pub fn new(entries: Vec<Vec<u8>>, m: usize, n: usize) -> Result<Self> {
        let k = entries.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidTopology(format!(
                "antenna counts must be positive (m = {m}, n = {n})"
            )));
        }
        for (j, row) in entries.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidTopology(format!(
                    "row {} has {} entries, expected {k}",
                    j + 1,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&x| x > 1) {
                return Err(Error::InvalidTopology(format!(
                    "entry {bad} in row {} is not binary",
                    j + 1
                )));
            }
            if row[j] != 1 {
                return Err(Error::InvalidTopology(format!(
                    "demanded link {} is missing (zero diagonal entry)",
                    j + 1
                )));
            }
        }
        Ok(TopologyMatrix { k, entries, m, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    /// Whether source `i` interferes at (or serves) destination `j`.
    pub fn get(&self, j: usize, i: usize) -> bool {
        self.entries[j][i] == 1
    }

    /// Directed edge `(i, j)` for every off-diagonal `t[j][i] = 1`.
    pub fn conflict_graph(&self) -> ConflictGraph {
        let edges = (0..self.k).flat_map(|j| {
            (0..self.k)
                .filter(move |&i| i != j && self.entries[j][i] == 1)
                .map(move |i| (i, j))
        });
        ConflictGraph::from_edges(self.k, edges).expect("topology entries are in range")
    }

    /// Inverse of [`TopologyMatrix::conflict_graph`] for single-antenna links.
    pub fn from_conflict_graph(g: &ConflictGraph, m: usize, n: usize) -> Result<Self> {
        let k = g.node_count();
        let mut entries = vec![vec![0u8; k]; k];
        for (j, row) in entries.iter_mut().enumerate() {
            row[j] = 1;
        }
        for (i, j) in g.edges() {
            entries[j][i] = 1;
        }
        TopologyMatrix::new(entries, m, n)
    }
}

/// Directed message conflict graph. Edge `(i, j)` means source `i`
/// interferes with destination `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    k: usize,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    adj: Vec<Vec<bool>>,
}

impl ConflictGraph {
    pub fn empty(k: usize) -> Self {
        ConflictGraph {
            k,
            out: vec![Vec::new(); k],
            inc: vec![Vec::new(); k],
            adj: vec![vec![false; k]; k],
        }
    }

    /// Builds a graph from 0-based ordered pairs. Duplicates are merged;
    /// self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = ConflictGraph::empty(k);
        for (i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::UnknownNode(i.max(j) + 1));
            }
            if i == j {
                return Err(Error::SelfLoop(i + 1));
            }
            g.adj[i][j] = true;
        }
        g.rebuild_lists();
        Ok(g)
    }

    /// Same as [`ConflictGraph::from_edges`] but with 1-based labels, the
    /// form used by instance files and the worked examples.
    pub fn from_labeled_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == 0 || j == 0 {
                return Err(Error::UnknownNode(0));
            }
            zero_based.push((i - 1, j - 1));
        }
        ConflictGraph::from_edges(k, zero_based)
    }

    fn rebuild_lists(&mut self) {
        for v in 0..self.k {
            self.out[v] = (0..self.k).filter(|&w| self.adj[v][w]).collect();
            self.inc[v] = (0..self.k).filter(|&w| self.adj[w][v]).collect();
        }
    }

    pub fn node_count(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (i, j)))
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    /// `N⁺(j)` when `closed` is false, `{j} ∪ N⁺(j)` otherwise. The closed
    /// form lists `j` first, then the in-neighbors ascending.
    pub fn in_neighborhood(&self, j: usize, closed: bool) -> Result<Vec<usize>> {
        if j >= self.k {
            return Err(Error::UnknownNode(j + 1));
        }
        let mut out = Vec::with_capacity(self.inc[j].len() + 1);
        if closed {
            out.push(j);
        }
        out.extend_from_slice(&self.inc[j]);
        Ok(out)
    }

    /// Closed in-neighborhood without the bounds check.
    pub(crate) fn closed_in(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(j).chain(self.inc[j].iter().copied())
    }

    pub fn complement(&self) -> ConflictGraph {
        let edges = (0..self.k).flat_map(|i| {
            (0..self.k)
                .filter(move |&j| i != j && !self.adj[i][j])
                .map(move |j| (i, j))
        });
        ConflictGraph::from_edges(self.k, edges).expect("complement stays in range")
    }

    pub fn reversed(&self) -> ConflictGraph {
        ConflictGraph::from_edges(self.k, self.edges().map(|(i, j)| (j, i)))
            .expect("reversal stays in range")
    }

    /// Subgraph induced on `nodes`; node `nodes[r]` becomes node `r`.
    pub fn induced(&self, nodes: &[usize]) -> ConflictGraph {
        let mut g = ConflictGraph::empty(nodes.len());
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate() {
                g.adj[a][b] = u != v && self.adj[u][v];
            }
        }
        g.rebuild_lists();
        g
    }

    /// Node sets of the weakly connected components, each ascending, ordered
    /// by smallest member.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        self.underlying_undirected().components()
    }

    pub fn underlying_undirected(&self) -> UndirectedGraph {
        let mut adj = vec![vec![false; self.k]; self.k];
        for (i, j) in self.edges() {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        UndirectedGraph::from_matrix(adj)
    }

    /// The b-order node splitting graph: every node becomes `b` mutually
    /// adjacent copies and every edge `(u, v)` becomes all `b²` copy pairs.
    pub fn node_split(&self, b: usize) -> Result<SplitGraph> {
        if b == 0 {
            return Err(Error::InvalidParameter(
                "split order must be at least 1".into(),
            ));
        }
        let back_map: Vec<(usize, usize)> = (0..self.k)
            .flat_map(|v| (0..b).map(move |r| (v, r)))
            .collect();
        let id = |v: usize, r: usize| v * b + r;
        let mut edges = Vec::with_capacity(self.edge_count() * b * b + self.k * b * (b - 1));
        for (u, v) in self.edges() {
            for i in 0..b {
                for j in 0..b {
                    edges.push((id(u, i), id(v, j)));
                }
            }
        }
        for v in 0..self.k {
            for i in 0..b {
                for j in 0..b {
                    if i != j {
                        edges.push((id(v, i), id(v, j)));
                    }
                }
            }
        }
        let graph = ConflictGraph::from_edges(self.k * b, edges)?;
        Ok(SplitGraph {
            base: self.clone(),
            b,
            graph,
            back_map,
        })
    }

    /// 1-based edge list, the on-disk form.
    pub fn labeled_edges(&self) -> Vec<[usize; 2]> {
        self.edges().map(|(i, j)| [i + 1, j + 1]).collect()
    }
}

/// Result of [`ConflictGraph::node_split`].
#[derive(Clone, Debug)]
pub struct SplitGraph {
    pub base: ConflictGraph,
    pub b: usize,
    pub graph: ConflictGraph,
    /// `back_map[s] = (v, r)`: split node `s` is copy `r` of base node `v`.
    pub back_map: Vec<(usize, usize)>,
}

impl SplitGraph {
    /// Collects the per-copy labels of every base node, copies in ascending
    /// `r` order.
    pub fn merge_assignment<T: Clone>(&self, split_assign: &[Option<T>]) -> Result<Vec<Vec<T>>> {
        if split_assign.len() != self.back_map.len() {
            return Err(Error::DimensionMismatch {
                expected: self.back_map.len(),
                found: split_assign.len(),
            });
        }
        let mut merged: Vec<Vec<(usize, T)>> = vec![Vec::with_capacity(self.b); self.base.k];
        for (s, label) in split_assign.iter().enumerate() {
            let (v, r) = self.back_map[s];
            let label = label.clone().ok_or(Error::Unassigned(v + 1))?;
            merged[v].push((r, label));
        }
        Ok(merged
            .into_iter()
            .map(|mut copies| {
                copies.sort_by_key(|(r, _)| *r);
                copies.into_iter().map(|(_, t)| t).collect()
            })
            .collect())
    }
}

/// Simple undirected graph, used for proper-coloring and as the C1 view of a
/// conflict graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<usize>>,
    matrix: Vec<Vec<bool>>,
}

impl UndirectedGraph {
    pub fn from_matrix(matrix: Vec<Vec<bool>>) -> Self {
        let adj = matrix
            .iter()
            .enumerate()
            .map(|(v, row)| (0..row.len()).filter(|&w| w != v && row[w]).collect())
            .collect();
        UndirectedGraph { adj, matrix }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut matrix = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u != v {
                matrix[u][v] = true;
                matrix[v][u] = true;
            }
        }
        UndirectedGraph::from_matrix(matrix)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u][v]
    }

    /// Edges `{u, v}` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn ex5() -> ConflictGraph {
        ConflictGraph::from_labeled_edges(4, &[(1, 2), (2, 3), (3, 1), (1, 4), (2, 4), (3, 4)])
            .unwrap()
    }

    fn identity(k: usize) -> Vec<Vec<u8>> {
        (0..k)
            .map(|j| (0..k).map(|i| u8::from(i == j)).collect())
            .collect()
    }

    #[test]
    fn identity_topology_has_no_edges() {
        let t = TopologyMatrix::new(identity(3), 1, 1).unwrap();
        let g = t.conflict_graph();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn all_ones_topology_is_complete() {
        let t = TopologyMatrix::new(vec![vec![1; 3]; 3], 1, 1).unwrap();
        assert_eq!(t.conflict_graph().edge_count(), 6);
    }

    #[test]
    fn topology_orientation_is_source_to_destination() {
        // Source 1 reaches destination 2: t[2][1] = 1 gives edge 1 -> 2.
        let mut e = identity(3);
        e[1][0] = 1;
        let g = TopologyMatrix::new(e, 1, 1).unwrap().conflict_graph();
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 0));
        let back = TopologyMatrix::from_conflict_graph(&g, 1, 1).unwrap();
        assert_eq!(back.conflict_graph(), g);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let mut e = identity(3);
        e[2][2] = 0;
        assert!(matches!(
            TopologyMatrix::new(e, 1, 1),
            Err(Error::InvalidTopology(_))
        ));
        assert!(TopologyMatrix::new(vec![vec![1, 2], vec![0, 1]], 1, 1).is_err());
        assert!(TopologyMatrix::new(identity(2), 0, 1).is_err());
    }

    #[test]
    fn in_neighborhoods() {
        let g = ex5();
        assert_eq!(g.in_neighborhood(3, false).unwrap(), vec![0, 1, 2]);
        let empty = ConflictGraph::empty(2);
        assert!(empty.in_neighborhood(1, false).unwrap().is_empty());
        assert_eq!(empty.in_neighborhood(1, true).unwrap(), vec![1]);
        let full = ConflictGraph::empty(4).complement();
        let mut closed = full.in_neighborhood(0, true).unwrap();
        closed.sort_unstable();
        assert_eq!(closed, vec![0, 1, 2, 3]);
        assert!(matches!(
            g.in_neighborhood(4, true),
            Err(Error::UnknownNode(5))
        ));
    }

    #[test]
    fn complement_of_ex5() {
        let gc = ex5().complement();
        let mut expected: Vec<[usize; 2]> = vec![[2, 1], [3, 2], [1, 3], [4, 1], [4, 2], [4, 3]];
        expected.sort_unstable();
        assert_eq!(gc.labeled_edges(), expected);
        assert_eq!(ConflictGraph::empty(5).complement().edge_count(), 20);
    }

    #[test]
    fn split_single_edge() {
        let g = ConflictGraph::from_edges(2, [(0, 1)]).unwrap();
        let sg = g.node_split(2).unwrap();
        assert_eq!(sg.graph.node_count(), 4);
        assert_eq!(sg.graph.edge_count(), 8);
        assert_eq!(sg.back_map, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn split_order_one_is_identity() {
        let g = ex5();
        let sg = g.node_split(1).unwrap();
        assert_eq!(sg.graph, g);
        let labels: Vec<Option<usize>> = (0..4).map(Some).collect();
        assert_eq!(
            sg.merge_assignment(&labels).unwrap(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
    }

    #[test]
    fn merge_orders_copies() {
        let g = ConflictGraph::empty(2);
        let sg = g.node_split(2).unwrap();
        let merged = sg
            .merge_assignment(&[Some(3), Some(5), Some(1), Some(2)])
            .unwrap();
        assert_eq!(merged, vec![vec![3, 5], vec![1, 2]]);
        assert!(matches!(
            sg.merge_assignment(&[Some(3), None, Some(1), Some(2)]),
            Err(Error::Unassigned(1))
        ));
    }

    #[test]
    fn undirected_projection() {
        let u = ex5().underlying_undirected();
        assert_eq!(u.edge_count(), 6);
        let pair = ConflictGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(pair.underlying_undirected().edge_count(), 1);
        assert_eq!(
            ConflictGraph::empty(3).underlying_undirected().edge_count(),
            0
        );
    }
}
