//! The maximum-acyclic-induced-subgraph (MAIS) outer bound.
//!
//! The symmetric DoF of a SISO instance with conflict graph `G` is at most
//! `1 / MAIS(G_c)`, where `G_c` is the complement of `G`. MAIS is computed
//! exactly by branching on the nodes of a cycle, i.e. as `K` minus a minimum
//! directed feedback vertex set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::Dof;

/// Default node cap for the exact search.
pub const MAIS_CAP: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofBound {
    pub mais_size: usize,
    /// Nodes (0-based) inducing an acyclic subgraph of the complement;
    /// lexicographically smallest among the maximum ones.
    pub witness: Vec<usize>,
}

impl DofBound {
    pub fn bound(&self) -> Dof {
        Dof::new(1, self.mais_size as u64)
    }

    /// Smallest `C ≥ b` with `b / C` at or below the bound.
    pub fn initial_c(&self, b: usize) -> usize {
        b.max(b * self.mais_size)
    }
}

type Mask = u64;

fn bit(v: usize) -> Mask {
    1 << v
}

fn members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&v| mask & bit(v) != 0)
}

struct Search {
    out: Vec<Mask>,
}

impl Search {
    fn new(h: &ConflictGraph) -> Self {
        let out = (0..h.node_count())
            .map(|v| h.out_neighbors(v).iter().fold(0, |m, &w| m | bit(w)))
            .collect();
        Search { out }
    }

    /// A directed cycle inside `alive` (preferring 2-cycles), as a node list.
    fn find_cycle(&self, alive: Mask) -> Option<Vec<usize>> {
        for u in members(alive) {
            let mutual = self.out[u] & alive & !((bit(u) << 1) - 1);
            for v in members(mutual) {
                if self.out[v] & bit(u) != 0 {
                    return Some(vec![u, v]);
                }
            }
        }
        // Iterative DFS with an explicit path for cycle recovery.
        let mut state = [0u8; 64]; // 0 = new, 1 = on stack, 2 = done
        for root in members(alive) {
            if state[root] != 0 {
                continue;
            }
            let mut path: Vec<(usize, Mask)> = vec![(root, self.out[root] & alive)];
            state[root] = 1;
            while let Some((v, pending)) = path.last_mut() {
                let v = *v;
                if *pending == 0 {
                    state[v] = 2;
                    path.pop();
                    continue;
                }
                let w = pending.trailing_zeros() as usize;
                *pending &= !bit(w);
                match state[w] {
                    0 => {
                        state[w] = 1;
                        path.push((w, self.out[w] & alive));
                    }
                    1 => {
                        let start = path.iter().position(|&(x, _)| x == w).expect("on stack");
                        return Some(path[start..].iter().map(|&(x, _)| x).collect());
                    }
                    _ => {}
                }
            }
        }
        None
    }

    /// Improves `best` with any acyclic subset of `alive` containing
    /// `keep` that is strictly larger than `best.0`.
    fn run(&self, alive: Mask, keep: Mask, best: &mut (usize, Mask)) {
        if alive.count_ones() as usize <= best.0 {
            return;
        }
        match self.find_cycle(alive) {
            None => *best = (alive.count_ones() as usize, alive),
            Some(cycle) => {
                if alive.count_ones() as usize - 1 <= best.0 {
                    return;
                }
                let mut keep = keep;
                for v in cycle {
                    if keep & bit(v) != 0 {
                        continue;
                    }
                    self.run(alive & !bit(v), keep, best);
                    keep |= bit(v);
                }
            }
        }
    }
}

/// Exact MAIS of the complement of `g`.
pub fn mais(g: &ConflictGraph) -> Result<DofBound> {
    mais_with_cap(g, MAIS_CAP)
}

pub fn mais_with_cap(g: &ConflictGraph, cap: usize) -> Result<DofBound> {
    let k = g.node_count();
    if k > cap.min(64) {
        return Err(Error::OverCap { size: k, cap });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("MAIS of an empty instance".into()));
    }
    let search = Search::new(&g.complement());
    let all: Mask = if k == 64 { !0 } else { bit(k) - 1 };
    let mut best = (0, 0);
    search.run(all, 0, &mut best);
    let size = best.0;

    // Lexicographically smallest maximum witness, fixed greedily.
    let mut keep: Mask = 0;
    let mut drop: Mask = 0;
    for v in 0..k {
        if keep.count_ones() as usize == size {
            break;
        }
        let mut probe = (size - 1, 0);
        search.run(all & !drop, keep | bit(v), &mut probe);
        if probe.0 == size && probe.1 & (keep | bit(v)) == keep | bit(v) {
            keep |= bit(v);
        } else {
            drop |= bit(v);
        }
    }
    debug_assert_eq!(keep.count_ones() as usize, size);
    Ok(DofBound {
        mais_size: size,
        witness: members(keep).collect(),
    })
}

/// The smallest `C ≥ b` with `b / C ≤ 1 / MAIS`.
pub fn select_initial_c(g: &ConflictGraph, b: usize) -> Result<usize> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be at least 1".into()));
    }
    Ok(mais(g)?.initial_c(b))
}

/// Whether `nodes` induce an acyclic subgraph of `h` (Kahn's algorithm).
pub fn is_acyclic_induced(h: &ConflictGraph, nodes: &[usize]) -> bool {
    let sub = h.induced(nodes);
    let mut indeg: Vec<usize> = (0..sub.node_count()).map(|v| sub.in_degree(v)).collect();
    let mut queue: Vec<usize> = (0..sub.node_count()).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in sub.out_neighbors(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    seen == sub.node_count()
}
