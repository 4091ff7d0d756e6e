//! File formats. Node labels are 1-based everywhere outside the crate.
//!
//! * Instances: `{"k", "topology", "m", "n"}` (topology matrix, row =
//!   destination) or `{"nodes", "edges": [[i, j], ...]}` (bare conflict graph).
//! * Schemes: `{"c", "b", "n", "method", "assignment": {"1": [[...]]}, "dof"}`.
//! * Colorings: `{"colors": {"1": 2}, "palette", "local_width"}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, TopologyMatrix};
use crate::ia::{CodingScheme, Method};
use crate::Dof;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Topology {
        k: usize,
        topology: Vec<Vec<u8>>,
        m: usize,
        n: usize,
    },
    Graph {
        nodes: usize,
        edges: Vec<[usize; 2]>,
    },
}

impl InstanceFile {
    pub fn from_graph(g: &ConflictGraph) -> Self {
        InstanceFile::Graph {
            nodes: g.node_count(),
            edges: g.labeled_edges(),
        }
    }

    pub fn from_topology(t: &TopologyMatrix) -> Self {
        InstanceFile::Topology {
            k: t.k(),
            topology: t.entries().to_vec(),
            m: t.m(),
            n: t.n(),
        }
    }

    pub fn conflict_graph(&self) -> Result<ConflictGraph> {
        match self {
            InstanceFile::Topology { k, topology, m, n } => {
                if topology.len() != *k {
                    return Err(Error::DimensionMismatch {
                        expected: *k,
                        found: topology.len(),
                    });
                }
                Ok(TopologyMatrix::new(topology.clone(), *m, *n)?.conflict_graph())
            }
            InstanceFile::Graph { nodes, edges } => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                ConflictGraph::from_labeled_edges(*nodes, &pairs)
            }
        }
    }

    /// Receive antennas recorded in the file, if any.
    pub fn antennas(&self) -> Option<usize> {
        match self {
            InstanceFile::Topology { n, .. } => Some(*n),
            InstanceFile::Graph { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub c: usize,
    pub b: usize,
    pub n: usize,
    pub method: Method,
    pub assignment: BTreeMap<usize, Vec<Vec<i64>>>,
    #[serde(with = "crate::dof_serde")]
    pub dof: Dof,
}

impl From<&CodingScheme> for SchemeFile {
    fn from(s: &CodingScheme) -> Self {
        SchemeFile {
            c: s.c,
            b: s.b,
            n: s.n,
            method: s.method,
            assignment: s
                .assignment
                .iter()
                .enumerate()
                .map(|(v, a)| (v + 1, a.clone()))
                .collect(),
            dof: s.dof(),
        }
    }
}

impl SchemeFile {
    /// The scheme for a `k`-node instance; every node 1..=k must be present.
    pub fn into_scheme(self, k: usize) -> Result<CodingScheme> {
        let mut assignment = Vec::with_capacity(k);
        for v in 1..=k {
            match self.assignment.get(&v) {
                Some(a) => assignment.push(a.clone()),
                None => return Err(Error::Unassigned(v)),
            }
        }
        if let Some(&extra) = self.assignment.keys().find(|&&v| v == 0 || v > k) {
            return Err(Error::UnknownNode(extra));
        }
        Ok(CodingScheme {
            c: self.c,
            b: self.b,
            n: self.n,
            assignment,
            method: self.method,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFile {
    pub colors: BTreeMap<usize, usize>,
    pub palette: usize,
    pub local_width: usize,
}

impl From<&Coloring> for ColoringFile {
    fn from(c: &Coloring) -> Self {
        ColoringFile {
            colors: c
                .colors
                .iter()
                .enumerate()
                .map(|(v, &x)| (v + 1, x))
                .collect(),
            palette: c.palette_size,
            local_width: c.local_width,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<ConflictGraph> {
    read_json::<InstanceFile>(path)?.conflict_graph()
}

/// Graphviz rendering; with a scheme, each node is labeled by its vectors.
pub fn to_dot(g: &ConflictGraph, scheme: Option<&CodingScheme>) -> String {
    let labels = scheme.map(|s| {
        s.assignment
            .iter()
            .map(|vectors| {
                vectors
                    .iter()
                    .map(|x| {
                        let entries: Vec<String> = x.iter().map(i64::to_string).collect();
                        format!("[{}]", entries.join(" "))
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
    });
    to_dot_labeled(g, labels.as_deref())
}

/// Graphviz rendering with `v: label` node captions (`labels[v]` for node
/// `v + 1`), or bare node ids without labels.
pub fn to_dot_labeled(g: &ConflictGraph, labels: Option<&[String]>) -> String {
    let mut out = String::from("digraph conflict {\n");
    for v in 0..g.node_count() {
        match labels.and_then(|l| l.get(v)) {
            Some(label) => {
                let _ = writeln!(out, "  {} [label=\"{}: {}\"];", v + 1, v + 1, label);
            }
            None => {
                let _ = writeln!(out, "  {};", v + 1);
            }
        }
    }
    for [i, j] in g.labeled_edges() {
        let _ = writeln!(out, "  {i} -> {j};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_formats_agree() {
        let t = r#"{"k": 3, "topology": [[1,0,1],[1,1,0],[0,0,1]], "m": 1, "n": 2}"#;
        let inst: InstanceFile = serde_json::from_str(t).unwrap();
        assert_eq!(inst.antennas(), Some(2));
        let g = inst.conflict_graph().unwrap();
        // t[0][2] = 1: source 3 interferes destination 1.
        assert_eq!(g.labeled_edges(), vec![[1, 2], [3, 1]]);
        let bare: InstanceFile =
            serde_json::from_str(r#"{"nodes": 3, "edges": [[3, 1], [1, 2]]}"#).unwrap();
        assert_eq!(bare.conflict_graph().unwrap(), g);
        assert_eq!(InstanceFile::from_graph(&g).conflict_graph().unwrap(), g);
    }

    #[test]
    fn bad_instances() {
        let zero_diag: InstanceFile =
            serde_json::from_str(r#"{"k": 2, "topology": [[0,1],[1,1]], "m": 1, "n": 1}"#).unwrap();
        assert!(zero_diag.conflict_graph().is_err());
        let unknown: InstanceFile =
            serde_json::from_str(r#"{"nodes": 2, "edges": [[1, 3]]}"#).unwrap();
        assert!(unknown.conflict_graph().is_err());
    }

    #[test]
    fn scheme_round_trip() {
        let s = CodingScheme::scalar(2, 1, vec![vec![1, 0], vec![0, 1]], Method::Osia);
        let file = SchemeFile::from(&s);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"dof\":\"1/2\""));
        assert!(text.contains("\"method\":\"OSIA\""));
        let back: SchemeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_scheme(2).unwrap(), s);
        assert!(matches!(
            file.clone().into_scheme(3),
            Err(Error::Unassigned(3))
        ));
    }

    #[test]
    fn dot_is_deterministic() {
        let g = ConflictGraph::from_labeled_edges(2, &[(1, 2)]).unwrap();
        let s = CodingScheme::scalar(2, 1, vec![vec![1, 0], vec![0, 1]], Method::Tdma);
        let dot = to_dot(&g, Some(&s));
        assert_eq!(dot, to_dot(&g, Some(&s)));
        assert!(dot.contains("1 -> 2;"));
        assert!(dot.contains("label=\"2: [0 1]\""));
    }
}
