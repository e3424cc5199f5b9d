//! Feature graphs, exact k-clique enumeration and clique labels.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest node count supported by the bitmask adjacency.
pub const MAX_NODES: usize = 64;

/// Undirected simple graph. Edges are stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(n_nodes: usize) -> Result<Self> {
        if n_nodes == 0 || n_nodes > MAX_NODES {
            return Err(Error::Config(format!("node count must be in 1..={MAX_NODES}, got {n_nodes}")));
        }
        Ok(Self { n_nodes, edges: BTreeSet::new() })
    }

    /// Builds a graph from an edge list in any orientation. Self-loops,
    /// duplicates and out-of-range endpoints are rejected.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut graph = Self::empty(n_nodes)?;
        for (a, b) in edges {
            if a == b {
                return Err(Error::Usage(format!("self-loop on node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::Usage(format!("edge ({a}, {b}) outside {n_nodes} nodes")));
            }
            if !graph.edges.insert((a.min(b), a.max(b))) {
                return Err(Error::Usage(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(graph)
    }

    pub fn complete(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, (0..n_nodes).flat_map(|i| (i + 1..n_nodes).map(move |j| (i, j))))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n_nodes];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        crate::statevector::check_permutation(perm, self.n_nodes)?;
        Graph::new(self.n_nodes, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }
}

/// Erdős–Rényi `G(n, p)`: every pair is joined independently with
/// probability `edge_prob`. Pairs are visited in lexicographic order.
pub fn gen_er_graph(n_nodes: usize, edge_prob: f64, rng: &mut impl Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::Config(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut graph = Graph::empty(n_nodes)?;
    for i in 0..n_nodes {
        for j in i + 1..n_nodes {
            if rng.gen_bool(edge_prob) {
                graph.edges.insert((i, j));
            }
        }
    }
    Ok(graph)
}

/// All `k`-subsets whose induced subgraph is complete, each sorted, in
/// lexicographic order. `k` outside `1..=n` yields no cliques.
pub fn find_k_cliques(graph: &Graph, k: usize) -> Vec<Vec<usize>> {
    let n = graph.n_nodes;
    if k == 0 || k > n {
        return Vec::new();
    }
    let adj = graph.adjacency_masks();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let is_clique = combo.iter().enumerate().all(|(i, &a)| {
            combo[i + 1..].iter().all(|&b| adj[a] & (1 << b) != 0)
        });
        if is_clique {
            out.push(combo.clone());
        }
        // advance to the next combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    out
}

/// Per-node targets: `+1` for members of the labeled clique, `-1` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct LabelVector(Vec<i8>);

impl LabelVector {
    pub fn blank(n_nodes: usize) -> Self {
        Self(vec![-1; n_nodes])
    }

    pub fn from_members(n_nodes: usize, members: &[usize]) -> Result<Self> {
        let mut values = vec![-1; n_nodes];
        for &m in members {
            *values
                .get_mut(m)
                .ok_or_else(|| Error::Usage(format!("node {m} outside {n_nodes} nodes")))? = 1;
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| f64::from(v)).collect()
    }

    /// True when every entry is `-1`.
    pub fn is_blank(&self) -> bool {
        self.0.iter().all(|&v| v == -1)
    }

    pub fn members(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i).collect()
    }

    /// Moves the entry of node `i` to node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        crate::statevector::check_permutation(perm, self.0.len())?;
        let mut out = vec![0; self.0.len()];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = self.0[i];
        }
        Ok(Self(out))
    }

    /// Checks the label against `graph`: blank, or exactly `k` members that
    /// form a clique.
    pub fn validate(&self, graph: &Graph, k: usize) -> Result<()> {
        if self.0.len() != graph.n_nodes() {
            return Err(Error::Parse(format!(
                "label has {} entries for a {}-node graph",
                self.0.len(),
                graph.n_nodes()
            )));
        }
        if self.is_blank() {
            return Ok(());
        }
        let members = self.members();
        if members.len() != k {
            return Err(Error::Parse(format!("label marks {} nodes, expected {k}", members.len())));
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if !graph.has_edge(a, b) {
                    return Err(Error::Parse(format!("labeled nodes {a} and {b} are not adjacent")));
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<i8>> for LabelVector {
    type Error = String;

    fn try_from(values: Vec<i8>) -> std::result::Result<Self, String> {
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(format!("label entry {v} is not +1 or -1"));
        }
        Ok(Self(values))
    }
}

impl From<LabelVector> for Vec<i8> {
    fn from(label: LabelVector) -> Self {
        label.0
    }
}

/// Labels a uniformly chosen `k`-clique of `graph`, or returns the blank
/// label when there is none.
pub fn make_label(graph: &Graph, k: usize, rng: &mut impl Rng) -> LabelVector {
    let cliques = find_k_cliques(graph, k);
    label_from_cliques(graph.n_nodes(), &cliques, rng)
}

pub(crate) fn label_from_cliques(n_nodes: usize, cliques: &[Vec<usize>], rng: &mut impl Rng) -> LabelVector {
    if cliques.is_empty() {
        return LabelVector::blank(n_nodes);
    }
    let pick = &cliques[rng.gen_range(0..cliques.len())];
    let mut values = vec![-1; n_nodes];
    for &m in pick {
        values[m] = 1;
    }
    LabelVector(values)
}
