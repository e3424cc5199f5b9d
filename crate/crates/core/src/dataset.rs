//! Balanced clique datasets and their line-delimited JSON file format.
//!
//! File layout, one JSON object per line:
//!
//! ```text
//! {"format":"clique-dataset","version":1,"n_nodes":6,"k":4,"seed":1,"size":3000,"edge_prob_range":[0.3,0.9]}
//! {"n_nodes":6,"edges":[[0,1],[0,2],...],"label":[1,1,-1,1,1,-1],"edge_prob":0.7431...}
//! ...
//! ```
//!
//! The header is followed by exactly `size` records. Edge pairs are sorted
//! with the smaller endpoint first; floats are written in shortest
//! round-trip form so a write/read cycle is lossless.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{find_k_cliques, gen_er_graph, label_from_cliques, Graph, LabelVector};

pub const FORMAT_TAG: &str = "clique-dataset";
pub const FORMAT_VERSION: u32 = 1;

/// Per-graph edge probabilities are drawn uniformly from this interval.
pub const DEFAULT_EDGE_PROB_RANGE: (f64, f64) = (0.3, 0.9);

/// Draw budget per requested item before generation gives up.
pub const DRAWS_PER_ITEM: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub graph: Graph,
    pub label: LabelVector,
    pub edge_prob: f64,
}

/// Items alternate clique-bearing / blank, starting with a clique-bearing
/// one, so every even-length prefix is balanced.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_nodes: usize,
    pub k: usize,
    pub seed: u64,
    pub edge_prob_range: (f64, f64),
    pub items: Vec<Item>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `(clique-bearing, blank)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let blank = self.items.iter().filter(|it| it.label.is_blank()).count();
        (self.items.len() - blank, blank)
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        let header = Header {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            n_nodes: self.n_nodes,
            k: self.k,
            seed: self.seed,
            size: self.items.len(),
            edge_prob_range: [self.edge_prob_range.0, self.edge_prob_range.1],
        };
        serde_json::to_writer(&mut out, &header).map_err(json_err)?;
        out.write_all(b"\n")?;
        for item in &self.items {
            let record = Record {
                n_nodes: item.graph.n_nodes(),
                edges: item.graph.edges().map(|(a, b)| [a, b]).collect(),
                label: item.label.clone(),
                edge_prob: item.edge_prob,
            };
            serde_json::to_writer(&mut out, &record).map_err(json_err)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses and validates a dataset file. Every label is checked against
    /// its graph.
    pub fn read_jsonl(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
            Ok(l) => !l.trim().is_empty(),
            Err(_) => true,
        });
        let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty dataset file".into()))?;
        let header: Header = serde_json::from_str(&first?)
            .map_err(|e| Error::Parse(format!("line 1: bad header: {e}")))?;
        if header.format != FORMAT_TAG || header.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "line 1: unsupported format {} v{}",
                header.format, header.version
            )));
        }
        let mut items = Vec::with_capacity(header.size);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let record: Record = serde_json::from_str(&line?)
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            if record.n_nodes != header.n_nodes {
                return Err(Error::Parse(format!(
                    "line {lineno}: graph has {} nodes, header says {}",
                    record.n_nodes, header.n_nodes
                )));
            }
            let graph = Graph::new(record.n_nodes, record.edges.iter().map(|e| (e[0], e[1])))
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            record
                .label
                .validate(&graph, header.k)
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            items.push(Item { graph, label: record.label, edge_prob: record.edge_prob });
        }
        if items.len() != header.size {
            return Err(Error::Parse(format!(
                "header announces {} records, found {}",
                header.size,
                items.len()
            )));
        }
        Ok(Self {
            n_nodes: header.n_nodes,
            k: header.k,
            seed: header.seed,
            edge_prob_range: (header.edge_prob_range[0], header.edge_prob_range[1]),
            items,
        })
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    n_nodes: usize,
    k: usize,
    seed: u64,
    size: usize,
    edge_prob_range: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct Record {
    n_nodes: usize,
    edges: Vec<[usize; 2]>,
    label: LabelVector,
    edge_prob: f64,
}

pub(crate) fn check_edge_prob_range(range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::Config(format!("edge probability range [{lo}, {hi}] is not inside [0, 1]")));
    }
    Ok(())
}

/// Rejection-samples `size` labeled graphs, half with a `k`-clique and half
/// without (the clique-bearing half gets the extra item when `size` is odd).
pub fn build_dataset(
    n_nodes: usize,
    k: usize,
    size: usize,
    edge_prob_range: (f64, f64),
    seed: u64,
) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = sample_balanced(n_nodes, k, size, edge_prob_range, &mut rng)?;
    Ok(Dataset { n_nodes, k, seed, edge_prob_range, items })
}

pub(crate) fn sample_balanced(
    n_nodes: usize,
    k: usize,
    size: usize,
    edge_prob_range: (f64, f64),
    rng: &mut impl Rng,
) -> Result<Vec<Item>> {
    if k == 0 || k > n_nodes {
        return Err(Error::Config(format!("clique size {k} must be in 1..={n_nodes}")));
    }
    check_edge_prob_range(edge_prob_range)?;
    let want_clique = size.div_ceil(2);
    let want_blank = size / 2;
    let mut with_clique = Vec::with_capacity(want_clique);
    let mut blank = Vec::with_capacity(want_blank);
    let budget = size.saturating_mul(DRAWS_PER_ITEM);
    let mut draws = 0;
    while with_clique.len() < want_clique || blank.len() < want_blank {
        if draws == budget {
            return Err(Error::Generation(format!(
                "gave up after {draws} draws with {}/{want_clique} clique-bearing and {}/{want_blank} \
                 blank graphs; try adjusting the edge probability range",
                with_clique.len(),
                blank.len()
            )));
        }
        draws += 1;
        let (lo, hi) = edge_prob_range;
        let edge_prob = if lo == hi { lo } else { rng.gen_range(lo..hi) };
        let graph = gen_er_graph(n_nodes, edge_prob, rng)?;
        let cliques = find_k_cliques(&graph, k);
        let group = if cliques.is_empty() { &mut blank } else { &mut with_clique };
        let want = if cliques.is_empty() { want_blank } else { want_clique };
        if group.len() < want {
            let label = label_from_cliques(n_nodes, &cliques, rng);
            group.push(Item { graph, label, edge_prob });
        }
    }
    let mut items = Vec::with_capacity(size);
    let mut blank = blank.into_iter();
    for item in with_clique {
        items.push(item);
        items.extend(blank.next());
    }
    Ok(items)
}
