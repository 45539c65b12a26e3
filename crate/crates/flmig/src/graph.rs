//! Immutable undirected weighted graphs: edge-list ingestion with label
//! remapping, a compact adjacency representation with cached degrees, and
//! the condensation step used by multilevel community detection.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::partition::Partition;

pub type NodeId = u32;

/// Undirected weighted graph with dense node ids `0..n`.
///
/// Self-loops are kept out of the adjacency lists and stored per node. A
/// self-loop of weight `w` contributes `2w` to its node's degree and `w` to
/// intra-community edge weight; this is the convention under which
/// condensation preserves modularity exactly.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    total_weight_2m: f64,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples. Parallel edges (in either
    /// orientation) are merged by summing weights; `u == v` becomes a
    /// self-loop. Weights must be finite and nonnegative.
    pub fn from_weighted_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if (u as usize) >= node_count || (v as usize) >= node_count {
                return Err(Error::Data(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Data(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            let key = if u <= v { (u, v) } else { (v, u) };
            *merged.entry(key).or_insert(0.0) += w;
        }

        let mut self_loop = vec![0.0; node_count];
        let mut adjacency_len = vec![0usize; node_count];
        for (&(u, v), _) in &merged {
            if u == v {
                continue;
            }
            adjacency_len[u as usize] += 1;
            adjacency_len[v as usize] += 1;
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0usize);
        for len in &adjacency_len {
            offsets.push(offsets.last().unwrap() + len);
        }
        let total_slots = *offsets.last().unwrap();
        let mut targets = vec![0 as NodeId; total_slots];
        let mut weights = vec![0.0; total_slots];
        let mut cursor = offsets[..node_count].to_vec();
        let edge_count = merged.len();

        // BTreeMap iteration is ordered, so each node's neighbor list comes
        // out sorted ascending and construction is fully deterministic.
        for ((u, v), w) in merged {
            if u == v {
                self_loop[u as usize] += w;
                continue;
            }
            targets[cursor[u as usize]] = v;
            weights[cursor[u as usize]] = w;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            weights[cursor[v as usize]] = w;
            cursor[v as usize] += 1;
        }

        let mut degree = vec![0.0; node_count];
        for v in 0..node_count {
            let mut d = 2.0 * self_loop[v];
            for i in offsets[v]..offsets[v + 1] {
                d += weights[i];
            }
            degree[v] = d;
        }
        let total_weight_2m = degree.iter().sum();

        Ok(Graph {
            offsets,
            targets,
            weights,
            self_loop,
            degree,
            total_weight_2m,
            edge_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    /// Number of distinct undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `v` with edge weights, ascending by neighbor id.
    /// Self-loops are not listed here; see [`Graph::self_loop_weight`].
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.offsets[v as usize];
        let hi = self.offsets[v as usize + 1];
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    pub fn neighbor_count(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Weighted degree: incident edge weights plus twice the self-loop weight.
    pub fn degree(&self, v: NodeId) -> f64 {
        self.degree[v as usize]
    }

    pub fn self_loop_weight(&self, v: NodeId) -> f64 {
        self.self_loop[v as usize]
    }

    /// Twice the total edge weight, `sum_i degree(i)`.
    pub fn total_weight_2m(&self) -> f64 {
        self.total_weight_2m
    }

    pub fn has_edges(&self) -> bool {
        self.total_weight_2m > 0.0
    }
}

/// Bijection between external node labels and dense internal ids.
#[derive(Debug, Clone, Default)]
pub struct NodeLabelMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeLabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0" .. "n-1"`, for graphs generated in-process.
    pub fn numeric(node_count: usize) -> Self {
        let mut map = Self::new();
        for v in 0..node_count {
            map.insert_or_get(&v.to_string());
        }
        map
    }

    pub fn insert_or_get(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Options for [`parse_edge_list`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Expect `u v w` lines instead of `u v`. Unweighted edges get weight 1.
    pub weighted: bool,
    pub allow_self_loops: bool,
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; blank lines are skipped. Tokens are arbitrary labels and
/// internal ids are assigned in first-appearance order. Duplicate edges are
/// merged by summing weights.
pub fn parse_edge_list<R: BufRead>(reader: R, options: ParseOptions) -> Result<(Graph, NodeLabelMap)> {
    let mut labels = NodeLabelMap::new();
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let expected = if options.weighted { 3 } else { 2 };
        if tokens.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {expected} tokens, found {}", tokens.len()),
            });
        }
        let weight = if options.weighted {
            let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric weight '{}'", tokens[2]),
            })?;
            if !w.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite weight '{}'", tokens[2]),
                });
            }
            if w < 0.0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("negative weight {w}"),
                });
            }
            w
        } else {
            1.0
        };
        if tokens[0] == tokens[1] && !options.allow_self_loops {
            return Err(Error::Parse {
                line: line_no,
                message: format!("self-loop on '{}' (self-loops are disabled)", tokens[0]),
            });
        }
        let u = labels.insert_or_get(tokens[0]);
        let v = labels.insert_or_get(tokens[1]);
        edges.push((u, v, weight));
    }

    let graph = Graph::from_weighted_edges(labels.len(), edges)?;
    Ok((graph, labels))
}

/// Writes `label_u label_v weight` lines ordered by internal id, preceded by
/// a `#` header carrying the node and edge counts. Re-parsing the output with
/// `weighted = true, allow_self_loops = true` reproduces the graph.
pub fn write_edge_list<W: Write>(g: &Graph, labels: &NodeLabelMap, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
    for u in 0..g.node_count() as NodeId {
        let loop_w = g.self_loop_weight(u);
        if loop_w > 0.0 {
            writeln!(out, "{} {} {}", labels.label(u), labels.label(u), fmt_weight(loop_w))?;
        }
        for (v, w) in g.neighbors(u) {
            if v >= u {
                writeln!(out, "{} {} {}", labels.label(u), labels.label(v), fmt_weight(w))?;
            }
        }
    }
    Ok(())
}

fn fmt_weight(w: f64) -> String {
    if w == w.trunc() && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

/// Result of collapsing each community of a partition into one node.
#[derive(Debug)]
pub struct Condensed {
    pub graph: Graph,
    /// Indexed by community id (partition capacity); `NodeId::MAX` marks
    /// empty communities. Occupied communities map to dense new node ids in
    /// first-occurrence order over original node ids.
    pub node_of_community: Vec<NodeId>,
}

/// Collapses each community into a single node. Inter-community edge weights
/// are summed; intra-community weight (self-loops included) becomes the
/// super-node's self-loop weight, so modularity is preserved: the condensed
/// graph under the singleton partition scores exactly like `(g, p)`.
pub fn condense(g: &Graph, p: &Partition) -> Condensed {
    let n = g.node_count();
    let mut node_of_community = vec![NodeId::MAX; p.community_capacity()];
    let mut next = 0 as NodeId;
    for v in 0..n as NodeId {
        let c = p.community_of(v) as usize;
        if node_of_community[c] == NodeId::MAX {
            node_of_community[c] = next;
            next += 1;
        }
    }

    let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for u in 0..n as NodeId {
        let cu = node_of_community[p.community_of(u) as usize];
        let loop_w = g.self_loop_weight(u);
        if loop_w > 0.0 {
            *merged.entry((cu, cu)).or_insert(0.0) += loop_w;
        }
        for (v, w) in g.neighbors(u) {
            if v < u {
                continue; // each undirected edge once
            }
            let cv = node_of_community[p.community_of(v) as usize];
            let key = if cu <= cv { (cu, cv) } else { (cv, cu) };
            *merged.entry(key).or_insert(0.0) += w;
        }
    }

    let graph = Graph::from_weighted_edges(next as usize, merged.into_iter().map(|((a, b), w)| (a, b, w)))
        .expect("condensed edges are in range by construction");
    Condensed {
        graph,
        node_of_community,
    }
}

/// Connected components of the subgraph induced by `subset`. Components are
/// returned in order of their first seed in `subset`; nodes appear in BFS
/// discovery order. Output sets are disjoint and cover the subset.
pub fn connected_components(g: &Graph, subset: &[NodeId]) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut in_subset = vec![false; n];
    for &v in subset {
        in_subset[v as usize] = true;
    }
    let mut visited = vec![false; n];
    let mut components = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    for &start in subset {
        if visited[start as usize] {
            continue;
        }
        visited[start as usize] = true;
        queue.push_back(start);
        let mut component = Vec::new();
        while let Some(v) = queue.pop_front() {
            component.push(v);
            for (u, _) in g.neighbors(v) {
                if in_subset[u as usize] && !visited[u as usize] {
                    visited[u as usize] = true;
                    queue.push_back(u);
                }
            }
        }
        components.push(component);
    }
    components
}
