//! Directed follow graph in compressed sparse row form.
//!
//! Raw dataset IDs are re-mapped to dense [`NodeId`]s at load time. The
//! mapping is kept in an [`IdTable`] sorted by raw ID, so dense order
//! follows raw order and iteration is deterministic.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, valid for the graph it was issued by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Simple digraph: no self-loops, no parallel arcs. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

impl DirectedGraph {
    /// Builds a graph on `node_count` nodes. Self-loops and duplicate arcs are
    /// dropped silently; use [`load_edge_list`] when they need to be reported.
    ///
    /// Panics if an endpoint is `>= node_count`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut pairs: Vec<(u32, u32)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_sorted_unique(node_count, &pairs)
    }

    fn from_sorted_unique(node_count: usize, pairs: &[(u32, u32)]) -> Self {
        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_offsets = vec![0usize; node_count + 1];
        for &(a, b) in pairs {
            assert!(
                (a as usize) < node_count && (b as usize) < node_count,
                "edge ({a}, {b}) out of range for {node_count} nodes"
            );
            out_offsets[a as usize + 1] += 1;
            in_offsets[b as usize + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }

        // pairs are sorted by (a, b), so each out list comes out sorted.
        let out_targets = pairs.iter().map(|&(_, b)| NodeId(b)).collect();

        // Scanning in (a, b) order fills each in-list in ascending source order.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![NodeId(0); pairs.len()];
        for &(a, b) in pairs {
            let slot = &mut cursor[b as usize];
            in_sources[*slot] = NodeId(a);
            *slot += 1;
        }

        DirectedGraph {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn contains(&self, u: NodeId) -> bool {
        u.index() < self.node_count()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count() as u32).map(NodeId)
    }

    /// Followees of `u`, ascending.
    #[inline]
    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        let i = u.index();
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// Followers of `u`, ascending.
    #[inline]
    pub fn in_neighbors(&self, u: NodeId) -> &[NodeId] {
        let i = u.index();
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    #[inline]
    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.out_neighbors(a).binary_search(&b).is_ok()
    }

    /// All arcs in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |a| self.out_neighbors(a).iter().map(move |&b| (a, b)))
    }

    /// `(indegree, outdegree)` of `u`.
    pub fn degrees(&self, u: NodeId) -> Result<(usize, usize)> {
        if !self.contains(u) {
            return Err(Error::UnknownNode(u.0 as u64));
        }
        Ok((self.in_neighbors(u).len(), self.out_neighbors(u).len()))
    }

    pub fn degree_table(&self) -> DegreeTable {
        DegreeTable {
            indegree: self.nodes().map(|u| self.in_neighbors(u).len()).collect(),
            outdegree: self.nodes().map(|u| self.out_neighbors(u).len()).collect(),
        }
    }

    /// Union of followers and followees of `u`, ascending, without `u`.
    pub fn undirected_neighbors(&self, u: NodeId) -> Vec<NodeId> {
        let mut merged = merge_union(self.out_neighbors(u), self.in_neighbors(u));
        merged.retain(|&w| w != u);
        merged
    }

    /// Subgraph induced by `members`, which must be sorted and unique.
    /// Local node `i` corresponds to `members[i]`.
    pub fn induced_subgraph(&self, members: &[NodeId]) -> DirectedGraph {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let mut pairs = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            let outs = self.out_neighbors(a);
            if outs.len() > 4 * members.len() {
                for (j, b) in members.iter().enumerate() {
                    if outs.binary_search(b).is_ok() {
                        pairs.push((i as u32, j as u32));
                    }
                }
            } else {
                for b in outs {
                    if let Ok(j) = members.binary_search(b) {
                        pairs.push((i as u32, j as u32));
                    }
                }
            }
        }
        // Generated in (i, j) order already.
        Self::from_sorted_unique(members.len(), &pairs)
    }
}

pub(crate) fn merge_union(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Per-node in/out degree counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeTable {
    pub indegree: Vec<usize>,
    pub outdegree: Vec<usize>,
}

impl DegreeTable {
    pub fn len(&self) -> usize {
        self.indegree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indegree.is_empty()
    }
}

/// Dense-to-raw ID mapping. Raw IDs are stored ascending, so
/// `NodeId(i)` is the i-th smallest raw ID.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdTable {
    raw: Vec<u64>,
}

impl IdTable {
    /// Identity table for graphs whose raw IDs are already `0..n`.
    pub fn identity(n: usize) -> Self {
        IdTable {
            raw: (0..n as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw(&self, u: NodeId) -> u64 {
        self.raw[u.index()]
    }

    pub fn dense(&self, raw: u64) -> Option<NodeId> {
        self.raw.binary_search(&raw).ok().map(|i| NodeId(i as u32))
    }

    pub fn dense_or_err(&self, raw: u64) -> Result<NodeId> {
        self.dense(raw).ok_or(Error::UnknownNode(raw))
    }

    /// Writes one `dense<TAB>raw` line per node.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, raw) in self.raw.iter().enumerate() {
            writeln!(w, "{i}\t{raw}")?;
        }
        Ok(())
    }
}

/// Counts gathered while parsing an edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub nodes: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lines {}", self.lines)?;
        writeln!(f, "nodes {}", self.nodes)?;
        writeln!(f, "edges {}", self.edges)?;
        writeln!(f, "self_loops_dropped {}", self.self_loops_dropped)?;
        writeln!(f, "duplicates_dropped {}", self.duplicates_dropped)
    }
}

/// A graph together with its raw-ID table and load report.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub ids: IdTable,
    pub report: LoadReport,
}

impl LoadedGraph {
    /// Wraps a graph whose raw IDs equal its dense IDs.
    pub fn from_dense(graph: DirectedGraph) -> Self {
        let n = graph.node_count();
        let report = LoadReport {
            lines: graph.edge_count(),
            nodes: n,
            edges: graph.edge_count(),
            ..Default::default()
        };
        LoadedGraph {
            graph,
            ids: IdTable::identity(n),
            report,
        }
    }

    /// Writes the graph back as a raw-ID edge list.
    pub fn write_edge_list<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_edge_list(&self.graph, &self.ids, w)
    }
}

/// Reads a `follower followee` edge list from disk.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

/// Parses an edge list. `origin` only labels error messages.
pub fn parse_edge_list<R: BufRead>(reader: R, origin: &Path) -> Result<LoadedGraph> {
    let mut raw_pairs: Vec<(u64, u64)> = Vec::new();
    let mut raw_ids: Vec<u64> = Vec::new();
    let mut report = LoadReport::default();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        report.lines += 1;
        let mut fields = trimmed.split_ascii_whitespace();
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("expected two node ids, got {trimmed:?}"),
                ))
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(origin, lineno, format!("invalid node id {tok:?}")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        raw_ids.push(a);
        raw_ids.push(b);
        if a == b {
            report.self_loops_dropped += 1;
        } else {
            raw_pairs.push((a, b));
        }
    }

    raw_ids.sort_unstable();
    raw_ids.dedup();
    if raw_ids.len() > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!(
            "{} distinct nodes exceed the u32 index space",
            raw_ids.len()
        )));
    }
    let ids = IdTable { raw: raw_ids };

    let mut pairs: Vec<(u32, u32)> = raw_pairs
        .iter()
        .map(|&(a, b)| {
            // Both endpoints were inserted into the table above.
            let da = ids.dense(a).expect("raw id present");
            let db = ids.dense(b).expect("raw id present");
            (da.0, db.0)
        })
        .collect();
    drop(raw_pairs);
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    report.duplicates_dropped = before - pairs.len();

    let graph = DirectedGraph::from_sorted_unique(ids.len(), &pairs);
    report.nodes = graph.node_count();
    report.edges = graph.edge_count();
    Ok(LoadedGraph { graph, ids, report })
}

/// Writes `raw_follower raw_followee` lines in dense (source, target) order.
pub fn write_edge_list<W: Write>(g: &DirectedGraph, ids: &IdTable, mut w: W) -> std::io::Result<()> {
    for (a, b) in g.edges() {
        writeln!(w, "{} {}", ids.raw(a), ids.raw(b))?;
    }
    w.flush()
}
