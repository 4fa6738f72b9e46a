//! Abstract graphs: complete partite graphs, simple cycles and disjoint cycle pairs.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex sets are stored as bitmasks, so graphs are capped at this size.
pub const MAX_VERTICES: usize = 64;

/// A simple undirected graph with a fixed edge numbering.
///
/// Edge ids are positions in `edges`; each edge remembers the orientation it
/// was declared with, which is the direction its drawn path runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u64>,
    edge_at: Vec<Option<usize>>,
    parts: Option<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::build(n, edges, None)
    }

    fn build(n: usize, edges: Vec<(usize, usize)>, parts: Option<Vec<usize>>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidSpec(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        let mut adj = vec![0u64; n];
        let mut edge_at = vec![None; n * n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidSpec(format!("edge {id} ({u},{v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidSpec(format!("edge {id} is a loop at {u}")));
            }
            if edge_at[u * n + v].is_some() {
                return Err(Error::InvalidSpec(format!("duplicate edge ({u},{v})")));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            edge_at[u * n + v] = Some(id);
            edge_at[v * n + u] = Some(id);
        }
        Ok(Graph { n, edges, adj, edge_at, parts })
    }

    /// Attach a partition, checking that the edge set is exactly the complete
    /// partite edge set for it.
    pub fn with_parts(self, parts: Vec<usize>) -> Result<Self> {
        let expected = PartiteGraph::new(&parts)?;
        if expected.graph.n != self.n {
            return Err(Error::InvalidSpec(format!(
                "parts {parts:?} describe {} vertices but the drawing has {}",
                expected.graph.n, self.n
            )));
        }
        if expected.graph.adj != self.adj {
            return Err(Error::InvalidSpec(format!(
                "edge set does not match the complete partite graph {}",
                partition_name(&parts)
            )));
        }
        Ok(Graph { parts: Some(parts), ..self })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn parts(&self) -> Option<&[usize]> {
        self.parts.as_deref()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_at[u * self.n + v]
    }

    /// Edge id and traversal direction (+1 if `u -> v` follows the declared
    /// orientation).
    pub fn oriented_edge(&self, u: usize, v: usize) -> Option<(usize, i64)> {
        let id = self.edge_between(u, v)?;
        Some((id, if self.edges[id].0 == u { 1 } else { -1 }))
    }

    /// Induced subgraph on `keep` (in the given order); returns the graph and
    /// the map from new edge ids to old ones.
    pub fn induced(&self, keep: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.n || new_id[v] != usize::MAX {
                return Err(Error::InvalidArgument(format!("bad vertex list {keep:?}")));
            }
            new_id[v] = i;
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
                edges.push((new_id[u], new_id[v]));
                origin.push(id);
            }
        }
        let parts = self.parts.as_ref().map(|parts| {
            let pg_labels = part_labels(parts);
            let mut counts = vec![0usize; parts.len()];
            for &v in keep {
                counts[pg_labels[v]] += 1;
            }
            counts.into_iter().filter(|&c| c > 0).collect::<Vec<_>>()
        });
        let g = Graph::build(keep.len(), edges, None)?;
        let g = match parts {
            // vertices of one part must stay contiguous for the partition to describe them
            Some(p) if keep.windows(2).all(|w| w[0] < w[1]) => g.with_parts(p)?,
            _ => g,
        };
        Ok((g, origin))
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << s;
            let mut frontier = 1u64 << s;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adj[v] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            seen |= comp;
            out.push(bits(comp).collect());
        }
        out
    }
}

/// Complete partite graph `K_{p1,p2,...}`; vertex ids are assigned part by
/// part in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartiteGraph {
    graph: Graph,
    part_of: Vec<usize>,
}

impl PartiteGraph {
    pub fn new(parts: &[usize]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSpec("empty part list".into()));
        }
        if let Some(i) = parts.iter().position(|&p| p == 0) {
            return Err(Error::InvalidSpec(format!("part {i} has size zero")));
        }
        let n: usize = parts.iter().sum();
        if n > MAX_VERTICES {
            return Err(Error::InvalidSpec(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        let part_of = part_labels(parts);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if part_of[u] != part_of[v] {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::build(n, edges, Some(parts.to_vec()))?;
        Ok(PartiteGraph { graph, part_of })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn parts(&self) -> &[usize] {
        self.graph.parts.as_deref().unwrap_or_default()
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    /// Vertex ids belonging to part `i`.
    pub fn part_vertices(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.parts()[..i].iter().sum();
        start..start + self.parts()[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }
}

fn part_labels(parts: &[usize]) -> Vec<usize> {
    parts.iter().enumerate().flat_map(|(i, &p)| std::iter::repeat_n(i, p)).collect()
}

/// `K_{5,3,1}` style name for a partition.
pub fn partition_name(parts: &[usize]) -> String {
    let inner: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    format!("K_{{{}}}", inner.join(","))
}

/// Parse `"5,3,1"`.
pub fn parse_parts(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidSpec(format!("bad part size {t:?}"))))
        .collect()
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// A simple cycle in canonical form: smallest vertex first, then the smaller
/// of its two cycle neighbours. The vertex order also fixes the orientation
/// used for linking numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    /// Canonicalize an arbitrary traversal of a cycle.
    pub fn from_traversal(vertices: &[usize]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidArgument(format!("cycle {vertices:?} is shorter than 3")));
        }
        let mut seen = 0u64;
        for &v in vertices {
            if v >= MAX_VERTICES || seen >> v & 1 == 1 {
                return Err(Error::InvalidArgument(format!("cycle {vertices:?} repeats a vertex")));
            }
            seen |= 1 << v;
        }
        Ok(Cycle(canonical_rotation(vertices)))
    }

    /// Checks adjacency in `g` in addition to canonicalizing.
    pub fn in_graph(g: &Graph, vertices: &[usize]) -> Result<Self> {
        let c = Self::from_traversal(vertices)?;
        for (u, v) in c.steps() {
            if u >= g.n || v >= g.n || !g.adjacent(u, v) {
                return Err(Error::InvalidArgument(format!("{u}-{v} is not an edge")));
            }
        }
        Ok(c)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &v| m | 1 << v)
    }

    /// Consecutive vertex pairs, closing back to the start.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| (self.0[i], self.0[(i + 1) % k]))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", inner.join(" "))
    }
}

fn canonical_rotation(vs: &[usize]) -> Vec<usize> {
    let k = vs.len();
    let start = (0..k).min_by_key(|&i| vs[i]).unwrap_or(0);
    let next = vs[(start + 1) % k];
    let prev = vs[(start + k - 1) % k];
    if next < prev {
        (0..k).map(|i| vs[(start + i) % k]).collect()
    } else {
        (0..k).map(|i| vs[(start + k - i) % k]).collect()
    }
}

/// Every simple cycle with length in `min_len..=max_len`, one canonical
/// representative each, sorted lexicographically.
pub fn enumerate_cycles(g: &Graph, min_len: usize, max_len: usize) -> Result<Vec<Cycle>> {
    if min_len < 3 || min_len > max_len || max_len > g.n.max(3) {
        return Err(Error::InvalidArgument(format!(
            "cycle lengths {min_len}..={max_len} invalid for {} vertices",
            g.n
        )));
    }
    let per_start: Vec<Vec<Cycle>> = (0..g.n)
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::new();
            let mut path = vec![s];
            extend_paths(g, s, 1u64 << s, &mut path, min_len, max_len, &mut out);
            out
        })
        .collect();
    let mut all: Vec<Cycle> = per_start.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

fn extend_paths(
    g: &Graph,
    start: usize,
    used: u64,
    path: &mut Vec<usize>,
    min_len: usize,
    max_len: usize,
    out: &mut Vec<Cycle>,
) {
    let last = *path.last().unwrap_or(&start);
    // only vertices above `start` so that `start` is the cycle minimum
    let above = !((1u64 << start) | ((1u64 << start) - 1));
    let mut cand = g.adj[last] & !used & above;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        path.push(v);
        let len = path.len();
        if len >= min_len && g.adjacent(v, start) && path[1] < v {
            out.push(Cycle(path.clone()));
        }
        if len < max_len {
            extend_paths(g, start, used | 1 << v, path, min_len, max_len, out);
        }
        path.pop();
    }
}

/// A vertex-disjoint pair of cycles, by index into the list it was drawn
/// from. `shape` holds the two lengths with the smaller first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclePair {
    pub first: usize,
    pub second: usize,
    pub shape: (usize, usize),
}

/// All unordered vertex-disjoint pairs among `cycles`, ordered by
/// `(first, second)`.
pub fn disjoint_cycle_pairs(cycles: &[Cycle]) -> Vec<CyclePair> {
    let masks: Vec<u64> = cycles.iter().map(Cycle::mask).collect();
    let mut by_mask: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &m) in masks.iter().enumerate() {
        by_mask.entry(m).or_default().push(i);
    }
    let universe = masks.iter().fold(0u64, |a, &m| a | m);
    let rows: Vec<Vec<CyclePair>> = (0..cycles.len())
        .into_par_iter()
        .map(|i| {
            let rest = universe & !masks[i];
            let mut row = Vec::new();
            if rest.count_ones() < 3 {
                return row;
            }
            // walk every submask of the complement that some cycle occupies
            let mut sub = rest;
            loop {
                if sub.count_ones() >= 3 {
                    if let Some(js) = by_mask.get(&sub) {
                        for &j in js {
                            if j > i {
                                let (a, b) = (cycles[i].len(), cycles[j].len());
                                row.push(CyclePair { first: i, second: j, shape: (a.min(b), a.max(b)) });
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            row.sort();
            row
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Binomial coefficient, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
