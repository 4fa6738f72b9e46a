//! Distinguished subgraphs: complete partite placements and `H8` (the graph
//! obtained from `K7` by one triangle-to-star move).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bits, Graph, PartiteGraph};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Partite(Vec<usize>),
    H8,
}

/// One placement of a pattern in a host graph.
///
/// For a partite pattern `roles[i]` holds the host vertices of pattern part
/// `i`. For `H8`, `roles` is `[[top], middles, bottoms]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubgraphHit {
    pub pattern: Pattern,
    pub roles: Vec<Vec<usize>>,
}

impl SubgraphHit {
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.roles.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn top(&self) -> Option<usize> {
        match self.pattern {
            Pattern::H8 => Some(self.roles[0][0]),
            _ => None,
        }
    }

    pub fn middles(&self) -> Option<&[usize]> {
        matches!(self.pattern, Pattern::H8).then(|| &self.roles[1][..])
    }

    pub fn bottoms(&self) -> Option<&[usize]> {
        matches!(self.pattern, Pattern::H8).then(|| &self.roles[2][..])
    }
}

/// Count placements of `K_pattern` inside the complete partite graph `g`.
///
/// A placement is an unordered family of disjoint vertex sets, one per
/// pattern part, such that vertices in different sets are adjacent. A host
/// part may feed at most one set, but a set may draw on several host parts
/// (so `K_{4,4,1}` contains nine `K_{4,4}`: the one on the two big parts plus
/// the ones that absorb the singleton into either side).
pub fn count_partite_subgraphs(g: &PartiteGraph, pattern: &[usize]) -> Result<(u64, Vec<SubgraphHit>)> {
    if pattern.is_empty() || pattern.contains(&0) {
        return Err(Error::InvalidSpec(format!("bad pattern {pattern:?}")));
    }
    if pattern.iter().sum::<usize>() > g.vertex_count() {
        return Ok((0, Vec::new()));
    }
    let host: Vec<Vec<usize>> = (0..g.parts().len()).map(|i| g.part_vertices(i).collect()).collect();
    let mut labels = vec![None; host.len()];
    let mut hits = Vec::new();
    assign_host_parts(&host, pattern, 0, &mut labels, &mut hits);
    hits.sort();
    hits.dedup();
    Ok((hits.len() as u64, hits))
}

fn assign_host_parts(
    host: &[Vec<usize>],
    pattern: &[usize],
    h: usize,
    labels: &mut Vec<Option<usize>>,
    hits: &mut Vec<SubgraphHit>,
) {
    if h == host.len() {
        fill_labels(host, pattern, labels, hits);
        return;
    }
    labels[h] = None;
    assign_host_parts(host, pattern, h + 1, labels, hits);
    for j in 0..pattern.len() {
        labels[h] = Some(j);
        assign_host_parts(host, pattern, h + 1, labels, hits);
    }
    labels[h] = None;
}

fn fill_labels(host: &[Vec<usize>], pattern: &[usize], labels: &[Option<usize>], hits: &mut Vec<SubgraphHit>) {
    // every pattern part needs at least one host part and enough room
    for (j, &size) in pattern.iter().enumerate() {
        let room: usize = labels.iter().zip(host).filter(|(l, _)| **l == Some(j)).map(|(_, p)| p.len()).sum();
        let feeders = labels.iter().filter(|l| **l == Some(j)).count();
        if feeders == 0 || room < size || feeders > size {
            return;
        }
    }
    let mut per_label: Vec<Vec<Vec<usize>>> = Vec::with_capacity(pattern.len());
    for (j, &size) in pattern.iter().enumerate() {
        let feeders: Vec<&Vec<usize>> =
            labels.iter().zip(host).filter(|(l, _)| **l == Some(j)).map(|(_, p)| p).collect();
        let mut choices = Vec::new();
        spread_choice(&feeders, 0, size, &mut Vec::new(), &mut choices);
        if choices.is_empty() {
            return;
        }
        per_label.push(choices);
    }
    let mut pick = vec![0usize; pattern.len()];
    loop {
        let mut roles: Vec<Vec<usize>> = pick.iter().enumerate().map(|(j, &c)| per_label[j][c].clone()).collect();
        // forget which pattern part got which set when sizes tie
        let mut order: Vec<usize> = (0..pattern.len()).collect();
        order.sort_by_key(|&j| (pattern[j], roles[j].clone()));
        let mut sizes: Vec<usize> = pattern.to_vec();
        sizes.sort_unstable();
        roles = order.iter().map(|&j| std::mem::take(&mut roles[j])).collect();
        hits.push(SubgraphHit { pattern: Pattern::Partite(sizes), roles });
        // odometer
        let mut j = 0;
        loop {
            if j == pick.len() {
                return;
            }
            pick[j] += 1;
            if pick[j] < per_label[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// Choose `need` vertices from the feeder parts, at least one from each.
fn spread_choice(feeders: &[&Vec<usize>], i: usize, need: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i == feeders.len() {
        if need == 0 {
            let mut s = acc.clone();
            s.sort_unstable();
            out.push(s);
        }
        return;
    }
    let remaining_parts = feeders.len() - i - 1;
    let part = feeders[i];
    for take in 1..=part.len().min(need.saturating_sub(remaining_parts)) {
        for combo in combinations(part, take) {
            let base = acc.len();
            acc.extend(combo);
            spread_choice(feeders, i + 1, need - take, acc, out);
            acc.truncate(base);
        }
    }
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Every copy of `H8` in `g`, keyed by roles: a top vertex joined to three
/// middle vertices, and four bottom vertices that are pairwise adjacent and
/// adjacent to every middle vertex. Copies differing only by permuting
/// middles or bottoms are the same subgraph and are reported once.
pub fn enumerate_h8_subgraphs(g: &Graph) -> Vec<SubgraphHit> {
    let n = g.vertex_count();
    let mut hits = Vec::new();
    if n < 8 {
        return hits;
    }
    for top in 0..n {
        let nbrs: Vec<usize> = bits(g.neighbors_mask(top)).collect();
        for middles in combinations(&nbrs, 3) {
            let mid_mask = middles.iter().fold(0u64, |m, &v| m | 1 << v);
            // bottoms must see every middle and avoid top and middles
            let common = middles.iter().fold(!0u64, |m, &v| m & g.neighbors_mask(v));
            let pool: Vec<usize> = bits(common & !mid_mask & !(1 << top)).collect();
            for bottoms in combinations(&pool, 4) {
                let clique = bottoms
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| bottoms[i + 1..].iter().all(|&b| g.adjacent(a, b)));
                if clique {
                    hits.push(SubgraphHit { pattern: Pattern::H8, roles: vec![vec![top], middles.clone(), bottoms] });
                }
            }
        }
    }
    hits
}
