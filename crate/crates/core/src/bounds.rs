//! Closed-form lower bounds on link and knot counts.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::{binomial, PartiteGraph};
use crate::subgraph::{count_partite_subgraphs, enumerate_h8_subgraphs};
use crate::tables::{eight_vertex_knots, Known};

fn canonical(parts: &[usize]) -> Vec<usize> {
    let mut p: Vec<usize> = parts.iter().copied().filter(|&s| s > 0).collect();
    p.sort_unstable_by(|a, b| b.cmp(a));
    p
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Lower bound for `K_{n,1,1,1,1}`, n >= 3.
pub fn n1111_lower(n: u64) -> u64 {
    2 * binomial(n, 4) + 2 * binomial(n, 3) + ceil_div(n * n - n, 6)
}

/// Link count of the woven `K_{n,1,1,1,1}` embedding, n >= 3.
pub fn n1111_upper(n: u64) -> u64 {
    2 * binomial(n, 4) + 2 * binomial(n, 3) + n1111_woven_33(n)
}

/// Odd (3,3)-links in the woven embedding.
pub fn n1111_woven_33(n: u64) -> u64 {
    ceil_div(n * n - 2 * n, 4)
}

/// Bound from a theorem about this exact family, without monotonicity.
fn direct_link_bound(p: &[usize]) -> Option<u64> {
    let total: usize = p.iter().sum();
    if total < 6 {
        return Some(0);
    }
    let n = p[0] as u64;
    let rest = &p[1..];
    match rest {
        [] | [1] | [2] | [3] | [1, 1] | [2, 1] | [1, 1, 1] => Some(0),
        [4] => Some(2 * binomial(n, 4)),
        [2, 2] => Some(2 * binomial(n, 4)),
        [3, 1] | [2, 1, 1] => Some(binomial(n, 3) + 2 * binomial(n, 4)),
        [1, 1, 1, 1] if n >= 3 => Some(n1111_lower(n)),
        // K6
        [1, 1, 1, 1, 1] if n == 1 => Some(1),
        [4, 1] if n == 4 => Some(74),
        _ => None,
    }
}

/// Complete partite graphs one step smaller: one vertex deleted, or two
/// parts merged (merging only removes edges).
fn children(p: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        if i > 0 && p[i] == p[i - 1] {
            continue;
        }
        let mut q = p.to_vec();
        q[i] -= 1;
        out.push(canonical(&q));
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let mut q: Vec<usize> = p.to_vec();
            q[i] += q[j];
            q.remove(j);
            out.push(canonical(&q));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn link_bound_memo(p: Vec<usize>, memo: &mut HashMap<Vec<usize>, Option<u64>>) -> Option<u64> {
    if let Some(&b) = memo.get(&p) {
        return b;
    }
    let mut best = direct_link_bound(&p);
    if p.iter().sum::<usize>() > 6 {
        for c in children(&p) {
            // a zero inherited from a subgraph says nothing
            if let Some(b) = link_bound_memo(c, memo).filter(|&b| b > 0) {
                best = Some(best.map_or(b, |x| x.max(b)));
            }
        }
    }
    memo.insert(p, best);
    best
}

/// Proven lower bound on the number of nonzero-lk links in any embedding of
/// the complete partite graph, or `None` when no covered family applies.
///
/// Subgraph monotonicity is applied: a bound for a complete partite subgraph
/// (obtained by deleting vertices or merging parts) carries over.
pub fn link_lower_bound(parts: &[usize]) -> Option<u64> {
    let p = canonical(parts);
    if p.is_empty() {
        return None;
    }
    link_bound_memo(p, &mut HashMap::new())
}

/// Covering-argument constants for one family.
struct KnotFamily {
    parts: &'static [usize],
    /// H8 subgraphs whose required knot can be a K7 subgraph's knot.
    k7_cover: u64,
    /// Most H8 subgraphs a single knotted cycle can serve.
    multiplicity: u64,
}

const KNOT_FAMILIES: &[KnotFamily] = &[
    KnotFamily { parts: &[1, 1, 1, 1, 1, 1, 1], k7_cover: 0, multiplicity: 1 },
    KnotFamily { parts: &[3, 2, 1, 1, 1], k7_cover: 0, multiplicity: 2 },
    KnotFamily { parts: &[2, 2, 1, 1, 1, 1], k7_cover: 0, multiplicity: 15 },
    KnotFamily { parts: &[3, 1, 1, 1, 1, 1], k7_cover: 0, multiplicity: 2 },
    KnotFamily { parts: &[2, 1, 1, 1, 1, 1, 1], k7_cover: 6, multiplicity: 11 },
    KnotFamily { parts: &[1, 1, 1, 1, 1, 1, 1, 1], k7_cover: 14, multiplicity: 24 },
];

/// The arithmetic behind a knot lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnotBound {
    pub value: u64,
    pub k7_subgraphs: u64,
    pub h8_subgraphs: u64,
    pub k7_cover: u64,
    pub multiplicity: u64,
    /// Lower value printed in the reference table, when it differs.
    pub table_lower: Option<u64>,
    pub notes: Vec<String>,
}

/// Knot lower bound with its derivation, or `None` for uncovered families.
pub fn knot_lower_bound_detail(parts: &[usize]) -> Option<KnotBound> {
    let p = canonical(parts);
    if p == [3, 3, 1, 1] {
        // intrinsically knotted but without H8 or K7 subgraphs
        return Some(KnotBound {
            value: 1,
            k7_subgraphs: 0,
            h8_subgraphs: 0,
            k7_cover: 0,
            multiplicity: 0,
            table_lower: None,
            notes: vec!["intrinsic knotting of K_{3,3,1,1} is used directly".into()],
        });
    }
    let fam = KNOT_FAMILIES.iter().find(|f| f.parts == p.as_slice())?;
    let g = PartiteGraph::new(&p).ok()?;
    let k7 = if p.len() >= 7 { count_partite_subgraphs(&g, &[1; 7]).ok()?.0 } else { 0 };
    let h8 = if p.iter().sum::<usize>() >= 8 { enumerate_h8_subgraphs(g.graph()).len() as u64 } else { 0 };
    let remaining = h8.saturating_sub(k7 * fam.k7_cover);
    let value = k7 + ceil_div(remaining, fam.multiplicity);
    let table_lower = eight_vertex_knots(&p).and_then(|k| k.lower()).filter(|&t| t != value);
    let mut notes = Vec::new();
    if let Some(t) = table_lower {
        notes.push(format!(
            "reference table lists lower bound {t}, but the covering argument only yields {value}; {value} is used"
        ));
    }
    Some(KnotBound {
        value,
        k7_subgraphs: k7,
        h8_subgraphs: h8,
        k7_cover: fam.k7_cover,
        multiplicity: fam.multiplicity,
        table_lower,
        notes,
    })
}

/// Proven lower bound on the number of a2-detected knots, or `None`.
pub fn knot_lower_bound(parts: &[usize]) -> Option<u64> {
    knot_lower_bound_detail(parts).map(|b| b.value)
}

/// Known minimum link count, exact or as a range.
pub fn known_links(parts: &[usize]) -> Option<Known> {
    let p = canonical(parts);
    if let Some(k) = crate::tables::nine_vertex_links(&p) {
        return Some(k);
    }
    let n = *p.first()? as u64;
    let exact = |value| Some(Known::Exact { value });
    match &p[1..] {
        [4] | [2, 2] | [3, 1] | [2, 1, 1] => exact(direct_link_bound(&p)?),
        [1, 1, 1, 1] if n >= 3 => {
            let (lo, hi) = (n1111_lower(n), n1111_upper(n));
            if lo == hi {
                exact(lo)
            } else {
                Some(Known::Range { lower: Some(lo), upper: Some(hi) })
            }
        }
        [1, 1, 1, 1, 1] if n == 1 => exact(1),
        _ if direct_link_bound(&p) == Some(0) => exact(0),
        _ => None,
    }
}

/// Known minimum knot count, exact or as a range.
pub fn known_knots(parts: &[usize]) -> Option<Known> {
    let p = canonical(parts);
    if p == [1; 7] {
        return Some(Known::Exact { value: 1 });
    }
    if let Some(k) = eight_vertex_knots(&p) {
        return Some(k);
    }
    if p.iter().sum::<usize>() < 7 {
        return Some(Known::Exact { value: 0 });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_formulas() {
        for n in 4..=8 {
            assert_eq!(link_lower_bound(&[n, 4]), Some(2 * binomial(n as u64, 4)));
            assert_eq!(link_lower_bound(&[n, 2, 2]), Some(2 * binomial(n as u64, 4)));
        }
        for n in 3..=7 {
            let want = binomial(n as u64, 3) + 2 * binomial(n as u64, 4);
            assert_eq!(link_lower_bound(&[n, 3, 1]), Some(want));
            assert_eq!(link_lower_bound(&[1, n, 1, 2]), Some(want));
        }
    }

    #[test]
    fn table_four_rows() {
        let lower: Vec<u64> = (3..=12).map(|n| link_lower_bound(&[n, 1, 1, 1, 1]).unwrap()).collect();
        assert_eq!(lower, crate::tables::N1111_LOWER);
        let upper: Vec<u64> = (3..=12).map(n1111_upper).collect();
        assert_eq!(upper, crate::tables::N1111_UPPER);
    }

    #[test]
    fn nine_vertex_exact_rows() {
        let got: Vec<_> = [[5, 4].as_slice(), &[5, 3, 1], &[5, 2, 2], &[5, 2, 1, 1], &[5, 1, 1, 1, 1], &[4, 4, 1]]
            .iter()
            .map(|p| link_lower_bound(p))
            .collect();
        assert_eq!(got, [10, 20, 10, 20, 34, 74].map(Some));
    }

    #[test]
    fn linkless_and_uncovered() {
        assert_eq!(link_lower_bound(&[7, 3]), Some(0));
        assert_eq!(link_lower_bound(&[5, 2, 1]), Some(0));
        assert_eq!(link_lower_bound(&[3, 3]), Some(0));
        assert_eq!(link_lower_bound(&[1, 1, 1, 1, 1]), Some(0));
        // K_{2,1,1,1,1} is not intrinsically linked and no theorem covers it
        assert_eq!(link_lower_bound(&[2, 1, 1, 1, 1]), None);
        assert_eq!(link_lower_bound(&[]), None);
    }

    #[test]
    fn monotone_inheritance() {
        // merging the parts of size 3 and 2 leaves K_{5,4}
        assert_eq!(link_lower_bound(&[4, 3, 2]), Some(10));
        assert_eq!(link_lower_bound(&[1; 9]), Some(74));
        assert!(link_lower_bound(&[3, 3, 3]).unwrap() >= link_lower_bound(&[3, 3, 1]).unwrap());
        // K7 contains K_{3,1,1,1,1}
        assert_eq!(link_lower_bound(&[1; 7]), Some(3));
        assert_eq!(link_lower_bound(&[1; 6]), Some(1));
    }

    #[test]
    fn knot_bounds() {
        let got: Vec<_> = [[3, 3, 1, 1].as_slice(), &[3, 2, 1, 1, 1], &[3, 1, 1, 1, 1, 1], &[2, 2, 1, 1, 1, 1], &[2, 1, 1, 1, 1, 1, 1], &[8]]
            .iter()
            .map(|p| if p == &[8] { knot_lower_bound(&[1; 8]) } else { knot_lower_bound(p) })
            .collect();
        assert_eq!(got, [1, 1, 3, 2, 8, 15].map(Some));
        let k8 = knot_lower_bound_detail(&[1; 8]).unwrap();
        assert_eq!((k8.k7_subgraphs, k8.h8_subgraphs), (8, 280));
        assert_eq!(k8.table_lower, Some(18));
        assert_eq!(k8.notes.len(), 1);
        let k2 = knot_lower_bound_detail(&[2, 1, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!((k2.k7_subgraphs, k2.h8_subgraphs), (2, 70));
        assert!(k2.table_lower.is_none());
        assert_eq!(knot_lower_bound(&[1; 7]), Some(1));
        assert_eq!(knot_lower_bound(&[4, 4, 1]), None);
    }

    #[test]
    fn known_values() {
        assert_eq!(known_links(&[4, 5]), Some(Known::Exact { value: 10 }));
        assert_eq!(known_links(&[3, 3, 3]).and_then(|k| k.upper()), Some(248));
        assert_eq!(known_links(&[6, 1, 1, 1, 1]), Some(Known::Range { lower: Some(75), upper: Some(76) }));
        assert_eq!(known_links(&[1; 6]), Some(Known::Exact { value: 1 }));
        assert_eq!(known_knots(&[1; 7]), Some(Known::Exact { value: 1 }));
        assert_eq!(known_knots(&[2, 2, 1, 1, 1, 1]), Some(Known::Exact { value: 2 }));
    }
}
