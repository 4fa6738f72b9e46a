//! Linking numbers, loop sums, Gauss diagrams and the Conway coefficient a2.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::diagram::{cycle_strand, loop_strand, Diagram, Orientation};
use crate::error::{Error, Result};
use crate::graph::{Cycle, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: i64) -> Parity {
        if v.rem_euclid(2) == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// A disjoint cycle pair with its linking number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub first: Cycle,
    pub second: Cycle,
    pub lk: i64,
    pub parity: Parity,
    pub shape: (usize, usize),
}

impl LinkRecord {
    pub fn new(first: Cycle, second: Cycle, lk: i64) -> LinkRecord {
        let (m, n) = (first.len(), second.len());
        LinkRecord { first, second, lk, parity: Parity::of(lk), shape: (m.min(n), m.max(n)) }
    }
}

/// A cycle with its a2 value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub cycle: Cycle,
    pub a2: i64,
}

/// Linking number of two vertex-disjoint cycles, each oriented by its
/// canonical vertex order.
pub fn linking_number(d: &Diagram, a: &Cycle, b: &Cycle) -> Result<i64> {
    if a.mask() & b.mask() != 0 {
        return Err(Error::NotDisjoint);
    }
    loop_linking_number(d, a.vertices(), b.vertices())
}

/// Linking number of two vertex-disjoint closed loops given as vertex walks.
///
/// Computed three ways (half the signed crossing total, and the sum over
/// crossings where either loop is over); disagreement is an internal error.
pub fn loop_linking_number(d: &Diagram, a: &[usize], b: &[usize]) -> Result<i64> {
    let sa: HashSet<usize> = a.iter().copied().collect();
    if b.iter().any(|v| sa.contains(v)) {
        return Err(Error::NotDisjoint);
    }
    let la = loop_strand(d, a)?;
    let lb = loop_strand(d, b)?;
    let dir_b: HashMap<usize, i64> = lb.steps.iter().copied().collect();
    let dir_a: HashMap<usize, i64> = la.steps.iter().copied().collect();
    let (mut total, mut a_over) = (0i64, 0i64);
    for ev in &la.events {
        if let Some(&db) = dir_b.get(&ev.partner_edge) {
            let s = ev.sign as i64 * db;
            total += s;
            if ev.over {
                a_over += s;
            }
        }
    }
    let mut b_over = 0i64;
    for ev in &lb.events {
        if let Some(&da) = dir_a.get(&ev.partner_edge) {
            if ev.over {
                b_over += ev.sign as i64 * da;
            }
        }
    }
    if total % 2 != 0 || total / 2 != a_over || a_over != b_over {
        return Err(Error::Internal(format!(
            "linking number mismatch: half total {total}/2, a over {a_over}, b over {b_over}"
        )));
    }
    Ok(a_over)
}

/// Result of adding two loops along a shared path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleSum {
    /// One loop, or the two inputs unchanged when they are vertex-disjoint.
    pub loops: Vec<Vec<usize>>,
    /// The second loop was reversed so that the shared path runs opposite
    /// ways; linking numbers then satisfy lk(S, sum) = lk(S, c) + lk(S, rev e).
    pub second_reversed: bool,
}

fn check_loop(g: &Graph, l: &[usize]) -> Result<Vec<(usize, usize)>> {
    if l.len() < 3 {
        return Err(Error::InvalidArgument(format!("loop {l:?} is too short")));
    }
    let mut seen = HashSet::new();
    for &v in l {
        if v >= g.vertex_count() || !seen.insert(v) {
            return Err(Error::InvalidArgument(format!("loop {l:?} is not simple")));
        }
    }
    let k = l.len();
    (0..k)
        .map(|i| {
            let (u, v) = (l[i], l[(i + 1) % k]);
            if g.adjacent(u, v) {
                Ok((u.min(v), u.max(v)))
            } else {
                Err(Error::InvalidArgument(format!("{u}-{v} is not an edge")))
            }
        })
        .collect()
}

/// The loop `c + e`: symmetric difference of two loops that share one path.
pub fn cycle_sum(g: &Graph, c: &[usize], e: &[usize]) -> Result<CycleSum> {
    let ce = check_loop(g, c)?;
    let ee = check_loop(g, e)?;
    let e_set: HashSet<(usize, usize)> = ee.iter().copied().collect();
    let shared: Vec<bool> = ce.iter().map(|x| e_set.contains(x)).collect();
    let shared_vertices: HashSet<usize> = c.iter().copied().filter(|v| e.contains(v)).collect();
    let k = c.len();
    if shared.iter().all(|&s| !s) {
        if shared_vertices.is_empty() {
            return Ok(CycleSum { loops: vec![c.to_vec(), e.to_vec()], second_reversed: false });
        }
        return Err(Error::DisconnectedIntersection("loops share vertices but no edges".into()));
    }
    if shared.iter().all(|&s| s) && ee.len() == ce.len() {
        return Err(Error::DisconnectedIntersection("loops are identical".into()));
    }
    // the shared steps must form one cyclic run
    let starts: Vec<usize> = (0..k).filter(|&i| shared[i] && !shared[(i + k - 1) % k]).collect();
    if starts.len() != 1 {
        return Err(Error::DisconnectedIntersection(format!("{} separate shared paths", starts.len())));
    }
    let s = starts[0];
    let len = (0..k).take_while(|&j| shared[(s + j) % k]).count();
    let path: Vec<usize> = (0..=len).map(|j| c[(s + j) % k]).collect();
    if shared_vertices.len() != path.len() {
        return Err(Error::DisconnectedIntersection("loops meet away from the shared path".into()));
    }
    let (p, q) = (path[0], path[len]);
    let mut e2 = e.to_vec();
    let ip = e2.iter().position(|&v| v == p).ok_or_else(|| Error::Internal("path start missing".into()))?;
    let reversed = e2[(ip + 1) % e2.len()] == path[1];
    if reversed {
        e2.reverse();
    }
    // walk c from q back round to p, then e2 from p to q
    let mut out: Vec<usize> = (0..=k - len).map(|j| c[(s + len + j) % k]).collect();
    let m = e2.len();
    let ip = e2.iter().position(|&v| v == p).ok_or_else(|| Error::Internal("path start missing".into()))?;
    let mut j = 1;
    while e2[(ip + j) % m] != q {
        out.push(e2[(ip + j) % m]);
        j += 1;
    }
    Ok(CycleSum { loops: vec![out], second_reversed: reversed })
}

/// One passage through a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussEvent {
    pub crossing: usize,
    pub over: bool,
    pub sign: i8,
}

/// Self-crossings of a closed curve in traversal order from a base point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussDiagram {
    events: Vec<GaussEvent>,
}

impl GaussDiagram {
    pub fn new(events: Vec<GaussEvent>) -> Result<GaussDiagram> {
        let mut seen: HashMap<usize, GaussEvent> = HashMap::new();
        let mut done = HashSet::new();
        for ev in &events {
            if done.contains(&ev.crossing) {
                return Err(Error::InvalidArgument(format!("crossing {} appears more than twice", ev.crossing)));
            }
            if ev.sign != 1 && ev.sign != -1 {
                return Err(Error::InvalidArgument(format!("crossing {} has sign {}", ev.crossing, ev.sign)));
            }
            match seen.remove(&ev.crossing) {
                None => {
                    seen.insert(ev.crossing, *ev);
                }
                Some(first) => {
                    if first.over == ev.over || first.sign != ev.sign {
                        return Err(Error::InvalidArgument(format!("inconsistent passages at crossing {}", ev.crossing)));
                    }
                    done.insert(ev.crossing);
                }
            }
        }
        if let Some(c) = seen.keys().next() {
            return Err(Error::InvalidArgument(format!("crossing {c} appears once")));
        }
        Ok(GaussDiagram { events })
    }

    pub fn events(&self) -> &[GaussEvent] {
        &self.events
    }

    pub fn chord_count(&self) -> usize {
        self.events.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Move the base point forward by `k` events.
    pub fn rotated(&self, k: usize) -> GaussDiagram {
        let mut events = self.events.clone();
        if !events.is_empty() {
            let k = k % events.len();
            events.rotate_left(k);
        }
        GaussDiagram { events }
    }

    /// Event positions of each chord, first passage first.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        let mut first: HashMap<usize, usize> = HashMap::new();
        let mut out = Vec::new();
        for (i, ev) in self.events.iter().enumerate() {
            match first.remove(&ev.crossing) {
                Some(j) => out.push((j, i)),
                None => {
                    first.insert(ev.crossing, i);
                }
            }
        }
        out.sort();
        out
    }
}

/// Gauss diagram of a cycle's self-crossings, traversed in canonical order.
pub fn gauss_diagram(d: &Diagram, c: &Cycle) -> Result<GaussDiagram> {
    let strand = cycle_strand(d, c, Orientation::Forward)?;
    GaussDiagram::new(
        strand
            .events
            .iter()
            .filter(|e| e.self_crossing)
            .map(|e| GaussEvent { crossing: e.crossing, over: e.over, sign: e.sign })
            .collect(),
    )
}

/// a2 by counting pairs of interleaved chords: over chord pairs met in the
/// order a, b, a, b where `a` is first passed underneath and `b` first passed
/// over, summing the sign products.
pub fn conway_a2(g: &GaussDiagram) -> i64 {
    if g.chord_count() < 3 {
        return 0;
    }
    let chords = g.chords();
    let ev = g.events();
    let mut total = 0i64;
    for (i, &(a1, a2)) in chords.iter().enumerate() {
        if ev[a1].over {
            continue;
        }
        for &(b1, b2) in &chords[i + 1..] {
            // chords are sorted by first passage, so a1 < b1
            if b1 < a2 && a2 < b2 && ev[b1].over {
                total += ev[a1].sign as i64 * ev[b1].sign as i64;
            }
        }
    }
    total
}

pub const DEFAULT_ORACLE_CAP: usize = 12;

type Code = Vec<Vec<GaussEvent>>;

/// Relabel crossings by first appearance so equal diagrams share a memo key.
fn normalize(code: &Code) -> Code {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    code.iter()
        .map(|comp| {
            comp.iter()
                .map(|e| {
                    let n = ids.len();
                    let id = *ids.entry(e.crossing).or_insert(n);
                    GaussEvent { crossing: id, ..*e }
                })
                .collect()
        })
        .collect()
}

fn add_poly(a: &mut Vec<i64>, b: &[i64], shift: usize, scale: i64) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, 0);
    }
    for (i, &v) in b.iter().enumerate() {
        a[i + shift] += scale * v;
    }
}

fn conway(code: Code, memo: &mut HashMap<Code, Vec<i64>>) -> Vec<i64> {
    let code = normalize(&code);
    if let Some(p) = memo.get(&code) {
        return p.clone();
    }
    // first crossing met from below when walking components in order
    let mut met = HashSet::new();
    let mut target = None;
    'walk: for comp in &code {
        for ev in comp {
            if met.insert(ev.crossing) && !ev.over {
                target = Some(*ev);
                break 'walk;
            }
        }
    }
    let result = match target {
        // descending: a stacked unlink
        None => {
            if code.len() == 1 {
                vec![1]
            } else {
                vec![0]
            }
        }
        Some(t) => {
            let switched: Code = code
                .iter()
                .map(|comp| {
                    comp.iter()
                        .map(|e| if e.crossing == t.crossing { GaussEvent { crossing: e.crossing, over: !e.over, sign: -e.sign } } else { *e })
                        .collect()
                })
                .collect();
            let mut p = conway(switched, memo);
            let smoothed = smooth(&code, t.crossing);
            let q = conway(smoothed, memo);
            add_poly(&mut p, &q, 1, t.sign as i64);
            while p.len() > 1 && p.last() == Some(&0) {
                p.pop();
            }
            p
        }
    };
    memo.insert(code, result.clone());
    result
}

/// Oriented smoothing at crossing `c`.
fn smooth(code: &Code, c: usize) -> Code {
    let mut hits = Vec::new();
    for (i, comp) in code.iter().enumerate() {
        for (p, e) in comp.iter().enumerate() {
            if e.crossing == c {
                hits.push((i, p));
            }
        }
    }
    let (i, p1) = hits[0];
    let (j, p2) = hits[1];
    let mut out: Code = Vec::with_capacity(code.len() + 1);
    if i == j {
        let comp = &code[i];
        let x: Vec<GaussEvent> = comp[p1 + 1..p2].to_vec();
        let y: Vec<GaussEvent> = comp[p2 + 1..].iter().chain(&comp[..p1]).copied().collect();
        for (k, other) in code.iter().enumerate() {
            if k == i {
                out.push(x.clone());
                out.push(y.clone());
            } else {
                out.push(other.clone());
            }
        }
    } else {
        let a = &code[i];
        let b = &code[j];
        let merged: Vec<GaussEvent> = a[p1 + 1..]
            .iter()
            .chain(&a[..p1])
            .chain(&b[p2 + 1..])
            .chain(&b[..p2])
            .copied()
            .collect();
        for (k, other) in code.iter().enumerate() {
            if k == i {
                out.push(merged.clone());
            } else if k != j {
                out.push(other.clone());
            }
        }
    }
    out
}

/// Conway polynomial coefficients (index = power of z) of a link given by
/// one Gauss code per component, by skein recursion.
pub fn conway_polynomial(components: &[Vec<GaussEvent>]) -> Vec<i64> {
    conway(components.to_vec(), &mut HashMap::new())
}

/// a2 by skein recursion, refusing inputs with more than `cap` crossings.
pub fn a2_skein(g: &GaussDiagram, cap: usize) -> Result<i64> {
    let count = g.chord_count();
    if count > cap {
        return Err(Error::OracleCapExceeded { count, cap });
    }
    let p = conway_polynomial(&[g.events().to_vec()]);
    Ok(p.get(2).copied().unwrap_or(0))
}

/// Independent a2 for a cycle of a diagram.
pub fn a2_skein_oracle(d: &Diagram, c: &Cycle, cap: usize) -> Result<i64> {
    a2_skein(&gauss_diagram(d, c)?, cap)
}
