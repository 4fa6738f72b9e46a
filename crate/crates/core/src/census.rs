//! Whole-diagram link and knot censuses, the K3,3 and pyramid classifiers,
//! Conway-Gordon parity audits, table verdicts and local search.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{knot_lower_bound, knot_lower_bound_detail, known_knots, known_links, link_lower_bound};
use crate::diagram::{loop_strand, CrossingKey, Diagram};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{disjoint_cycle_pairs, enumerate_cycles, partition_name, Cycle, CyclePair, Graph};
use crate::invariants::{conway_a2, gauss_diagram, KnotRecord, LinkRecord};
use crate::tables::Known;

/// Environment variable holding the worker count for parallel censuses.
pub const WORKERS_ENV: &str = "LINKCENSUS_WORKERS";

/// Run `f` on a pool sized by [`WORKERS_ENV`], or the global pool.
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusKind {
    Links,
    Knots,
    Both,
}

impl CensusKind {
    fn links(self) -> bool {
        self != CensusKind::Knots
    }

    fn knots(self) -> bool {
        self != CensusKind::Links
    }
}

impl FromStr for CensusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "links" => Ok(CensusKind::Links),
            "knots" => Ok(CensusKind::Knots),
            "both" => Ok(CensusKind::Both),
            _ => Err(Error::InvalidArgument(format!("unknown census kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: usize,
    pub parts: Option<Vec<usize>>,
    pub name: Option<String>,
}

impl GraphSpec {
    pub fn of(g: &Graph) -> GraphSpec {
        GraphSpec {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            parts: g.parts().map(<[usize]>::to_vec),
            name: g.parts().map(partition_name),
        }
    }
}

/// Links of one (m, n) shape, split by parity of the linking number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeCount {
    pub m: usize,
    pub n: usize,
    pub odd: u64,
    pub even: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkSummary {
    pub total: u64,
    pub odd: u64,
    pub even: u64,
    pub by_shape: Vec<ShapeCount>,
    pub pairs_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthCount {
    pub length: usize,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnotSummary {
    pub total: u64,
    pub by_length: Vec<LengthCount>,
    pub cycles_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub link_lower: Option<u64>,
    pub knot_lower: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub graph: GraphSpec,
    pub crossings: usize,
    pub links: Option<LinkSummary>,
    pub knots: Option<KnotSummary>,
    pub bounds: BoundCheck,
    pub caveats: Vec<String>,
}

impl CensusReport {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn link_total(&self) -> Option<u64> {
        self.links.as_ref().map(|l| l.total)
    }

    pub fn knot_total(&self) -> Option<u64> {
        self.knots.as_ref().map(|k| k.total)
    }
}

const LINK_CAVEAT: &str = "links are detected by nonzero linking number; pairs with linking number zero count as unlinked";
const KNOT_CAVEAT: &str = "knots are detected by a nonzero second Conway coefficient; cycles with a2 = 0 count as unknotted";

/// Signed crossing sums by ordered edge pair: `over[e * m + f]` adds the
/// sign (declared orientations) of every crossing where `e` passes over `f`.
fn over_matrix(d: &Diagram) -> Vec<i64> {
    let m = d.graph().edge_count();
    let mut over = vec![0i64; m * m];
    for c in d.crossings() {
        if !c.key.is_self_edge() {
            over[c.over_edge() * m + c.under_edge()] += c.sign as i64;
        }
    }
    over
}

fn oriented_steps(g: &Graph, c: &Cycle) -> Vec<(usize, i64)> {
    c.steps().map(|(u, v)| g.oriented_edge(u, v).expect("cycle edges exist")).collect()
}

/// lk from the over matrix, once with the first loop over and once with the
/// second; they must agree.
fn matrix_lk(over: &[i64], m: usize, a: &[(usize, i64)], b: &[(usize, i64)]) -> Result<i64> {
    let (mut a_over, mut b_over) = (0i64, 0i64);
    for &(e, de) in a {
        for &(f, df) in b {
            a_over += de * df * over[e * m + f];
            b_over += de * df * over[f * m + e];
        }
    }
    if a_over != b_over {
        return Err(Error::Internal(format!("over sums disagree: {a_over} vs {b_over}")));
    }
    Ok(a_over)
}

struct Prepared {
    cycles: Vec<Cycle>,
    steps: Vec<Vec<(usize, i64)>>,
}

fn prepare(g: &Graph) -> Result<Prepared> {
    let n = g.vertex_count();
    let cycles = if n < 3 { Vec::new() } else { enumerate_cycles(g, 3, n)? };
    let steps = cycles.iter().map(|c| oriented_steps(g, c)).collect();
    Ok(Prepared { cycles, steps })
}

type Cancel<'a> = &'a (dyn Fn() -> bool + Sync);

fn never() -> bool {
    false
}

fn pair_lks(d: &Diagram, p: &Prepared, pairs: &[CyclePair], cancelled: Cancel) -> Result<Vec<i64>> {
    let over = over_matrix(d);
    let m = d.graph().edge_count();
    pairs
        .par_iter()
        .map(|pr| {
            if cancelled() {
                return Err(Error::Cancelled);
            }
            matrix_lk(&over, m, &p.steps[pr.first], &p.steps[pr.second])
        })
        .collect()
}

fn cycle_a2s(d: &Diagram, cycles: &[Cycle], cancelled: Cancel) -> Result<Vec<i64>> {
    cycles
        .par_iter()
        .map(|c| {
            if cancelled() {
                return Err(Error::Cancelled);
            }
            cycle_a2(d, c)
        })
        .collect()
}

fn cycle_a2(d: &Diagram, c: &Cycle) -> Result<i64> {
    Ok(conway_a2(&gauss_diagram(d, c)?))
}

/// Every disjoint cycle pair with nonzero linking number.
pub fn link_records(d: &Diagram) -> Result<Vec<LinkRecord>> {
    with_workers(|| {
        let p = prepare(d.graph())?;
        let pairs = disjoint_cycle_pairs(&p.cycles);
        let lks = pair_lks(d, &p, &pairs, &never)?;
        Ok(pairs
            .iter()
            .zip(lks)
            .filter(|(_, lk)| *lk != 0)
            .map(|(pr, lk)| LinkRecord::new(p.cycles[pr.first].clone(), p.cycles[pr.second].clone(), lk))
            .collect())
    })
}

/// Every cycle with nonzero a2.
pub fn knot_records(d: &Diagram) -> Result<Vec<KnotRecord>> {
    with_workers(|| {
        let p = prepare(d.graph())?;
        let a2 = cycle_a2s(d, &p.cycles, &never)?;
        Ok(p.cycles.iter().zip(a2).filter(|(_, a)| *a != 0).map(|(c, a2)| KnotRecord { cycle: c.clone(), a2 }).collect())
    })
}

fn summarize_links(pairs: &[CyclePair], lks: &[i64]) -> LinkSummary {
    let mut shapes: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
    for (pr, &lk) in pairs.iter().zip(lks) {
        if lk != 0 {
            let e = shapes.entry(pr.shape).or_default();
            if lk % 2 != 0 {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let by_shape: Vec<ShapeCount> = shapes.into_iter().map(|((m, n), (odd, even))| ShapeCount { m, n, odd, even }).collect();
    let odd = by_shape.iter().map(|s| s.odd).sum();
    let even = by_shape.iter().map(|s| s.even).sum();
    LinkSummary { total: odd + even, odd, even, by_shape, pairs_examined: pairs.len() as u64 }
}

fn summarize_knots(cycles: &[Cycle], a2: &[i64]) -> KnotSummary {
    let mut lengths: BTreeMap<usize, u64> = BTreeMap::new();
    for (c, &a) in cycles.iter().zip(a2) {
        if a != 0 {
            *lengths.entry(c.len()).or_default() += 1;
        }
    }
    let by_length: Vec<LengthCount> = lengths.into_iter().map(|(length, count)| LengthCount { length, count }).collect();
    KnotSummary { total: by_length.iter().map(|l| l.count).sum(), by_length, cycles_examined: cycles.len() as u64 }
}

fn bound_check(g: &Graph) -> BoundCheck {
    match g.parts() {
        Some(p) => BoundCheck {
            link_lower: link_lower_bound(p),
            knot_lower: knot_lower_bound(p),
            notes: knot_lower_bound_detail(p).map(|b| b.notes).unwrap_or_default(),
        },
        None => BoundCheck { link_lower: None, knot_lower: None, notes: Vec::new() },
    }
}

fn enforce(what: &'static str, count: u64, bound: Option<u64>) -> Result<()> {
    match bound {
        Some(b) if count < b => Err(Error::BoundViolated { what, count, bound: b }),
        _ => Ok(()),
    }
}

/// Link and/or knot census of a diagram. A count below a proven lower
/// bound is reported as [`Error::BoundViolated`].
pub fn census(d: &Diagram, kind: CensusKind) -> Result<CensusReport> {
    census_with(d, kind, &never)
}

/// [`census`] that gives up with [`Error::Cancelled`] once `cancelled`
/// returns true.
pub fn census_with(d: &Diagram, kind: CensusKind, cancelled: Cancel) -> Result<CensusReport> {
    with_workers(|| {
        let g = d.graph();
        let p = prepare(g)?;
        let bounds = bound_check(g);
        let mut caveats = Vec::new();
        let links = if kind.links() {
            let pairs = disjoint_cycle_pairs(&p.cycles);
            let lks = pair_lks(d, &p, &pairs, cancelled)?;
            let s = summarize_links(&pairs, &lks);
            enforce("link", s.total, bounds.link_lower)?;
            caveats.push(LINK_CAVEAT.to_string());
            Some(s)
        } else {
            None
        };
        let knots = if kind.knots() {
            let a2 = cycle_a2s(d, &p.cycles, cancelled)?;
            let s = summarize_knots(&p.cycles, &a2);
            enforce("knot", s.total, bounds.knot_lower)?;
            caveats.push(KNOT_CAVEAT.to_string());
            Some(s)
        } else {
            None
        };
        Ok(CensusReport { graph: GraphSpec::of(g), crossings: d.crossings().len(), links, knots, bounds, caveats })
    })
}

pub fn count_links(d: &Diagram) -> Result<CensusReport> {
    census(d, CensusKind::Links)
}

pub fn count_knots(d: &Diagram) -> Result<CensusReport> {
    census(d, CensusKind::Knots)
}

/// A graph's main component together with a separate closed loop.
struct WithLoop {
    main: Vec<usize>,
    main_mask: u64,
    loop_walk: Vec<usize>,
}

fn split_off_loop(g: &Graph) -> Result<WithLoop> {
    let comps = g.components();
    if comps.len() != 2 {
        return Err(Error::WrongGraph(format!("expected two components, found {}", comps.len())));
    }
    let is_loop = |c: &Vec<usize>| c.len() >= 3 && c.iter().all(|&v| g.degree(v) == 2);
    let (main, lp) = if is_loop(&comps[1]) {
        (comps[0].clone(), comps[1].clone())
    } else if is_loop(&comps[0]) {
        (comps[1].clone(), comps[0].clone())
    } else {
        return Err(Error::WrongGraph("no component is a simple loop".into()));
    };
    let mut walk = vec![lp[0]];
    let mut prev = usize::MAX;
    loop {
        let cur = *walk.last().unwrap_or(&lp[0]);
        let mask = g.neighbors_mask(cur);
        let next = (0..g.vertex_count()).find(|&v| mask >> v & 1 == 1 && v != prev).unwrap_or(lp[0]);
        if next == lp[0] {
            break;
        }
        prev = cur;
        walk.push(next);
    }
    let main_mask = main.iter().fold(0u64, |m, &v| m | 1 << v);
    Ok(WithLoop { main, main_mask, loop_walk: walk })
}

/// lk of the loop with every cycle of the main component, in cycle order.
fn loop_linking(d: &Diagram, w: &WithLoop) -> Result<Vec<(Cycle, i64)>> {
    let g = d.graph();
    let cycles: Vec<Cycle> =
        enumerate_cycles(g, 3, g.vertex_count())?.into_iter().filter(|c| c.mask() & !w.main_mask == 0).collect();
    let over = over_matrix(d);
    let m = g.edge_count();
    let ls = loop_strand(d, &w.loop_walk)?;
    cycles
        .into_iter()
        .map(|c| {
            let lk = matrix_lk(&over, m, &ls.steps, &oriented_steps(g, &c))?;
            Ok((c, lk))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum K33Pattern {
    /// 4 squares and 4 hexagons
    FourFour,
    /// 6 squares and 2 hexagons
    SixTwo,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K33Classification {
    pub pattern: Option<K33Pattern>,
    pub odd_squares: Vec<Cycle>,
    pub odd_hexagons: Vec<Cycle>,
    /// lk of the loop with each of the 15 cycles, loop oriented along its
    /// walk from its smallest vertex.
    pub linking: Vec<(Cycle, i64)>,
}

fn check_k33(g: &Graph, main: &[usize]) -> Result<()> {
    let wrong = || Error::WrongGraph("main component is not K3,3".into());
    if main.len() != 6 || main.iter().any(|&v| g.degree(v) != 3) {
        return Err(wrong());
    }
    let side: Vec<usize> = main.iter().copied().filter(|&v| !g.adjacent(main[0], v)).collect();
    if side.len() != 3 || side.iter().any(|&u| side.iter().any(|&v| g.adjacent(u, v))) {
        return Err(wrong());
    }
    Ok(())
}

/// Parity pattern of a loop against the 15 cycles of a K3,3. An odd loop
/// must be odd with exactly 8 cycles, split 4+4 or 6+2; anything else is a
/// [`Error::Classification`].
pub fn classify_k33_pattern(d: &Diagram) -> Result<K33Classification> {
    let g = d.graph();
    let w = split_off_loop(g)?;
    check_k33(g, &w.main)?;
    let linking = loop_linking(d, &w)?;
    if linking.len() != 15 {
        return Err(Error::Internal(format!("K3,3 has {} cycles", linking.len())));
    }
    let odd = |len: usize| -> Vec<Cycle> {
        linking.iter().filter(|(c, lk)| c.len() == len && lk % 2 != 0).map(|(c, _)| c.clone()).collect()
    };
    let (odd_squares, odd_hexagons) = (odd(4), odd(6));
    let pattern = match (odd_squares.len(), odd_hexagons.len()) {
        (0, 0) => None,
        (4, 4) => Some(K33Pattern::FourFour),
        (6, 2) => Some(K33Pattern::SixTwo),
        (s, h) => return Err(Error::Classification(format!("loop is odd with {s} squares and {h} hexagons"))),
    };
    Ok(K33Classification { pattern, odd_squares, odd_hexagons, linking })
}

/// Odd-linking tallies of a loop against a pyramid `K2,2,1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PyramidType {
    /// 1..=6
    pub kind: u8,
    pub odd_triangles: usize,
    pub odd_squares: usize,
    pub odd_pentagons: usize,
    pub base_square_odd: bool,
}

/// `(kind, triangles, squares, pentagons, base square must be odd)`. Type 6
/// has the same tallies as type 5; five odd squares is impossible with three
/// odd triangles, as the squares through the apex are sums of two triangles.
pub const PYRAMID_ROWS: [(u8, usize, usize, usize, bool); 6] =
    [(1, 1, 3, 3, true), (2, 2, 2, 2, false), (3, 2, 4, 2, false), (4, 4, 0, 4, false), (5, 3, 3, 1, true), (6, 3, 3, 1, true)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PyramidClassification {
    pub pyramid_type: Option<PyramidType>,
    pub apex: usize,
    pub base: Vec<usize>,
    pub linking: Vec<(Cycle, i64)>,
}

fn pyramid_shape(g: &Graph, main: &[usize]) -> Result<(usize, Vec<usize>)> {
    let wrong = || Error::WrongGraph("main component is not K2,2,1".into());
    if main.len() != 5 {
        return Err(wrong());
    }
    let apexes: Vec<usize> = main.iter().copied().filter(|&v| g.degree(v) == 4).collect();
    let rim: Vec<usize> = main.iter().copied().filter(|&v| g.degree(v) == 3).collect();
    if apexes.len() == 5 || rim.len() != 4 || apexes.is_empty() {
        return Err(wrong());
    }
    // with two or more degree-4 vertices this is not K2,2,1
    if apexes.len() != 1 {
        return Err(wrong());
    }
    let apex = apexes[0];
    let mut base = vec![rim[0]];
    while base.len() < 4 {
        let cur = *base.last().unwrap_or(&rim[0]);
        let next = rim
            .iter()
            .copied()
            .find(|&v| g.adjacent(cur, v) && !base.contains(&v))
            .ok_or_else(wrong)?;
        base.push(next);
    }
    if !g.adjacent(base[3], base[0]) {
        return Err(wrong());
    }
    Ok((apex, base))
}

/// Type of a loop linked with a pyramid. `None` when every face is evenly
/// linked; a loop odd with some face but matching no row is an
/// [`Error::Classification`].
pub fn classify_pyramid_type(d: &Diagram) -> Result<PyramidClassification> {
    let g = d.graph();
    let w = split_off_loop(g)?;
    let (apex, base) = pyramid_shape(g, &w.main)?;
    let linking = loop_linking(d, &w)?;
    if linking.len() != 13 {
        return Err(Error::Internal(format!("pyramid has {} cycles", linking.len())));
    }
    let base_mask = base.iter().fold(0u64, |m, &v| m | 1 << v);
    let is_odd = |lk: i64| lk % 2 != 0;
    let tally = |len: usize| linking.iter().filter(|(c, lk)| c.len() == len && is_odd(*lk)).count();
    let base_lk = linking.iter().find(|(c, _)| c.mask() == base_mask).map(|(_, lk)| *lk).unwrap_or(0);
    let base_square_odd = is_odd(base_lk);
    let odd_faces = linking.iter().filter(|(c, lk)| (c.len() == 3 || c.mask() == base_mask) && is_odd(*lk)).count();
    let (t, s, p) = (tally(3), tally(4), tally(5));
    if odd_faces == 0 {
        if t + s + p != 0 {
            return Err(Error::Classification("odd cycles without an odd face".into()));
        }
        return Ok(PyramidClassification { pyramid_type: None, apex, base, linking });
    }
    if t + s + p < 6 {
        return Err(Error::Classification(format!("only {} odd cycles", t + s + p)));
    }
    let mut kinds: Vec<u8> = PYRAMID_ROWS
        .iter()
        .filter(|r| (r.1, r.2, r.3) == (t, s, p) && (!r.4 || base_square_odd))
        .map(|r| r.0)
        .collect();
    if kinds.len() == 2 {
        // types 5 and 6 differ in their evenly linked cycles
        let even_triangle = linking.iter().find(|(c, lk)| c.len() == 3 && !is_odd(*lk)).map(|(_, lk)| *lk).unwrap_or(0);
        let even_pentagon = linking.iter().any(|(c, lk)| c.len() == 5 && !is_odd(*lk) && *lk != 0);
        kinds = if even_triangle != 0 {
            vec![6]
        } else if even_pentagon {
            vec![5]
        } else {
            vec![]
        };
    }
    match kinds.as_slice() {
        [kind] => Ok(PyramidClassification {
            pyramid_type: Some(PyramidType { kind: *kind, odd_triangles: t, odd_squares: s, odd_pentagons: p, base_square_odd }),
            apex,
            base,
            linking,
        }),
        _ => Err(Error::Classification(format!(
            "odd with {t} triangles, {s} squares, {p} pentagons (base odd: {base_square_odd}) matches no type"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityMode {
    /// K6: linking numbers of the 10 disjoint triangle pairs
    Links,
    /// K7: a2 of the 360 Hamiltonian cycles
    Knots,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub mode: ParityMode,
    pub terms: usize,
    pub sum: i64,
    pub parity: u8,
}

fn is_complete(g: &Graph, n: usize) -> bool {
    g.vertex_count() == n && g.edge_count() == n * (n - 1) / 2
}

/// The Conway-Gordon sum mod 2 of a K6 or K7 diagram.
pub fn conway_gordon_parity(d: &Diagram) -> Result<ParityReport> {
    let g = d.graph();
    let (mode, terms) = if is_complete(g, 6) {
        let tri = enumerate_cycles(g, 3, 3)?;
        let pairs = disjoint_cycle_pairs(&tri);
        let over = over_matrix(d);
        let m = g.edge_count();
        let lks = pairs
            .iter()
            .map(|p| matrix_lk(&over, m, &oriented_steps(g, &tri[p.first]), &oriented_steps(g, &tri[p.second])))
            .collect::<Result<Vec<i64>>>()?;
        (ParityMode::Links, lks)
    } else if is_complete(g, 7) {
        let ham = enumerate_cycles(g, 7, 7)?;
        let a2 = with_workers(|| ham.par_iter().map(|c| cycle_a2(d, c)).collect::<Result<Vec<i64>>>())?;
        (ParityMode::Knots, a2)
    } else {
        return Err(Error::WrongGraph(format!(
            "parity audit needs K6 or K7, got {} vertices and {} edges",
            g.vertex_count(),
            g.edge_count()
        )));
    };
    let sum: i64 = terms.iter().sum();
    Ok(ParityReport { mode, terms: terms.len(), sum, parity: sum.rem_euclid(2) as u8 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    MeetsExact,
    WitnessesUpperBound,
    RespectsLowerBound,
    ExactMismatch,
    NoReference,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::MeetsExact => "meets-exact",
            VerdictKind::WitnessesUpperBound => "witnesses-upper-bound",
            VerdictKind::RespectsLowerBound => "respects-lower-bound",
            VerdictKind::ExactMismatch => "exact-mismatch",
            VerdictKind::NoReference => "no-reference",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    /// "links" or "knots"
    pub what: &'static str,
    pub count: u64,
    pub verdict: VerdictKind,
    pub reference: Option<Known>,
    pub lower_bound: Option<u64>,
    /// The count is below the reference upper bound.
    pub improves: bool,
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        self.verdict == VerdictKind::ExactMismatch
    }
}

fn judge(what: &'static str, count: u64, reference: Option<Known>, lower: Option<u64>) -> Result<Verdict> {
    let bound = reference.and_then(|k| k.exact()).into_iter().chain(lower).max();
    if let Some(b) = bound {
        if count < b {
            return Err(Error::BoundViolated { what, count, bound: b });
        }
    }
    let (verdict, improves) = match reference {
        Some(Known::Exact { value }) if count == value => (VerdictKind::MeetsExact, false),
        Some(Known::Exact { .. }) => (VerdictKind::ExactMismatch, false),
        Some(Known::Range { upper: Some(u), .. }) if count <= u => (VerdictKind::WitnessesUpperBound, count < u),
        _ if lower.is_some() => (VerdictKind::RespectsLowerBound, false),
        _ => (VerdictKind::NoReference, false),
    };
    Ok(Verdict { what, count, verdict, reference, lower_bound: lower, improves })
}

/// Compare a report against the reference values for `parts`.
pub fn verify_against_tables(parts: &[usize], report: &CensusReport) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    if let Some(c) = report.link_total() {
        out.push(judge("links", c, known_links(parts), link_lower_bound(parts))?);
    }
    if let Some(c) = report.knot_total() {
        out.push(judge("knots", c, known_knots(parts), knot_lower_bound(parts))?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Links,
    Knots,
    Both,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "links" => Ok(Objective::Links),
            "knots" => Ok(Objective::Knots),
            "both" => Ok(Objective::Both),
            _ => Err(Error::InvalidArgument(format!("unknown objective {s:?}"))),
        }
    }
}

/// Link and knot counts kept current under crossing flips.
pub struct Tracker {
    d: Diagram,
    objective: Objective,
    over: Vec<i64>,
    cycles: Vec<Cycle>,
    steps: Vec<Vec<(usize, i64)>>,
    /// sorted edge ids per cycle
    edge_sets: Vec<Vec<usize>>,
    cycles_with_edge: Vec<Vec<usize>>,
    pairs: Vec<CyclePair>,
    pairs_of_cycle: Vec<Vec<usize>>,
    lk: Vec<i64>,
    a2: Vec<i64>,
    links: u64,
    knots: u64,
}

impl Tracker {
    pub fn new(d: Diagram, objective: Objective) -> Result<Tracker> {
        let g = d.graph();
        let p = prepare(g)?;
        let m = g.edge_count();
        let edge_sets: Vec<Vec<usize>> = p
            .steps
            .iter()
            .map(|s| {
                let mut e: Vec<usize> = s.iter().map(|x| x.0).collect();
                e.sort_unstable();
                e
            })
            .collect();
        let mut cycles_with_edge = vec![Vec::new(); m];
        for (i, es) in edge_sets.iter().enumerate() {
            for &e in es {
                cycles_with_edge[e].push(i);
            }
        }
        let track_links = objective != Objective::Knots;
        let track_knots = objective != Objective::Links;
        let pairs = if track_links { disjoint_cycle_pairs(&p.cycles) } else { Vec::new() };
        let mut pairs_of_cycle = vec![Vec::new(); p.cycles.len()];
        for (i, pr) in pairs.iter().enumerate() {
            pairs_of_cycle[pr.first].push(i);
            pairs_of_cycle[pr.second].push(i);
        }
        let lk = with_workers(|| pair_lks(&d, &p, &pairs, &never))?;
        let a2 = if track_knots {
            with_workers(|| p.cycles.par_iter().map(|c| cycle_a2(&d, c)).collect::<Result<Vec<i64>>>())?
        } else {
            Vec::new()
        };
        let links = lk.iter().filter(|&&x| x != 0).count() as u64;
        let knots = a2.iter().filter(|&&x| x != 0).count() as u64;
        let over = over_matrix(&d);
        Ok(Tracker {
            d,
            objective,
            over,
            cycles: p.cycles,
            steps: p.steps,
            edge_sets,
            cycles_with_edge,
            pairs,
            pairs_of_cycle,
            lk,
            a2,
            links,
            knots,
        })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.d
    }

    pub fn links(&self) -> Option<u64> {
        (self.objective != Objective::Knots).then_some(self.links)
    }

    pub fn knots(&self) -> Option<u64> {
        (self.objective != Objective::Links).then_some(self.knots)
    }

    pub fn score(&self) -> u64 {
        self.links().unwrap_or(0) + self.knots().unwrap_or(0)
    }

    /// Flip one crossing, recounting only what it can affect: pairs with one
    /// cycle through each of its edges, and cycles through both.
    pub fn flip(&mut self, key: &CrossingKey) -> Result<()> {
        self.d = self.d.flip_crossing(key)?;
        let (e, f) = (key.a, key.b);
        let m = self.d.graph().edge_count();
        self.over[e * m + f] = 0;
        self.over[f * m + e] = 0;
        for c in self.d.crossings() {
            let (a, b) = (c.key.a, c.key.b);
            if (a, b) == (e, f) && a != b {
                self.over[c.over_edge() * m + c.under_edge()] += c.sign as i64;
            }
        }
        let has = |set: &Vec<usize>, x: usize| set.binary_search(&x).is_ok();
        if self.objective != Objective::Knots && e != f {
            for &ci in &self.cycles_with_edge[e] {
                for &pi in &self.pairs_of_cycle[ci] {
                    let pr = self.pairs[pi];
                    let other = if pr.first == ci { pr.second } else { pr.first };
                    if !has(&self.edge_sets[other], f) {
                        continue;
                    }
                    let new = matrix_lk(&self.over, m, &self.steps[pr.first], &self.steps[pr.second])?;
                    let old = std::mem::replace(&mut self.lk[pi], new);
                    self.links = self.links + (new != 0) as u64 - (old != 0) as u64;
                }
            }
        }
        if self.objective != Objective::Links {
            for &ci in &self.cycles_with_edge[e] {
                if has(&self.edge_sets[ci], f) {
                    let new = cycle_a2(&self.d, &self.cycles[ci])?;
                    let old = std::mem::replace(&mut self.a2[ci], new);
                    self.knots = self.knots + (new != 0) as u64 - (old != 0) as u64;
                }
            }
        }
        Ok(())
    }
}

/// Shared cancellation flag.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> CancelToken {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub objective: Objective,
    /// Number of proposed moves.
    pub budget: i64,
    pub seed: u64,
    /// Consecutive sideways moves accepted before sideways moves stop.
    pub plateau: u64,
    pub anneal: bool,
    pub temperature: f64,
    /// Also propose small vertex moves (full recount each time).
    pub jitter: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { objective: Objective::Links, budget: 1000, seed: 0, plateau: 20, anneal: false, temperature: 1.0, jitter: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Start,
    Flip,
    Jitter,
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: MoveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<CrossingKey>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub score: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub links: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knots: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: Diagram,
    pub best_score: u64,
    pub initial_score: u64,
    pub trace: Vec<TraceEvent>,
}

/// One JSON object per line.
pub fn trace_to_jsonl(trace: &[TraceEvent]) -> String {
    trace.iter().map(|e| serde_json::to_string(e).expect("event serializes") + "\n").collect()
}

fn check_search_bounds(t: &Tracker) -> Result<()> {
    if let Some(p) = t.diagram().graph().parts() {
        if let Some(l) = t.links() {
            enforce("link", l, link_lower_bound(p))?;
        }
        if let Some(k) = t.knots() {
            enforce("knot", k, knot_lower_bound(p))?;
        }
    }
    Ok(())
}

fn event(t: &Tracker, step: u64, kind: MoveKind, key: Option<CrossingKey>, vertex: Option<usize>) -> TraceEvent {
    TraceEvent { step, kind, key, vertex, score: t.score(), links: t.links(), knots: t.knots() }
}

fn jittered(d: &Diagram, rng: &mut ChaCha8Rng) -> Option<(Diagram, usize)> {
    let n = d.graph().vertex_count();
    if n == 0 {
        return None;
    }
    let v = rng.gen_range(0..n);
    let ((x0, y0), (x1, y1)) = d.drawing().bounding_box();
    let r = (((x1 - x0).max(y1 - y0) / 50.0).round() as i64).max(1);
    let p = &d.drawing().positions()[v];
    let q = Point::new(&p.x + num_rational::BigRational::from_integer(rng.gen_range(-r..=r).into()), &p.y + num_rational::BigRational::from_integer(rng.gen_range(-r..=r).into()));
    d.move_vertex(v, q).ok().map(|(d, _)| (d, v))
}

/// Greedy (or annealed) walk over crossing flips minimizing the objective.
pub fn local_search_minimize(d: &Diagram, opts: &SearchOptions) -> Result<SearchResult> {
    local_search_minimize_with(d, opts, &|| false)
}

/// As [`local_search_minimize`], polling `cancelled` before every move.
pub fn local_search_minimize_with(d: &Diagram, opts: &SearchOptions, cancelled: &(dyn Fn() -> bool + Sync)) -> Result<SearchResult> {
    if opts.budget <= 0 {
        return Err(Error::InvalidArgument(format!("search budget must be positive, got {}", opts.budget)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = Tracker::new(d.clone(), opts.objective)?;
    check_search_bounds(&t)?;
    let initial_score = t.score();
    let mut best = (t.score(), t.diagram().clone());
    let mut trace = vec![event(&t, 0, MoveKind::Start, None, None)];
    let mut sideways = 0u64;
    for step in 1..=opts.budget as u64 {
        if cancelled() {
            return Err(Error::Cancelled);
        }
        let before = t.score();
        let temp = opts.temperature * (1.0 - (step - 1) as f64 / opts.budget as f64);
        let accept = |after: u64, sideways: u64, rng: &mut ChaCha8Rng| -> bool {
            if after < before {
                true
            } else if after == before {
                sideways < opts.plateau
            } else if opts.anneal && temp > 0.0 {
                rng.gen_bool((-((after - before) as f64) / temp).exp().clamp(0.0, 1.0))
            } else {
                false
            }
        };
        let use_jitter = opts.jitter && rng.gen_bool(0.1);
        if use_jitter {
            let Some((nd, v)) = jittered(t.diagram(), &mut rng) else { continue };
            let cand = Tracker::new(nd, opts.objective)?;
            if accept(cand.score(), sideways, &mut rng) {
                t = cand;
                check_search_bounds(&t)?;
                trace.push(event(&t, step, MoveKind::Jitter, None, Some(v)));
            } else {
                continue;
            }
        } else {
            let n = t.diagram().crossings().len();
            if n == 0 {
                break;
            }
            let key = t.diagram().crossings()[rng.gen_range(0..n)].key;
            t.flip(&key)?;
            if accept(t.score(), sideways, &mut rng) {
                check_search_bounds(&t)?;
                trace.push(event(&t, step, MoveKind::Flip, Some(key), None));
            } else {
                t.flip(&key)?;
                continue;
            }
        }
        sideways = if t.score() == before { sideways + 1 } else { 0 };
        if t.score() < best.0 {
            best = (t.score(), t.diagram().clone());
        }
    }
    let last = trace.last().map(|e| e.step).unwrap_or(0);
    let mut done = event(&t, last, MoveKind::Done, None, None);
    done.score = best.0;
    trace.push(done);
    Ok(SearchResult { best: best.1, best_score: best.0, initial_score, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{fan_embedding, hopf_triangles, random_embedding, weave_embedding_n1111, with_loop};
    use crate::graph::{binomial, PartiteGraph};
    use crate::invariants::linking_number;

    #[test]
    fn small_fans() {
        let r = count_links(&fan_embedding(&[4, 4]).unwrap()).unwrap();
        let l = r.links.unwrap();
        assert_eq!((l.total, l.odd), (2, 2));
        assert_eq!(l.by_shape, vec![ShapeCount { m: 4, n: 4, odd: 2, even: 0 }]);
        let l = count_links(&fan_embedding(&[3, 3, 1]).unwrap()).unwrap().links.unwrap();
        assert_eq!(l.by_shape, vec![ShapeCount { m: 3, n: 4, odd: 1, even: 0 }]);
    }

    #[test]
    fn census_cancels() {
        let d = fan_embedding(&[4, 4]).unwrap();
        assert!(matches!(census_with(&d, CensusKind::Both, &|| true), Err(Error::Cancelled)));
        assert_eq!(census_with(&d, CensusKind::Both, &never).unwrap(), census(&d, CensusKind::Both).unwrap());
    }

    #[test]
    fn weave_five() {
        let l = count_links(&weave_embedding_n1111(5).unwrap()).unwrap().links.unwrap();
        assert_eq!(l.total, 34);
        assert_eq!(
            l.by_shape,
            vec![ShapeCount { m: 3, n: 3, odd: 4, even: 0 }, ShapeCount { m: 3, n: 4, odd: 20, even: 0 }, ShapeCount { m: 4, n: 4, odd: 10, even: 0 }]
        );
        assert_eq!(binomial(5, 4) * 2, 10);
    }

    #[test]
    fn records_agree_with_pairwise_lk() {
        let g = PartiteGraph::new(&[1; 6]).unwrap().into_graph();
        let d = random_embedding(&g, 3);
        let recs = link_records(&d).unwrap();
        for r in &recs {
            assert_eq!(linking_number(&d, &r.first, &r.second).unwrap(), r.lk);
        }
        assert_eq!(recs.len() as u64, count_links(&d).unwrap().link_total().unwrap());
    }

    #[test]
    fn tracker_matches_full_recount() {
        let g = PartiteGraph::new(&[1; 6]).unwrap().into_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut t = Tracker::new(random_embedding(&g, 11), Objective::Both).unwrap();
        for _ in 0..30 {
            let n = t.diagram().crossings().len();
            let key = t.diagram().crossings()[rng.gen_range(0..n)].key;
            t.flip(&key).unwrap();
            let fresh = Tracker::new(t.diagram().clone(), Objective::Both).unwrap();
            assert_eq!((t.links, t.knots), (fresh.links, fresh.knots));
        }
    }

    #[test]
    fn hopf_search_unlinks() {
        let d = hopf_triangles().unwrap();
        let opts = SearchOptions { budget: 10, ..SearchOptions::default() };
        let r = local_search_minimize(&d, &opts).unwrap();
        assert_eq!((r.initial_score, r.best_score), (1, 0));
        assert!(r.trace.iter().filter(|e| e.kind == MoveKind::Flip).count() <= 2);
        assert!(matches!(local_search_minimize(&d, &SearchOptions { budget: 0, ..opts.clone() }), Err(Error::InvalidArgument(_))));
        assert!(matches!(local_search_minimize_with(&d, &opts, &|| true), Err(Error::Cancelled)));
    }

    #[test]
    fn verdicts() {
        let r = count_links(&fan_embedding(&[5, 2, 2]).unwrap()).unwrap();
        let v = verify_against_tables(&[5, 2, 2], &r).unwrap();
        assert_eq!(v[0].verdict, VerdictKind::MeetsExact);
        let mut fake = r.clone();
        fake.links.as_mut().unwrap().total = 240;
        let v = verify_against_tables(&[3, 3, 3], &fake).unwrap();
        assert_eq!((v[0].verdict, v[0].improves), (VerdictKind::WitnessesUpperBound, true));
        fake.links.as_mut().unwrap().total = 73;
        assert!(matches!(verify_against_tables(&[4, 4, 1], &fake), Err(Error::BoundViolated { bound: 74, .. })));
        fake.links.as_mut().unwrap().total = 11;
        assert_eq!(verify_against_tables(&[5, 4], &fake).unwrap()[0].verdict, VerdictKind::ExactMismatch);
        fake.links.as_mut().unwrap().total = 5;
        assert_eq!(verify_against_tables(&[2, 1, 1, 1, 1], &fake).unwrap()[0].verdict, VerdictKind::NoReference);
    }

    #[test]
    fn parity_k6() {
        let g = PartiteGraph::new(&[1; 6]).unwrap().into_graph();
        for seed in 0..5 {
            let r = conway_gordon_parity(&random_embedding(&g, seed)).unwrap();
            assert_eq!((r.terms, r.parity), (10, 1));
        }
        let k5 = PartiteGraph::new(&[1; 5]).unwrap().into_graph();
        assert!(matches!(conway_gordon_parity(&random_embedding(&k5, 0)), Err(Error::WrongGraph(_))));
    }

    #[test]
    fn classifiers_on_random() {
        let k33 = with_loop(&[3, 3], 4).unwrap();
        let pyr = with_loop(&[2, 2, 1], 3).unwrap();
        let (mut odd33, mut oddp) = (0, 0);
        for seed in 0..200 {
            let c = classify_k33_pattern(&random_embedding(&k33, seed)).unwrap();
            odd33 += c.pattern.is_some() as usize;
            let p = classify_pyramid_type(&random_embedding(&pyr, seed)).unwrap();
            oddp += p.pyramid_type.is_some() as usize;
        }
        assert!(odd33 > 0 && oddp > 0);
        assert!(matches!(classify_k33_pattern(&random_embedding(&pyr, 0)), Err(Error::WrongGraph(_))));
    }

    #[test]
    fn report_json_is_stable() {
        let d = fan_embedding(&[4, 4]).unwrap();
        let a = census(&d, CensusKind::Both).unwrap().to_json();
        assert_eq!(a, census(&d, CensusKind::Both).unwrap().to_json());
        assert!(a.contains("\"caveats\""));
    }
}
