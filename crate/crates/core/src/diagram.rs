//! Planar diagrams: straight-segment polylines with over/under data at each
//! crossing, plus validation, editing and the JSON file format.
//!
//! Sign convention: a crossing is +1 when the over strand's direction is the
//! under strand's direction turned a quarter turn counterclockwise. Signs in
//! [`Crossing::sign`] use each edge's declared orientation `u -> v`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{classify, on_segment, turn, Coord, LPoint, Lattice, LatticeInt, Point, SegmentHit};
use crate::graph::{Cycle, Graph};

/// Which strand of a crossing key is meant: the lower-keyed `a` side or `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strand {
    A,
    B,
}

impl Strand {
    pub fn other(self) -> Strand {
        match self {
            Strand::A => Strand::B,
            Strand::B => Strand::A,
        }
    }
}

/// Canonical crossing key: `(a, sa) < (b, sb)` lexicographically, where
/// `a`, `b` are edge ids and `sa`, `sb` segment indices along those edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CrossingKey {
    pub a: usize,
    pub sa: usize,
    pub b: usize,
    pub sb: usize,
}

impl CrossingKey {
    /// Orders the two segment references; the flag is true when they were
    /// swapped.
    pub fn new(e: usize, se: usize, f: usize, sf: usize) -> (CrossingKey, bool) {
        if (e, se) <= (f, sf) {
            (CrossingKey { a: e, sa: se, b: f, sb: sf }, false)
        } else {
            (CrossingKey { a: f, sa: sf, b: e, sb: se }, true)
        }
    }

    pub fn edge(&self, side: Strand) -> usize {
        match side {
            Strand::A => self.a,
            Strand::B => self.b,
        }
    }

    pub fn is_self_edge(&self) -> bool {
        self.a == self.b
    }
}

impl fmt::Display for CrossingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})x({},{})", self.a, self.sa, self.b, self.sb)
    }
}

/// A general-position failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    CoincidentVertices { a: usize, b: usize },
    ZeroLengthSegment { edge: usize, seg: usize },
    VertexOnEdge { vertex: usize, edge: usize, seg: usize },
    /// The segments meet at a point other than a shared polyline node.
    Incidence { edge: usize, seg: usize, other: usize, other_seg: usize },
    Overlap { edge: usize, seg: usize, other: usize, other_seg: usize },
    TriplePoint { x: String, y: String, crossings: Vec<CrossingKey> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CoincidentVertices { a, b } => write!(f, "vertices {a} and {b} coincide"),
            Violation::ZeroLengthSegment { edge, seg } => write!(f, "edge {edge} segment {seg} has zero length"),
            Violation::VertexOnEdge { vertex, edge, seg } => write!(f, "vertex {vertex} lies on edge {edge} segment {seg}"),
            Violation::Incidence { edge, seg, other, other_seg } => {
                write!(f, "edge {edge} segment {seg} touches edge {other} segment {other_seg}")
            }
            Violation::Overlap { edge, seg, other, other_seg } => {
                write!(f, "edge {edge} segment {seg} overlaps edge {other} segment {other_seg}")
            }
            Violation::TriplePoint { x, y, crossings } => {
                write!(f, "{} crossings share the point ({x}, {y})", crossings.len())
            }
        }
    }
}

/// Geometry only: a graph with vertex positions and edge waypoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    graph: Graph,
    positions: Vec<Point>,
    waypoints: Vec<Vec<Point>>,
}

impl Drawing {
    pub fn new(graph: Graph, positions: Vec<Point>, waypoints: Vec<Vec<Point>>) -> Result<Self> {
        if positions.len() != graph.vertex_count() {
            return Err(Error::Format(format!(
                "{} positions for {} vertices",
                positions.len(),
                graph.vertex_count()
            )));
        }
        if waypoints.len() != graph.edge_count() {
            return Err(Error::Format(format!("{} waypoint lists for {} edges", waypoints.len(), graph.edge_count())));
        }
        Ok(Drawing { graph, positions, waypoints })
    }

    /// Every edge drawn as a straight segment.
    pub fn straight(graph: Graph, positions: Vec<Point>) -> Result<Self> {
        let m = graph.edge_count();
        Self::new(graph, positions, vec![Vec::new(); m])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn waypoints(&self, edge: usize) -> &[Point] {
        &self.waypoints[edge]
    }

    pub fn segment_count(&self, edge: usize) -> usize {
        self.waypoints[edge].len() + 1
    }

    /// Full polyline of an edge from `u` to `v`.
    pub fn polyline(&self, edge: usize) -> Vec<Point> {
        let (u, v) = self.graph.edge(edge);
        let mut pts = Vec::with_capacity(self.waypoints[edge].len() + 2);
        pts.push(self.positions[u].clone());
        pts.extend(self.waypoints[edge].iter().cloned());
        pts.push(self.positions[v].clone());
        pts
    }

    pub fn with_position(&self, v: usize, p: Point) -> Result<Drawing> {
        if v >= self.positions.len() {
            return Err(Error::InvalidArgument(format!("no vertex {v}")));
        }
        let mut d = self.clone();
        d.positions[v] = p;
        Ok(d)
    }

    pub fn with_waypoints(&self, edge: usize, wps: Vec<Point>) -> Result<Drawing> {
        if edge >= self.waypoints.len() {
            return Err(Error::InvalidArgument(format!("no edge {edge}")));
        }
        let mut d = self.clone();
        d.waypoints[edge] = wps;
        Ok(d)
    }

    /// Axis-aligned bounds of all vertices and waypoints, as f64.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.positions.iter().chain(self.waypoints.iter().flatten()) {
            let (x, y) = p.to_f64();
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        (lo, hi)
    }

    /// Move every vertex and waypoint by a random rational offset of at most
    /// `relative` times the bounding-box size per axis.
    pub fn perturbed(&self, seed: u64, relative: f64) -> Drawing {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ((x0, y0), (x1, y1)) = self.bounding_box();
        let size = (x1 - x0).max(y1 - y0).max(1.0);
        // offsets are integer multiples of size * relative / 1e6
        let unit = BigRational::from_float(size * relative / 1e6).unwrap_or_else(BigRational::zero);
        let mut jitter = |p: &Point| -> Point {
            let dx: i64 = rng.gen_range(-1_000_000..=1_000_000);
            let dy: i64 = rng.gen_range(-1_000_000..=1_000_000);
            Point::new(&p.x + &unit * BigInt::from(dx), &p.y + &unit * BigInt::from(dy))
        };
        let positions = self.positions.iter().map(&mut jitter).collect();
        let waypoints = self.waypoints.iter().map(|w| w.iter().map(&mut jitter).collect()).collect();
        Drawing { graph: self.graph.clone(), positions, waypoints }
    }
}

/// Result of [`validate_general_position`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Advisory near-degeneracies measured in floating point.
    pub warnings: Vec<String>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact general-position check; `tolerance` (relative to the bounding box)
/// only controls advisory warnings.
pub fn validate_general_position(d: &Drawing, tolerance: f64) -> Validation {
    let analysis = analyze(d);
    Validation { violations: analysis.violations, warnings: near_degeneracies(d, tolerance) }
}

#[derive(Clone, Debug)]
struct Seg {
    edge: usize,
    idx: usize,
    n0: usize,
    n1: usize,
}

#[derive(Clone, Debug)]
struct RawCrossing {
    key: CrossingKey,
    point: Point,
    t_a: BigRational,
    t_b: BigRational,
    /// Sign of cross(dir_a, dir_b).
    turn: i8,
    dir_a: Point,
    dir_b: Point,
}

struct Analysis {
    crossings: Vec<RawCrossing>,
    violations: Vec<Violation>,
}

enum PairEvent {
    Cross(usize, usize, BigRational, BigRational, i8),
    Touch(usize, usize),
    Overlap(usize, usize),
}

fn bbox_apart<T: LatticeInt>(a0: &LPoint<T>, a1: &LPoint<T>, b0: &LPoint<T>, b1: &LPoint<T>) -> bool {
    let (ax0, ax1) = if a0.0 <= a1.0 { (&a0.0, &a1.0) } else { (&a1.0, &a0.0) };
    let (bx0, bx1) = if b0.0 <= b1.0 { (&b0.0, &b1.0) } else { (&b1.0, &b0.0) };
    if ax1 < bx0 || bx1 < ax0 {
        return true;
    }
    let (ay0, ay1) = if a0.1 <= a1.1 { (&a0.1, &a1.1) } else { (&a1.1, &a0.1) };
    let (by0, by1) = if b0.1 <= b1.1 { (&b0.1, &b1.1) } else { (&b1.1, &b0.1) };
    ay1 < by0 || by1 < ay0
}

/// Pairwise segment tests on the lattice. Segments sharing a polyline node
/// may only meet there.
fn lattice_pass<T: LatticeInt>(
    pts: &[LPoint<T>],
    segs: &[Seg],
    live: &[bool],
    vertex_count: usize,
) -> (Vec<PairEvent>, Vec<(usize, usize)>) {
    let mut events = Vec::new();
    for i in 0..segs.len() {
        if !live[i] {
            continue;
        }
        let (p0, p1) = (&pts[segs[i].n0], &pts[segs[i].n1]);
        for j in i + 1..segs.len() {
            if !live[j] {
                continue;
            }
            let (q0, q1) = (&pts[segs[j].n0], &pts[segs[j].n1]);
            if bbox_apart(p0, p1, q0, q1) {
                continue;
            }
            let shared = segs[i].n0 == segs[j].n0 || segs[i].n0 == segs[j].n1 || segs[i].n1 == segs[j].n0 || segs[i].n1 == segs[j].n1;
            match classify(p0, p1, q0, q1) {
                SegmentHit::Disjoint => {}
                SegmentHit::Overlap => events.push(PairEvent::Overlap(i, j)),
                SegmentHit::Touch if shared => {}
                SegmentHit::Touch => events.push(PairEvent::Touch(i, j)),
                SegmentHit::Cross { t, s } => events.push(PairEvent::Cross(i, j, t, s, turn(p0, p1, q0, q1))),
            }
        }
    }
    let mut on_edge = Vec::new();
    for v in 0..vertex_count {
        for (k, s) in segs.iter().enumerate() {
            if live[k] && s.n0 != v && s.n1 != v && on_segment(&pts[v], &pts[s.n0], &pts[s.n1]) {
                on_edge.push((v, k));
            }
        }
    }
    (events, on_edge)
}

fn analyze(d: &Drawing) -> Analysis {
    let g = &d.graph;
    let n = g.vertex_count();
    // node ids: vertices first, then waypoints edge by edge
    let mut points: Vec<Point> = d.positions.clone();
    let mut segs = Vec::new();
    for e in 0..g.edge_count() {
        let (u, v) = g.edge(e);
        let mut nodes = vec![u];
        for w in &d.waypoints[e] {
            nodes.push(points.len());
            points.push(w.clone());
        }
        nodes.push(v);
        for (idx, pair) in nodes.windows(2).enumerate() {
            segs.push(Seg { edge: e, idx, n0: pair[0], n1: pair[1] });
        }
    }
    let mut violations = Vec::new();

    let mut seen: HashMap<&Point, usize> = HashMap::new();
    for (v, p) in d.positions.iter().enumerate() {
        if let Some(&u) = seen.get(p) {
            violations.push(Violation::CoincidentVertices { a: u, b: v });
        } else {
            seen.insert(p, v);
        }
    }
    let live: Vec<bool> = segs.iter().map(|s| points[s.n0] != points[s.n1]).collect();
    for (s, &ok) in segs.iter().zip(&live) {
        if !ok {
            violations.push(Violation::ZeroLengthSegment { edge: s.edge, seg: s.idx });
        }
    }

    let (lattice, _) = Lattice::new(&points);
    let (events, on_edge) = match &lattice {
        Lattice::Small(p) => lattice_pass(p, &segs, &live, n),
        Lattice::Big(p) => lattice_pass(p, &segs, &live, n),
    };
    for (v, k) in on_edge {
        violations.push(Violation::VertexOnEdge { vertex: v, edge: segs[k].edge, seg: segs[k].idx });
    }

    let mut crossings = Vec::new();
    for ev in events {
        match ev {
            PairEvent::Touch(i, j) => violations.push(Violation::Incidence {
                edge: segs[i].edge,
                seg: segs[i].idx,
                other: segs[j].edge,
                other_seg: segs[j].idx,
            }),
            PairEvent::Overlap(i, j) => violations.push(Violation::Overlap {
                edge: segs[i].edge,
                seg: segs[i].idx,
                other: segs[j].edge,
                other_seg: segs[j].idx,
            }),
            PairEvent::Cross(i, j, t, s, tr) => {
                let (si, sj) = (&segs[i], &segs[j]);
                let (key, swapped) = CrossingKey::new(si.edge, si.idx, sj.edge, sj.idx);
                let (p0, p1) = (&points[si.n0], &points[si.n1]);
                let (q0, q1) = (&points[sj.n0], &points[sj.n1]);
                let point = p0.lerp(p1, &t);
                let di = Point::new(&p1.x - &p0.x, &p1.y - &p0.y);
                let dj = Point::new(&q1.x - &q0.x, &q1.y - &q0.y);
                let rc = if swapped {
                    RawCrossing { key, point, t_a: s, t_b: t, turn: -tr, dir_a: dj, dir_b: di }
                } else {
                    RawCrossing { key, point, t_a: t, t_b: s, turn: tr, dir_a: di, dir_b: dj }
                };
                crossings.push(rc);
            }
        }
    }
    crossings.sort_by_key(|c| c.key);

    let mut at_point: BTreeMap<&Point, Vec<CrossingKey>> = BTreeMap::new();
    for c in &crossings {
        at_point.entry(&c.point).or_default().push(c.key);
    }
    for (p, keys) in at_point {
        if keys.len() > 1 {
            violations.push(Violation::TriplePoint {
                x: crate::geometry::format_coord(&p.x),
                y: crate::geometry::format_coord(&p.y),
                crossings: keys,
            });
        }
    }
    Analysis { crossings, violations }
}

fn near_degeneracies(d: &Drawing, tolerance: f64) -> Vec<String> {
    let ((x0, y0), (x1, y1)) = d.bounding_box();
    let diag = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt().max(f64::MIN_POSITIVE);
    let eps = tolerance * diag;
    let mut out = Vec::new();
    let polys: Vec<Vec<(f64, f64)>> = (0..d.graph.edge_count()).map(|e| d.polyline(e).iter().map(Point::to_f64).collect()).collect();
    for (v, p) in d.positions.iter().enumerate() {
        let p = p.to_f64();
        for (e, poly) in polys.iter().enumerate() {
            let (a, b) = d.graph.edge(e);
            if a == v || b == v {
                continue;
            }
            for (k, w) in poly.windows(2).enumerate() {
                let dist = point_segment_distance(p, w[0], w[1]);
                if dist > 0.0 && dist < eps {
                    out.push(format!("vertex {v} is within {dist:.3e} of edge {e} segment {k}"));
                }
            }
        }
    }
    out
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// A transverse double point of the diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub key: CrossingKey,
    pub point: Point,
    pub over: Strand,
    /// Sign with respect to the declared edge orientations.
    pub sign: i8,
    /// Position along segment `sa` of edge `a`, in (0, 1).
    pub t_a: BigRational,
    pub t_b: BigRational,
    turn: i8,
}

impl Crossing {
    pub fn over_edge(&self) -> usize {
        self.key.edge(self.over)
    }

    pub fn under_edge(&self) -> usize {
        self.key.edge(self.over.other())
    }

    fn sign_for(turn: i8, over: Strand) -> i8 {
        // cross(under, over) > 0 means +1; turn is sign of cross(dir_a, dir_b)
        match over {
            Strand::A => -turn,
            Strand::B => turn,
        }
    }
}

/// One crossing as seen from an edge: where it sits and which strand the
/// edge plays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub seg: usize,
    pub t: BigRational,
    pub crossing: usize,
    pub side: Strand,
}

/// A validated drawing with a complete set of over/under rules.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    drawing: Drawing,
    over: BTreeMap<CrossingKey, Strand>,
    meta: Map<String, Value>,
    crossings: Vec<Crossing>,
    incidences: Vec<Vec<Incidence>>,
}

impl Diagram {
    /// Validate and attach rules. Crossings without a rule get the lower
    /// keyed strand over; rules naming no crossing are dropped. Both cases
    /// produce warnings.
    pub fn new(drawing: Drawing, rules: BTreeMap<CrossingKey, Strand>, meta: Map<String, Value>) -> Result<(Diagram, Vec<String>)> {
        let analysis = analyze(&drawing);
        if !analysis.violations.is_empty() {
            return Err(Error::Degenerate(analysis.violations));
        }
        let mut warnings = Vec::new();
        let mut defaulted = Vec::new();
        let known: std::collections::BTreeSet<CrossingKey> = analysis.crossings.iter().map(|c| c.key).collect();
        for k in rules.keys() {
            if !known.contains(k) {
                warnings.push(format!("over rule for {k} matches no crossing and was dropped"));
            }
        }
        let d = Self::assemble(drawing, analysis, meta, |c| match rules.get(&c.key) {
            Some(&s) => s,
            None => {
                defaulted.push(c.key);
                Strand::A
            }
        });
        for k in defaulted {
            warnings.push(format!("crossing {k} has no over rule; edge {} placed over", k.a));
        }
        Ok((d, warnings))
    }

    /// A diagram whose every crossing takes the default rule, silently.
    pub fn with_default_rules(drawing: Drawing) -> Result<Diagram> {
        let analysis = analyze(&drawing);
        if !analysis.violations.is_empty() {
            return Err(Error::Degenerate(analysis.violations));
        }
        Ok(Self::assemble(drawing, analysis, Map::new(), |_| Strand::A))
    }

    /// Validate and choose every over strand with `choose`, called in key order.
    pub fn with_rules_from(drawing: Drawing, mut choose: impl FnMut(&CrossingKey) -> Strand) -> Result<Diagram> {
        let analysis = analyze(&drawing);
        if !analysis.violations.is_empty() {
            return Err(Error::Degenerate(analysis.violations));
        }
        Ok(Self::assemble(drawing, analysis, Map::new(), |c| choose(&c.key)))
    }

    fn assemble(drawing: Drawing, analysis: Analysis, meta: Map<String, Value>, mut choose: impl FnMut(&RawCrossing) -> Strand) -> Diagram {
        let mut over = BTreeMap::new();
        let mut crossings = Vec::with_capacity(analysis.crossings.len());
        for rc in analysis.crossings {
            let s = choose(&rc);
            over.insert(rc.key, s);
            crossings.push(Crossing {
                key: rc.key,
                point: rc.point,
                over: s,
                sign: Crossing::sign_for(rc.turn, s),
                t_a: rc.t_a,
                t_b: rc.t_b,
                turn: rc.turn,
            });
        }
        let incidences = build_incidences(&drawing, &crossings);
        Diagram { drawing, over, meta, crossings, incidences }
    }

    pub fn drawing(&self) -> &Drawing {
        &self.drawing
    }

    pub fn graph(&self) -> &Graph {
        &self.drawing.graph
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_index(&self, key: &CrossingKey) -> Option<usize> {
        self.crossings.binary_search_by(|c| c.key.cmp(key)).ok()
    }

    pub fn crossing(&self, key: &CrossingKey) -> Option<&Crossing> {
        self.crossing_index(key).map(|i| &self.crossings[i])
    }

    pub fn over_rules(&self) -> &BTreeMap<CrossingKey, Strand> {
        &self.over
    }

    /// Crossings along `edge`, ordered from `u` to `v`.
    pub fn incidences(&self, edge: usize) -> &[Incidence] {
        &self.incidences[edge]
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Diagram {
        self.meta.insert(key.to_string(), value);
        self
    }

    /// Swap over and under at one crossing.
    pub fn flip_crossing(&self, key: &CrossingKey) -> Result<Diagram> {
        let i = self.crossing_index(key).ok_or(Error::UnknownCrossing(*key))?;
        let mut d = self.clone();
        let c = &mut d.crossings[i];
        c.over = c.over.other();
        c.sign = Crossing::sign_for(c.turn, c.over);
        d.over.insert(*key, c.over);
        Ok(d)
    }

    /// Move a vertex. Rules carry over by key; new crossings get the default.
    pub fn move_vertex(&self, v: usize, p: Point) -> Result<(Diagram, Vec<String>)> {
        let drawing = self.drawing.with_position(v, p)?;
        Diagram::new(drawing, self.over.clone(), self.meta.clone())
    }

    /// Replace the drawing, carrying rules over by crossing point and strand
    /// identity (edge plus direction), which survives changes in segment
    /// numbering. Crossings with no counterpart use `fallback`.
    pub fn redraw(&self, drawing: Drawing, mut fallback: impl FnMut(&CrossingKey) -> Strand) -> Result<Diagram> {
        if drawing.graph != self.drawing.graph {
            return Err(Error::InvalidArgument("redraw must keep the graph".into()));
        }
        let analysis = analyze(&drawing);
        if !analysis.violations.is_empty() {
            return Err(Error::Degenerate(analysis.violations));
        }
        let old = analyze(&self.drawing);
        let mut by_point: HashMap<&Point, Vec<&RawCrossing>> = HashMap::new();
        for c in &old.crossings {
            by_point.entry(&c.point).or_default().push(c);
        }
        let meta = self.meta.clone();
        Ok(Self::assemble(drawing, analysis, meta, |rc| {
            let matched = by_point.get(&rc.point).and_then(|cands| {
                cands.iter().find_map(|oc| {
                    let same_edges = (oc.key.a, oc.key.b) == (rc.key.a, rc.key.b) || (oc.key.a, oc.key.b) == (rc.key.b, rc.key.a);
                    if !same_edges {
                        return None;
                    }
                    let old_over = self.over[&oc.key];
                    let (over_edge, over_dir) = match old_over {
                        Strand::A => (oc.key.a, &oc.dir_a),
                        Strand::B => (oc.key.b, &oc.dir_b),
                    };
                    if rc.key.a == over_edge && same_direction(&rc.dir_a, over_dir) {
                        Some(Strand::A)
                    } else if rc.key.b == over_edge && same_direction(&rc.dir_b, over_dir) {
                        Some(Strand::B)
                    } else {
                        None
                    }
                })
            });
            matched.unwrap_or_else(|| fallback(&rc.key))
        }))
    }

    /// Insert a collinear waypoint strictly inside a segment.
    pub fn subdivide(&self, edge: usize, seg: usize, point: Point) -> Result<Diagram> {
        let poly = self.polyline_checked(edge, seg)?;
        let (a, b) = (&poly[seg], &poly[seg + 1]);
        let (lat, _) = Lattice::new(&[a.clone(), b.clone(), point.clone()]);
        let inside = match &lat {
            Lattice::Small(p) => on_segment(&p[2], &p[0], &p[1]),
            Lattice::Big(p) => on_segment(&p[2], &p[0], &p[1]),
        };
        if !inside || &point == a || &point == b {
            return Err(Error::InvalidArgument(format!("{point} is not inside edge {edge} segment {seg}")));
        }
        let mut wps = self.drawing.waypoints[edge].clone();
        wps.insert(seg, point);
        let drawing = self.drawing.with_waypoints(edge, wps)?;
        self.redraw(drawing, |_| Strand::A)
    }

    /// Add a small curl with one self-crossing to a segment (a Reidemeister I
    /// move). The curl sits in the widest gap between existing crossings on
    /// the segment and is shrunk until it avoids all other strands.
    pub fn insert_kink(&self, edge: usize, seg: usize, over: Strand) -> Result<Diagram> {
        let poly = self.polyline_checked(edge, seg)?;
        let (a, b) = (&poly[seg], &poly[seg + 1]);
        let dx = &b.x - &a.x;
        let dy = &b.y - &a.y;
        let mut stops: Vec<BigRational> = vec![BigRational::zero(), BigRational::from_integer(1.into())];
        stops.extend(self.incidences(edge).iter().filter(|i| i.seg == seg).map(|i| i.t.clone()));
        stops.sort();
        let (lo, hi) = stops
            .windows(2)
            .max_by(|x, y| (&x[1] - &x[0]).cmp(&(&y[1] - &y[0])))
            .map(|w| (w[0].clone(), w[1].clone()))
            .ok_or_else(|| Error::Internal("empty segment".into()))?;
        let center = (&lo + &hi) / BigRational::from_integer(2.into());
        let mut h = (&hi - &lo) / BigRational::from_integer(2.into());
        // curl in a frame along (dx, dy) and across (-dy, dx), in units of h / 10
        let curl = [(1, 0), (1, 2), (-1, 2), (-1, -1)];
        let local = |s: (i64, i64), h: &BigRational| -> Point {
            let along = &center + BigRational::new(s.0.into(), 10.into()) * h;
            let across = BigRational::new(s.1.into(), 10.into()) * h;
            Point::new(&a.x + &along * &dx - &across * &dy, &a.y + &along * &dy + &across * &dx)
        };
        // the new self-crossing is between segments `seg` and `seg + 3`
        let kink = CrossingKey { a: edge, sa: seg, b: edge, sb: seg + 3 };
        let mut last_err = None;
        for _ in 0..40 {
            let mut wps = self.drawing.waypoints[edge].clone();
            for (k, &s) in curl.iter().enumerate() {
                wps.insert(seg + k, local(s, &h));
            }
            let drawing = self.drawing.with_waypoints(edge, wps)?;
            match self.redraw(drawing, |k| if *k == kink { over } else { Strand::A }) {
                Ok(d) if d.crossings.len() == self.crossings.len() + 1 && d.crossing(&kink).is_some() => return Ok(d),
                Ok(_) => last_err = Some(Error::Internal("kink collided with another strand".into())),
                Err(e) => last_err = Some(e),
            }
            h /= BigRational::from_integer(2.into());
        }
        Err(last_err.unwrap_or_else(|| Error::Internal("kink insertion failed".into())))
    }

    fn polyline_checked(&self, edge: usize, seg: usize) -> Result<Vec<Point>> {
        if edge >= self.graph().edge_count() || seg >= self.drawing.segment_count(edge) {
            return Err(Error::InvalidArgument(format!("no segment {seg} on edge {edge}")));
        }
        Ok(self.drawing.polyline(edge))
    }

    /// Sub-diagram on the given vertices (in that order), keeping every edge
    /// between them with its drawing and over rules.
    pub fn restrict(&self, vertices: &[usize]) -> Result<Diagram> {
        let (graph, origin) = self.graph().induced(vertices)?;
        let positions = vertices.iter().map(|&v| self.drawing.positions[v].clone()).collect();
        let waypoints = origin.iter().map(|&e| self.drawing.waypoints[e].clone()).collect();
        let drawing = Drawing::new(graph, positions, waypoints)?;
        let mut rules = BTreeMap::new();
        let mut new_id = HashMap::new();
        for (i, &e) in origin.iter().enumerate() {
            new_id.insert(e, i);
        }
        for (k, &s) in &self.over {
            if let (Some(&a), Some(&b)) = (new_id.get(&k.a), new_id.get(&k.b)) {
                let (key, swapped) = CrossingKey::new(a, k.sa, b, k.sb);
                rules.insert(key, if swapped { s.other() } else { s });
            }
        }
        let (d, _) = Diagram::new(drawing, rules, self.meta.clone())?;
        Ok(d)
    }

    pub fn to_file(&self) -> DiagramFile {
        let g = self.graph();
        DiagramFile {
            parts: g.parts().map(|p| p.to_vec()),
            positions: self.drawing.positions.iter().map(|p| [Coord(p.x.clone()), Coord(p.y.clone())]).collect(),
            edges: (0..g.edge_count())
                .map(|e| {
                    let (u, v) = g.edge(e);
                    EdgeRecord {
                        u,
                        v,
                        waypoints: self.drawing.waypoints[e].iter().map(|p| [Coord(p.x.clone()), Coord(p.y.clone())]).collect(),
                    }
                })
                .collect(),
            over_rules: self.over.iter().map(|(k, &s)| OverRule { a: k.a, sa: k.sa, b: k.b, sb: k.sb, over: s }).collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_file(file: DiagramFile) -> Result<(Diagram, Vec<String>)> {
        let n = file.positions.len();
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e.u, e.v)).collect();
        let mut graph = Graph::new(n, edges)?;
        if let Some(parts) = file.parts {
            graph = graph.with_parts(parts)?;
        }
        let positions = file.positions.into_iter().map(|[x, y]| Point::new(x.0, y.0)).collect();
        let waypoints = file
            .edges
            .into_iter()
            .map(|e| e.waypoints.into_iter().map(|[x, y]| Point::new(x.0, y.0)).collect())
            .collect();
        let drawing = Drawing::new(graph, positions, waypoints)?;
        let mut rules = BTreeMap::new();
        for r in file.over_rules {
            let (key, swapped) = CrossingKey::new(r.a, r.sa, r.b, r.sb);
            let s = if swapped { r.over.other() } else { r.over };
            if rules.insert(key, s).is_some() {
                return Err(Error::Format(format!("duplicate over rule for {key}")));
            }
        }
        Diagram::new(drawing, rules, file.meta)
    }

    /// Canonical pretty JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("diagram serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<(Diagram, Vec<String>)> {
        let file: DiagramFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Diagram::from_file(file)
    }
}

fn same_direction(u: &Point, v: &Point) -> bool {
    let cross = &u.x * &v.y - &u.y * &v.x;
    let dot = &u.x * &v.x + &u.y * &v.y;
    cross.is_zero() && dot.is_positive()
}

fn build_incidences(d: &Drawing, crossings: &[Crossing]) -> Vec<Vec<Incidence>> {
    let mut inc: Vec<Vec<Incidence>> = vec![Vec::new(); d.graph.edge_count()];
    for (i, c) in crossings.iter().enumerate() {
        inc[c.key.a].push(Incidence { seg: c.key.sa, t: c.t_a.clone(), crossing: i, side: Strand::A });
        inc[c.key.b].push(Incidence { seg: c.key.sb, t: c.t_b.clone(), crossing: i, side: Strand::B });
    }
    for list in &mut inc {
        list.sort_by(|x, y| (x.seg, &x.t).cmp(&(y.seg, &y.t)));
    }
    inc
}

/// JSON diagram file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub parts: Option<Vec<usize>>,
    pub positions: Vec<[Coord; 2]>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub over_rules: Vec<OverRule>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    #[serde(default)]
    pub waypoints: Vec<[Coord; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverRule {
    pub a: usize,
    pub sa: usize,
    pub b: usize,
    pub sb: usize,
    pub over: Strand,
}

/// One crossing met while walking a closed loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrandEvent {
    pub crossing: usize,
    pub key: CrossingKey,
    pub edge: usize,
    pub partner_edge: usize,
    /// Whether the walking strand is the over strand here.
    pub over: bool,
    /// Crossing sign for the walk's orientation; the partner strand is
    /// oriented along the walk when it belongs to the loop, otherwise along
    /// its declared direction.
    pub sign: i8,
    /// Index of the loop step (edge) the event lies on.
    pub step: usize,
    /// Both strands belong to the loop.
    pub self_crossing: bool,
}

/// A closed loop through the diagram with its crossing events in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopStrand {
    pub vertices: Vec<usize>,
    /// Edge id and direction (+1 along the declared orientation) per step.
    pub steps: Vec<(usize, i64)>,
    pub events: Vec<StrandEvent>,
}

/// Walk the closed loop `vertices[0] -> vertices[1] -> ... -> vertices[0]`.
pub fn loop_strand(d: &Diagram, vertices: &[usize]) -> Result<LoopStrand> {
    let g = d.graph();
    if vertices.len() < 3 {
        return Err(Error::InvalidArgument(format!("loop {vertices:?} is too short")));
    }
    let mut seen = vec![false; g.vertex_count()];
    for &v in vertices {
        if v >= g.vertex_count() || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidArgument(format!("loop {vertices:?} is not simple")));
        }
    }
    let k = vertices.len();
    let mut steps = Vec::with_capacity(k);
    let mut dir_of = HashMap::new();
    for i in 0..k {
        let (u, v) = (vertices[i], vertices[(i + 1) % k]);
        let (e, dir) = g.oriented_edge(u, v).ok_or_else(|| Error::InvalidArgument(format!("{u}-{v} is not an edge")))?;
        steps.push((e, dir));
        dir_of.insert(e, dir);
    }
    let mut events = Vec::new();
    for (step, &(e, dir)) in steps.iter().enumerate() {
        let list = d.incidences(e);
        let ordered: Box<dyn Iterator<Item = &Incidence>> = if dir > 0 { Box::new(list.iter()) } else { Box::new(list.iter().rev()) };
        for inc in ordered {
            let c = &d.crossings[inc.crossing];
            let partner = c.key.edge(inc.side.other());
            let partner_dir = dir_of.get(&partner).copied();
            let sign = c.sign as i64 * dir * partner_dir.unwrap_or(1);
            events.push(StrandEvent {
                crossing: inc.crossing,
                key: c.key,
                edge: e,
                partner_edge: partner,
                over: c.over == inc.side,
                sign: sign as i8,
                step,
                self_crossing: partner_dir.is_some(),
            });
        }
    }
    Ok(LoopStrand { vertices: vertices.to_vec(), steps, events })
}

/// Traversal direction of a canonical cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reverse,
}

/// Walk a cycle in its canonical vertex order or reversed.
pub fn cycle_strand(d: &Diagram, c: &Cycle, orientation: Orientation) -> Result<LoopStrand> {
    let mut vs = c.vertices().to_vec();
    if orientation == Orientation::Reverse {
        vs.reverse();
    }
    loop_strand(d, &vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PartiteGraph;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    /// Two disjoint straight edges forming an X.
    fn x_drawing() -> Drawing {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        Drawing::straight(g, vec![pt(0, 0), pt(4, 4), pt(0, 4), pt(4, 0)]).unwrap()
    }

    #[test]
    fn single_x_crossing() {
        let d = Diagram::with_default_rules(x_drawing()).unwrap();
        assert_eq!(d.crossings().len(), 1);
        let c = &d.crossings()[0];
        assert_eq!(c.key, CrossingKey { a: 0, sa: 0, b: 1, sb: 0 });
        assert_eq!(c.point, pt(2, 2));
        // edge 0 runs (1,1), edge 1 runs (1,-1); edge 0 over: cross(under, over) = cross((1,-1),(1,1)) = 2
        assert_eq!(c.over, Strand::A);
        assert_eq!(c.sign, 1);
        let f = d.flip_crossing(&c.key).unwrap();
        assert_eq!(f.crossings()[0].sign, -1);
        assert_eq!(f.flip_crossing(&c.key).unwrap(), d);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let d = Diagram::with_default_rules(x_drawing()).unwrap();
        let bad = CrossingKey { a: 0, sa: 1, b: 1, sb: 0 };
        assert!(matches!(d.flip_crossing(&bad), Err(Error::UnknownCrossing(_))));
    }

    #[test]
    fn triple_point_detected() {
        let g = Graph::new(6, vec![(0, 1), (2, 3), (4, 5)]).unwrap();
        let d = Drawing::straight(g, vec![pt(0, 0), pt(4, 4), pt(0, 4), pt(4, 0), pt(2, 0), pt(2, 4)]).unwrap();
        let v = validate_general_position(&d, 1e-9);
        assert!(v.violations.iter().any(|x| matches!(x, Violation::TriplePoint { crossings, .. } if crossings.len() == 3)));
        assert!(matches!(Diagram::with_default_rules(d), Err(Error::Degenerate(_))));
    }

    #[test]
    fn endpoint_on_edge_detected() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = Drawing::straight(g, vec![pt(0, 0), pt(4, 0), pt(2, 0), pt(2, 3)]).unwrap();
        let v = validate_general_position(&d, 1e-9);
        assert!(v.violations.contains(&Violation::VertexOnEdge { vertex: 2, edge: 0, seg: 0 }));
        // a waypoint touching another edge
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = Drawing::new(g, vec![pt(0, 0), pt(4, 0), pt(1, 3), pt(3, 3)], vec![vec![], vec![pt(2, 0)]]).unwrap();
        let v = validate_general_position(&d, 1e-9);
        assert!(v.violations.iter().any(|x| matches!(x, Violation::Incidence { .. })));
    }

    #[test]
    fn integer_drawing_ok() {
        let v = validate_general_position(&x_drawing(), 1e-9);
        assert!(v.is_ok());
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn overlap_and_zero_length() {
        let g = Graph::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let d = Drawing::straight(g, vec![pt(0, 0), pt(2, 0), pt(4, 0)]).unwrap();
        let v = validate_general_position(&d, 1e-9);
        assert!(v.violations.iter().any(|x| matches!(x, Violation::Overlap { .. })));
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let d = Drawing::new(g, vec![pt(0, 0), pt(2, 0)], vec![vec![pt(1, 1), pt(1, 1)]]).unwrap();
        let v = validate_general_position(&d, 1e-9);
        assert!(v.violations.contains(&Violation::ZeroLengthSegment { edge: 0, seg: 1 }));
        // folding back along itself
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let d = Drawing::new(g, vec![pt(0, 0), pt(2, 0)], vec![vec![pt(3, 0)]]).unwrap();
        assert!(!validate_general_position(&d, 1e-9).is_ok());
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let d = Drawing::new(g, vec![pt(0, 0), pt(2, 2)], vec![vec![]]).unwrap();
        let g2 = Graph::new(2, vec![(0, 1)]).unwrap();
        let dup = Drawing::straight(g2, vec![pt(1, 1), pt(1, 1)]).unwrap();
        assert!(validate_general_position(&d, 1e-9).is_ok());
        assert!(validate_general_position(&dup, 1e-9).violations.contains(&Violation::CoincidentVertices { a: 0, b: 1 }));
    }

    #[test]
    fn near_miss_warns() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        let d = Drawing::new(g, vec![pt(0, 0), pt(1000, 0), Point::parse("500", "0.0000001").unwrap()], vec![vec![]]).unwrap();
        let v = validate_general_position(&d, 1e-6);
        assert!(v.is_ok());
        assert_eq!(v.warnings.len(), 1);
    }

    /// Hopf clasp: two quadrilaterals whose edges cross twice.
    fn clasp() -> Diagram {
        let g = Graph::new(8, vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)]).unwrap();
        let pos = vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4), pt(2, 2), pt(6, 2), pt(6, 6), pt(2, 6)];
        let d = Drawing::straight(g, pos).unwrap();
        // alternate: square 0 over at its edge 1-2, under at 2-3
        Diagram::with_rules_from(d, |k| if k.a == 1 { Strand::A } else { Strand::B }).unwrap()
    }

    #[test]
    fn clasp_has_two_equal_signs() {
        let d = clasp();
        assert_eq!(d.crossings().len(), 2);
        let s: Vec<i64> = d.crossings().iter().map(|c| c.sign as i64).collect();
        // same sign with respect to loop orientations
        let a = loop_strand(&d, &[0, 1, 2, 3]).unwrap();
        let signs: Vec<i8> = a.events.iter().map(|e| e.sign).collect();
        assert_eq!(signs.len(), 2);
        assert_eq!(signs[0], signs[1], "{s:?}");
        assert!(a.events.iter().all(|e| !e.self_crossing));
    }

    #[test]
    fn reversal_reverses_and_negates_external_events() {
        let d = clasp();
        let c = Cycle::from_traversal(&[0, 1, 2, 3]).unwrap();
        let f = cycle_strand(&d, &c, Orientation::Forward).unwrap();
        let r = cycle_strand(&d, &c, Orientation::Reverse).unwrap();
        let fw: Vec<(usize, i8)> = f.events.iter().map(|e| (e.crossing, e.sign)).collect();
        let mut rv: Vec<(usize, i8)> = r.events.iter().map(|e| (e.crossing, -e.sign)).collect();
        rv.reverse();
        assert_eq!(fw, rv);
    }

    #[test]
    fn file_roundtrip_is_exact() {
        let d = clasp().with_meta("note", Value::String("clasp".into()));
        let text = d.to_json();
        let (back, warnings) = Diagram::from_json(&text).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, d);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn missing_and_stale_rules_warn() {
        let file = r#"{"parts": null, "positions": [[0,0],["4","4"],[0,4],[4,0]],
            "edges": [{"u":0,"v":1},{"u":2,"v":3}],
            "over_rules": [{"a":0,"sa":3,"b":1,"sb":0,"over":"b"}]}"#;
        let (d, warnings) = Diagram::from_json(file).unwrap();
        assert_eq!(warnings.len(), 2);
        assert_eq!(d.crossings()[0].over, Strand::A);
        assert_eq!(d.over_rules().len(), 1);
    }

    #[test]
    fn reversed_rule_key_is_normalized() {
        let file = r#"{"parts": null, "positions": [[0,0],[4,4],[0,4],[4,0]],
            "edges": [{"u":0,"v":1},{"u":2,"v":3}],
            "over_rules": [{"a":1,"sa":0,"b":0,"sb":0,"over":"a"}]}"#;
        let (d, warnings) = Diagram::from_json(file).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(d.crossings()[0].over, Strand::B);
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(matches!(Diagram::from_json("{"), Err(Error::Format(_))));
        let dup = r#"{"parts": null, "positions": [[0,0],[4,4],[0,4],[4,0]],
            "edges": [{"u":0,"v":1},{"u":2,"v":3}],
            "over_rules": [{"a":0,"sa":0,"b":1,"sb":0,"over":"a"},{"a":0,"sa":0,"b":1,"sb":0,"over":"b"}]}"#;
        assert!(matches!(Diagram::from_json(dup), Err(Error::Format(_))));
        let wrong_parts = r#"{"parts": [2,2], "positions": [[0,0],[4,4],[0,4],[4,0]],
            "edges": [{"u":0,"v":1},{"u":2,"v":3}]}"#;
        assert!(matches!(Diagram::from_json(wrong_parts), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn parts_are_checked_and_kept() {
        let g = PartiteGraph::new(&[2, 1]).unwrap().into_graph();
        let d = Drawing::straight(g, vec![pt(0, 0), pt(4, 0), pt(2, 3)]).unwrap();
        let d = Diagram::with_default_rules(d).unwrap();
        let file = d.to_file();
        assert_eq!(file.parts, Some(vec![2, 1]));
        assert_eq!(Diagram::from_file(file).unwrap().0, d);
    }

    #[test]
    fn subdivision_keeps_crossings() {
        let d = clasp();
        let before: Vec<(Point, i8)> = d.crossings().iter().map(|c| (c.point.clone(), c.sign)).collect();
        // edge 1 runs (4,0) -> (4,4); split it at (4,1)
        let s = d.subdivide(1, 0, pt(4, 1)).unwrap();
        let mut after: Vec<(Point, i8)> = s.crossings().iter().map(|c| (c.point.clone(), c.sign)).collect();
        after.sort();
        let mut before_sorted = before.clone();
        before_sorted.sort();
        assert_eq!(after, before_sorted);
        assert_ne!(s.crossings()[0].key, d.crossings()[0].key);
        assert!(d.subdivide(1, 0, pt(5, 1)).is_err());
        assert!(d.subdivide(1, 0, pt(4, 4)).is_err());
    }

    #[test]
    fn kink_adds_one_self_crossing_event_pair() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = Drawing::straight(g, vec![pt(0, 0), pt(10, 0), pt(5, 8)]).unwrap();
        let d = Diagram::with_default_rules(d).unwrap();
        assert!(loop_strand(&d, &[0, 1, 2]).unwrap().events.is_empty());
        let k = d.insert_kink(0, 0, Strand::B).unwrap();
        assert_eq!(k.crossings().len(), 1);
        let s = loop_strand(&k, &[0, 1, 2]).unwrap();
        assert_eq!(s.events.len(), 2);
        assert_eq!(s.events[0].crossing, s.events[1].crossing);
        assert!(s.events.iter().all(|e| e.self_crossing));
        assert_ne!(s.events[0].over, s.events[1].over);
    }

    #[test]
    fn restrict_remaps_rules() {
        let d = clasp();
        let flipped = d.flip_crossing(&d.crossings()[1].key).unwrap();
        let r = flipped.restrict(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert_eq!(r.crossings().len(), 2);
        let sq = flipped.restrict(&[0, 1, 2, 3]).unwrap();
        assert!(sq.crossings().is_empty());
        assert_eq!(sq.graph().edge_count(), 4);
    }

    #[test]
    fn move_vertex_keeps_rules_by_key() {
        let d = clasp();
        let f = d.flip_crossing(&d.crossings()[0].key).unwrap();
        let (m, _) = f.move_vertex(0, pt(-1, -1)).unwrap();
        assert_eq!(m.crossings()[0].over, f.crossings()[0].over);
        assert!(matches!(f.move_vertex(0, pt(2, 2)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn perturbation_is_small_and_deterministic() {
        let d = x_drawing();
        let p = d.perturbed(7, 1e-6);
        assert_eq!(p, d.perturbed(7, 1e-6));
        for (a, b) in d.positions().iter().zip(p.positions()) {
            let (ax, ay) = a.to_f64();
            let (bx, by) = b.to_f64();
            assert!((ax - bx).abs() <= 4e-6 + 1e-12 && (ay - by).abs() <= 4e-6 + 1e-12);
        }
    }

    #[test]
    fn big_coordinates_use_exact_fallback() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let big = |x: &str, y: &str| Point::parse(x, y).unwrap();
        let d = Drawing::straight(
            g,
            vec![big("0", "0"), big("4e40", "4e40"), big("0", "4e40"), big("4e40", "0")],
        )
        .unwrap();
        let d = Diagram::with_default_rules(d).unwrap();
        assert_eq!(d.crossings().len(), 1);
        assert_eq!(d.crossings()[0].point, big("2e40", "2e40"));
    }
}
