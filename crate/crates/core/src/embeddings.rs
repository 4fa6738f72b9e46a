//! Diagram constructors: fan and woven layouts, seeded random drawings and a
//! few small knot and link fixtures.
//!
//! Layouts are built as polygonal graphs in 3-space with integer
//! coordinates and projected onto the xy-plane; the larger z is over. Fans
//! are book embeddings: spine vertices on the y-axis, each fan vertex in its
//! own half-plane through the axis.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::diagram::{CrossingKey, Diagram, Drawing, Strand};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{partition_name, Graph, PartiteGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fan,
    Weave,
    Random,
    Fixture,
}

/// A crossing the constructor expects, with its over strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ManifestEntry {
    pub key: CrossingKey,
    pub over: Strand,
}

/// How a diagram was made, plus the crossings it must have.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayoutRecipe {
    pub family: Family,
    pub parts: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub manifest: Vec<ManifestEntry>,
}

/// A graph with integer points in 3-space for vertices and edge bends.
#[derive(Clone, Debug)]
pub struct SpatialGraph {
    graph: Graph,
    vertices: Vec<[i64; 3]>,
    waypoints: Vec<Vec<[i64; 3]>>,
}

impl SpatialGraph {
    pub fn new(graph: Graph, vertices: Vec<[i64; 3]>, waypoints: Vec<Vec<[i64; 3]>>) -> Result<SpatialGraph> {
        if vertices.len() != graph.vertex_count() || waypoints.len() != graph.edge_count() {
            return Err(Error::InvalidArgument("vertex or waypoint count does not match the graph".into()));
        }
        Ok(SpatialGraph { graph, vertices, waypoints })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    fn polyline(&self, e: usize) -> Vec<[i64; 3]> {
        let (u, v) = self.graph.edge(e);
        let mut p = vec![self.vertices[u]];
        p.extend(self.waypoints[e].iter().copied());
        p.push(self.vertices[v]);
        p
    }

    /// Project to a diagram. Fails on a degenerate projection or on a
    /// crossing where both strands have the same depth.
    pub fn project(&self) -> Result<(Diagram, Vec<ManifestEntry>)> {
        let pt = |q: &[i64; 3]| Point::from_ints(q[0], q[1]);
        let drawing = Drawing::new(
            self.graph.clone(),
            self.vertices.iter().map(pt).collect(),
            self.waypoints.iter().map(|w| w.iter().map(pt).collect()).collect(),
        )?;
        let flat = Diagram::with_default_rules(drawing.clone())?;
        let depth = |e: usize, s: usize, t: &BigRational| -> BigRational {
            let line = self.polyline(e);
            let z0 = BigRational::from_integer(line[s][2].into());
            let z1 = BigRational::from_integer(line[s + 1][2].into());
            &z0 + t * (z1 - &z0)
        };
        let mut rules = BTreeMap::new();
        for c in flat.crossings() {
            let za = depth(c.key.a, c.key.sa, &c.t_a);
            let zb = depth(c.key.b, c.key.sb, &c.t_b);
            if za == zb {
                return Err(Error::InvalidSpec(format!("strands at crossing {} have equal depth", c.key)));
            }
            rules.insert(c.key, if za > zb { Strand::A } else { Strand::B });
        }
        let (d, _) = Diagram::new(drawing, rules, Map::new())?;
        Ok((d, self.manifest()))
    }

    /// Crossings and over strands found with plain floating point, as an
    /// independent check on the exact computation.
    pub fn manifest(&self) -> Vec<ManifestEntry> {
        let mut segs = Vec::new();
        for e in 0..self.graph.edge_count() {
            let line = self.polyline(e);
            for s in 0..line.len() - 1 {
                let f = |q: [i64; 3]| [q[0] as f64, q[1] as f64, q[2] as f64];
                segs.push((e, s, f(line[s]), f(line[s + 1])));
            }
        }
        let mut out = Vec::new();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (e, se, p0, p1) = segs[i];
                let (f, sf, q0, q1) = segs[j];
                let r = [p1[0] - p0[0], p1[1] - p0[1]];
                let s = [q1[0] - q0[0], q1[1] - q0[1]];
                let den = r[0] * s[1] - r[1] * s[0];
                if den == 0.0 {
                    continue;
                }
                let w = [q0[0] - p0[0], q0[1] - p0[1]];
                let t = (w[0] * s[1] - w[1] * s[0]) / den;
                let u = (w[0] * r[1] - w[1] * r[0]) / den;
                let eps = 1e-12;
                if t <= eps || t >= 1.0 - eps || u <= eps || u >= 1.0 - eps {
                    continue;
                }
                let zp = p0[2] + t * (p1[2] - p0[2]);
                let zq = q0[2] + u * (q1[2] - q0[2]);
                let (key, swapped) = CrossingKey::new(e, se, f, sf);
                let first_over = zp > zq;
                let over = if first_over != swapped { Strand::A } else { Strand::B };
                out.push(ManifestEntry { key, over });
            }
        }
        out.sort();
        out
    }
}

fn check_manifest(d: &Diagram, manifest: &[ManifestEntry]) -> Result<()> {
    let mut got: Vec<ManifestEntry> = d.crossings().iter().map(|c| ManifestEntry { key: c.key, over: c.over }).collect();
    got.sort();
    if got != manifest {
        return Err(Error::Internal(format!(
            "diagram has {} crossings, manifest expects {}",
            got.len(),
            manifest.len()
        )));
    }
    Ok(())
}

/// Where each spine vertex goes and which extra edges run through pages.
struct Book {
    parts: Vec<usize>,
    /// spine vertices (graph ids) in axis order
    spine: Vec<usize>,
    /// arcs per extra page: (u, v, nesting level, bigger is outer)
    pages: Vec<Vec<(usize, usize, i64)>>,
    /// page slot for each extra page; fan pages fill the remaining slots
    slots: Vec<usize>,
}

fn book_for(parts: &[usize]) -> Result<(Book, Family)> {
    let n = parts[0];
    let unsupported = || Error::UnsupportedFamily(format!("no fan layout for {}", partition_name(parts)));
    if n < 3 || parts.len() < 2 {
        return Err(unsupported());
    }
    let (a, b, c, d) = (n, n + 1, n + 2, n + 3);
    let last = n;
    let book = match &parts[1..] {
        [4] => Book { parts: parts.to_vec(), spine: vec![a, b, c, d], pages: vec![], slots: vec![] },
        // a b c | x
        [3, 1] => Book { parts: parts.to_vec(), spine: vec![a, b, c, d], pages: vec![vec![(b, d, 1), (a, d, 2)]], slots: vec![last] },
        // a b | c d
        [2, 2] => Book { parts: parts.to_vec(), spine: vec![a, c, b, d], pages: vec![vec![(a, d, 1)]], slots: vec![last] },
        // a b | c | d
        [2, 1, 1] => Book { parts: parts.to_vec(), spine: vec![a, c, b, d], pages: vec![vec![(a, d, 2), (c, d, 1)]], slots: vec![last] },
        [1, 1, 1, 1] => {
            let h = n / 2;
            let book = Book {
                parts: parts.to_vec(),
                spine: vec![a, b, c, d],
                pages: vec![vec![(a, c, 1), (a, d, 2)], vec![(b, d, 1)]],
                slots: vec![n + 1, h],
            };
            return Ok((book, Family::Weave));
        }
        _ => return Err(unsupported()),
    };
    Ok((book, Family::Fan))
}

fn build_book(book: &Book, attempt: u64) -> Result<SpatialGraph> {
    let pg = PartiteGraph::new(&book.parts)?;
    let g = pg.graph().clone();
    let n = book.parts[0];
    let slots = n + book.pages.len();
    let mut rng = ChaCha8Rng::seed_from_u64(attempt);
    let mut jitter = |r: i64| if attempt == 0 { 0 } else { rng.gen_range(-r..=r) };
    // page k has direction (dx, 0, 2k + 1 - slots): later pages lie above
    let dx = 2 * slots as i64 + 1;
    let dz = |k: usize| 2 * k as i64 + 1 - slots as i64;
    let in_page = |k: usize, s: i64, y: i64| [s * dx, y, s * dz(k)];
    let spine_y = |i: usize| 1000 * i as i64;
    let mut vertices = vec![[0i64; 3]; g.vertex_count()];
    let mut pos_on_spine = BTreeMap::new();
    for (i, &v) in book.spine.iter().enumerate() {
        vertices[v] = [0, spine_y(i), 0];
        pos_on_spine.insert(v, i);
    }
    let fan_slots: Vec<usize> = (0..slots).filter(|k| !book.slots.contains(k)).collect();
    for (i, &k) in fan_slots.iter().enumerate() {
        let s = 600 + 170 * i as i64 + jitter(60);
        let y = 1500 + 37 * i as i64 + jitter(300);
        vertices[i] = in_page(k, s, y);
    }
    let mut waypoints = vec![Vec::new(); g.edge_count()];
    for (page, arcs) in book.pages.iter().enumerate() {
        let k = book.slots[page];
        for &(u, v, level) in arcs {
            let e = g.edge_between(u, v).ok_or_else(|| Error::Internal(format!("no edge {u}-{v}")))?;
            let (yu, yv) = (spine_y(pos_on_spine[&u]), spine_y(pos_on_spine[&v]));
            let s = if level == 1 { 300 + jitter(50) } else { 4000 + jitter(200) };
            waypoints[e] = vec![in_page(k, s, (yu + yv) / 2 + jitter(40))];
        }
    }
    SpatialGraph::new(g, vertices, waypoints)
}

fn project_with_retries(mut make: impl FnMut(u64) -> Result<SpatialGraph>) -> Result<(Diagram, Vec<ManifestEntry>)> {
    let mut last = None;
    for attempt in 0..200 {
        let sg = make(attempt)?;
        match sg.project() {
            Ok((d, m)) => match check_manifest(&d, &m) {
                Ok(()) => return Ok((d, m)),
                Err(e) => last = Some(e),
            },
            Err(e @ (Error::Degenerate(_) | Error::InvalidSpec(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Internal("no attempts".into())))
}

fn recipe_meta(d: Diagram, recipe: &LayoutRecipe) -> Diagram {
    let d = d.with_meta("family", json!(recipe.family));
    let d = match &recipe.parts {
        Some(p) => d.with_meta("parts", json!(p)),
        None => d,
    };
    match recipe.seed {
        Some(s) => d.with_meta("seed", json!(s)),
        None => d,
    }
}

/// Fan or woven layout for `[n,4]`, `[n,3,1]`, `[n,2,2]`, `[n,2,1,1]` or
/// `[n,1,1,1,1]`, n >= 3, with its crossing manifest.
pub fn fan_layout(parts: &[usize]) -> Result<(Diagram, LayoutRecipe)> {
    let (book, family) = book_for(parts)?;
    let (d, manifest) = project_with_retries(|a| build_book(&book, a))?;
    let recipe = LayoutRecipe { family, parts: Some(parts.to_vec()), seed: None, manifest };
    let d = recipe_meta(d, &recipe);
    let d = d.with_meta("layout", Value::String(match family {
        Family::Weave => "weave".into(),
        _ => "fan".into(),
    }));
    Ok((d, recipe))
}

/// The fan diagram of a partite graph with all but four vertices in the
/// first part.
pub fn fan_embedding(parts: &[usize]) -> Result<Diagram> {
    if parts.len() == 5 {
        return Err(Error::UnsupportedFamily(format!("{} uses the woven layout", partition_name(parts))));
    }
    Ok(fan_layout(parts)?.0)
}

/// Fan diagram of `K_{n,2,1,1}` plus the edge `bd` threaded through the
/// middle of the fans.
pub fn weave_embedding_n1111(n: usize) -> Result<Diagram> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("woven layout needs n >= 3, got {n}")));
    }
    Ok(fan_layout(&[n, 1, 1, 1, 1])?.0)
}

/// The four distinguished vertices `a, b, c, d` of a woven layout.
pub fn weave_labels(n: usize) -> [usize; 4] {
    [n, n + 1, n + 2, n + 3]
}

/// Straight-line drawing with uniform integer vertex positions and fair
/// over/under choices, resampled until it is in general position.
pub fn random_embedding(g: &Graph, seed: u64) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let positions: Vec<Point> = (0..g.vertex_count())
            .map(|_| Point::from_ints(rng.gen_range(0..1_000_000), rng.gen_range(0..1_000_000)))
            .collect();
        let drawing = Drawing::straight(g.clone(), positions).expect("one position per vertex");
        if let Ok(d) = Diagram::with_rules_from(drawing, |_| if rng.gen_bool(0.5) { Strand::A } else { Strand::B }) {
            let d = d.with_meta("family", json!(Family::Random)).with_meta("seed", json!(seed));
            return match g.parts() {
                Some(p) => d.with_meta("parts", json!(p)),
                None => d,
            };
        }
    }
}

/// A closed space curve sampled at `samples` points, split into a triangle
/// graph at three sample positions.
fn sampled_knot(samples: usize, curve: impl Fn(f64) -> [f64; 3], scale: f64) -> Result<Diagram> {
    let pts: Vec<[i64; 3]> = (0..samples)
        .map(|j| {
            // the phase keeps samples off the curve's symmetric double points
            let t = std::f64::consts::TAU * (j as f64 + 0.37) / samples as f64;
            let p = curve(t);
            [(p[0] * scale).round() as i64, (p[1] * scale).round() as i64, (p[2] * scale).round() as i64]
        })
        .collect();
    let third = samples / 3;
    let corners = [0, third, 2 * third];
    let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)])?;
    let waypoints = vec![
        pts[1..corners[1]].to_vec(),
        pts[corners[1] + 1..corners[2]].to_vec(),
        pts[corners[2] + 1..].iter().rev().copied().collect(),
    ];
    let sg = SpatialGraph::new(g, corners.iter().map(|&j| pts[j]).collect(), waypoints)?;
    let (d, m) = sg.project()?;
    check_manifest(&d, &m)?;
    Ok(d.with_meta("family", json!(Family::Fixture)))
}

/// Trefoil drawn on a triangle with bent edges; a2 = 1.
pub fn trefoil_knot() -> Result<Diagram> {
    let d = sampled_knot(30, |t| [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()], 1000.0)?;
    Ok(d.with_meta("fixture", json!("trefoil")))
}

/// Figure-eight knot on a triangle; a2 = -1.
pub fn figure_eight_knot() -> Result<Diagram> {
    let d = sampled_knot(
        61,
        |t| {
            let r = 2.0 + (2.0 * t).cos();
            [r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin()]
        },
        1000.0,
    )?;
    Ok(d.with_meta("fixture", json!("figure-eight")))
}

/// A triangle with a curl of each handedness on two of its edges.
pub fn kinked_unknot() -> Result<Diagram> {
    let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)])?;
    let d = Drawing::straight(g, vec![Point::from_ints(0, 0), Point::from_ints(100, 0), Point::from_ints(0, 100)])?;
    let d = Diagram::with_default_rules(d)?;
    let d = d.insert_kink(0, 0, Strand::A)?;
    let d = d.insert_kink(1, 0, Strand::B)?;
    let d = d.insert_kink(2, 0, Strand::A)?;
    Ok(d.with_meta("family", json!(Family::Fixture)).with_meta("fixture", json!("kinked-unknot")))
}

/// Two triangles forming a Hopf link; vertices 0..3 and 3..6.
pub fn hopf_triangles() -> Result<Diagram> {
    let g = Graph::new(6, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])?;
    let v = vec![[0, 0, 0], [6, 0, 0], [3, 6, 0], [3, 2, -3], [3, 3, 3], [10, 1, 1]];
    let sg = SpatialGraph::new(g, v, vec![Vec::new(); 6])?;
    let (d, m) = sg.project()?;
    check_manifest(&d, &m)?;
    Ok(d.with_meta("family", json!(Family::Fixture)).with_meta("fixture", json!("hopf")))
}

/// Disjoint union; the vertices of `h` follow those of `g`.
pub fn disjoint_union(g: &Graph, h: &Graph) -> Result<Graph> {
    let n = g.vertex_count();
    let mut edges = g.edges().to_vec();
    edges.extend(h.edges().iter().map(|&(u, v)| (u + n, v + n)));
    Graph::new(n + h.vertex_count(), edges)
}

/// A partite graph with a separate loop of `loop_len` vertices appended.
pub fn with_loop(parts: &[usize], loop_len: usize) -> Result<Graph> {
    let g = PartiteGraph::new(parts)?.into_graph();
    let c = Graph::new(loop_len, (0..loop_len).map(|i| (i, (i + 1) % loop_len)).map(|(u, v)| (u.min(v), u.max(v))).collect())?;
    disjoint_union(&g, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Cycle;
    use crate::invariants::{conway_a2, gauss_diagram, linking_number};

    fn whole(d: &Diagram) -> Cycle {
        Cycle::from_traversal(&[0, 1, 2]).unwrap_or_else(|_| panic!("{}", d.crossings().len()))
    }

    #[test]
    fn fixture_knots() {
        let t = trefoil_knot().unwrap();
        assert_eq!(conway_a2(&gauss_diagram(&t, &whole(&t)).unwrap()), 1);
        let f = figure_eight_knot().unwrap();
        assert_eq!(conway_a2(&gauss_diagram(&f, &whole(&f)).unwrap()), -1);
        let k = kinked_unknot().unwrap();
        assert_eq!(k.crossings().len(), 3);
        assert_eq!(conway_a2(&gauss_diagram(&k, &whole(&k)).unwrap()), 0);
    }

    #[test]
    fn hopf_fixture() {
        let d = hopf_triangles().unwrap();
        let a = Cycle::from_traversal(&[0, 1, 2]).unwrap();
        let b = Cycle::from_traversal(&[3, 4, 5]).unwrap();
        assert_eq!(linking_number(&d, &a, &b).unwrap().abs(), 1);
    }

    #[test]
    fn random_is_deterministic() {
        let g = PartiteGraph::new(&[1; 6]).unwrap().into_graph();
        assert_eq!(random_embedding(&g, 7).to_json(), random_embedding(&g, 7).to_json());
        assert_ne!(random_embedding(&g, 7).to_json(), random_embedding(&g, 8).to_json());
    }

    #[test]
    fn layouts_match_manifest() {
        for parts in [vec![4, 4], vec![3, 3, 1], vec![4, 2, 2], vec![5, 2, 1, 1], vec![5, 1, 1, 1, 1]] {
            let (d, r) = fan_layout(&parts).unwrap();
            assert!(!r.manifest.is_empty());
            assert_eq!(d.crossings().len(), r.manifest.len());
            assert_eq!(d.graph().parts(), Some(parts.as_slice()));
        }
    }

    #[test]
    fn unsupported_layouts() {
        assert!(matches!(fan_embedding(&[3, 3, 3]), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(fan_embedding(&[2, 4]), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(fan_embedding(&[5, 1, 1, 1, 1]), Err(Error::UnsupportedFamily(_))));
        assert!(weave_embedding_n1111(2).is_err());
    }

    #[test]
    fn loop_union() {
        let g = with_loop(&[3, 3], 4).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 13));
        assert_eq!(g.components().len(), 2);
    }
}
