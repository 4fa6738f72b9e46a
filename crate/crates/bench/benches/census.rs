use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use linkcensus::census::{count_knots, count_links, Objective, Tracker};
use linkcensus::embeddings::{fan_embedding, random_embedding, trefoil_knot};
use linkcensus::graph::{enumerate_cycles, Cycle, PartiteGraph};
use linkcensus::invariants::{a2_skein, conway_a2, gauss_diagram, DEFAULT_ORACLE_CAP};
use linkcensus::Diagram;

fn complete(n: usize, seed: u64) -> Diagram {
    random_embedding(&PartiteGraph::new(&vec![1; n]).unwrap().into_graph(), seed)
}

fn crossings(c: &mut Criterion) {
    let d = fan_embedding(&[6, 3, 1]).unwrap();
    c.bench_function("redraw fan K631", |b| {
        b.iter(|| Diagram::with_default_rules(black_box(d.drawing().clone())).unwrap())
    });
}

fn links(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_links");
    g.sample_size(10);
    for n in [6, 7, 8] {
        let d = complete(n, 1);
        g.bench_with_input(BenchmarkId::new("K_n", n), &d, |b, d| b.iter(|| count_links(d).unwrap()));
    }
    let d = fan_embedding(&[5, 3, 1]).unwrap();
    g.bench_function("fan K531", |b| b.iter(|| count_links(&d).unwrap()));
    g.finish();
}

fn knots(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_knots");
    g.sample_size(10);
    let d = complete(7, 1);
    g.bench_function("K7", |b| b.iter(|| count_knots(&d).unwrap()));
    g.finish();
}

fn a2(c: &mut Criterion) {
    let d = trefoil_knot().unwrap();
    let cyc = Cycle::from_traversal(&[0, 1, 2]).unwrap();
    let gd = gauss_diagram(&d, &cyc).unwrap();
    c.bench_function("a2 chord count trefoil", |b| b.iter(|| conway_a2(black_box(&gd))));
    c.bench_function("a2 skein trefoil", |b| b.iter(|| a2_skein(black_box(&gd), DEFAULT_ORACLE_CAP).unwrap()));

    let k7 = complete(7, 3);
    let cycles = enumerate_cycles(k7.graph(), 7, 7).unwrap();
    c.bench_function("gauss + a2 over K7 Hamiltonian cycles", |b| {
        b.iter(|| cycles.iter().map(|c| conway_a2(&gauss_diagram(&k7, c).unwrap())).sum::<i64>())
    });
}

fn flips(c: &mut Criterion) {
    let d = complete(7, 2);
    let keys: Vec<_> = d.crossings().iter().map(|x| x.key).collect();
    let mut t = Tracker::new(d, Objective::Both).unwrap();
    let mut i = 0;
    c.bench_function("tracker flip K7", |b| {
        b.iter(|| {
            t.flip(&keys[i % keys.len()]).unwrap();
            i += 1;
            t.score()
        })
    });
}

criterion_group!(benches, crossings, links, knots, a2, flips);
criterion_main!(benches);
