use linkcensus::census::count_links;
use linkcensus::embeddings::{fan_embedding, fan_layout, weave_embedding_n1111, weave_labels};
use linkcensus::graph::{binomial, Cycle};
use linkcensus::invariants::linking_number;
use linkcensus::subgraph::count_partite_subgraphs;
use linkcensus::PartiteGraph;

fn total(d: &linkcensus::Diagram) -> u64 {
    count_links(d).unwrap().link_total().unwrap()
}

#[test]
fn fan_k44_pairs_are_odd() {
    let d = fan_embedding(&[4, 4]).unwrap();
    let mut odd = 0;
    for (x, y) in [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])] {
        for (p, q) in [([4, 5], [6, 7]), ([4, 6], [5, 7]), ([4, 7], [5, 6])].into_iter().flat_map(|(p, q)| [(p, q), (q, p)]) {
            let a = Cycle::from_traversal(&[x[0], p[0], x[1], p[1]]).unwrap();
            let b = Cycle::from_traversal(&[y[0], q[0], y[1], q[1]]).unwrap();
            odd += (linking_number(&d, &a, &b).unwrap() % 2 != 0) as u32;
        }
    }
    assert_eq!(odd, 2);
}

#[test]
fn fan_restrictions_match_small_fans() {
    // every K4,4 inside the K6,4 fan looks like the K4,4 fan
    let d = fan_embedding(&[6, 4]).unwrap();
    let pg = PartiteGraph::new(&[6, 4]).unwrap();
    let (n, hits) = count_partite_subgraphs(&pg, &[4, 4]).unwrap();
    assert_eq!(n, binomial(6, 4));
    for h in hits {
        assert_eq!(total(&d.restrict(&h.vertices()).unwrap()), 2);
    }
    let d = fan_embedding(&[5, 3, 1]).unwrap();
    let pg = PartiteGraph::new(&[5, 3, 1]).unwrap();
    let (_, hits) = count_partite_subgraphs(&pg, &[3, 3, 1]).unwrap();
    for h in hits {
        let vs = h.vertices();
        // only those with the three fan vertices from the big part
        if vs.iter().filter(|&&v| v < 5).count() == 3 {
            assert_eq!(total(&d.restrict(&vs).unwrap()), 1);
        }
    }
}

#[test]
fn weave_k21111_restrictions() {
    for n in 3..=7usize {
        let d = weave_embedding_n1111(n).unwrap();
        let abcd = weave_labels(n);
        let h = n / 2;
        let mut same_side = 0;
        for i in 0..n {
            for j in i + 1..n {
                let mut vs = vec![i, j];
                vs.extend(abcd);
                let r = count_links(&d.restrict(&vs).unwrap()).unwrap().links.unwrap();
                let two_sided = (i < h) == (j < h);
                same_side += two_sided as u64;
                if two_sided {
                    assert_eq!((r.total, r.odd, r.by_shape[0].m, r.by_shape[0].n), (1, 1, 3, 3), "n={n} {i},{j}");
                } else {
                    assert_eq!(r.total, 0, "n={n} {i},{j}");
                }
            }
        }
        assert_eq!(same_side, linkcensus::bounds::n1111_woven_33(n as u64));
    }
}

#[test]
fn fan_n211_formula() {
    for n in 3..=6usize {
        let want = binomial(n as u64, 3) + 2 * binomial(n as u64, 4);
        assert_eq!(total(&fan_embedding(&[n, 2, 1, 1]).unwrap()), want);
    }
}

#[test]
fn layout_files_roundtrip() {
    let (d, recipe) = fan_layout(&[4, 3, 1]).unwrap();
    let (back, warnings) = linkcensus::Diagram::from_json(&d.to_json()).unwrap();
    assert!(warnings.is_empty());
    assert_eq!(back.to_json(), d.to_json());
    assert_eq!(back.crossings().len(), recipe.manifest.len());
    assert_eq!(d.meta()["layout"], "fan");
}
