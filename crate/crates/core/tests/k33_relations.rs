//! Signed linear relations between a loop's linking numbers with the nine
//! squares and six hexagons of K3,3.

use linkcensus::embeddings::{random_embedding, with_loop};
use linkcensus::invariants::loop_linking_number;
use linkcensus::Diagram;

// v1..v3 = 0..3, w1..w3 = 3..6, loop = 6..10
fn v(i: usize) -> usize {
    i - 1
}

fn w(j: usize) -> usize {
    j + 2
}

fn walk(spec: &str) -> Vec<usize> {
    let b = spec.as_bytes();
    b.chunks(2)
        .map(|p| {
            let k = (p[1] - b'0') as usize;
            if p[0] == b'v' {
                v(k)
            } else {
                w(k)
            }
        })
        .collect()
}

const SQUARES: [&str; 9] =
    ["v1w1v2w2", "v1w1v2w3", "v1w1v3w2", "v1w1v3w3", "v1w2v2w3", "v1w2v3w3", "v2w1v3w2", "v2w1v3w3", "v2w2v3w3"];
const HEXAGONS: [&str; 6] = ["v1w1v2w2v3w3", "v1w1v2w3v3w2", "v1w2v2w1v3w3", "v1w2v2w3v3w1", "v1w3v2w1v3w2", "v1w3v2w2v3w1"];

fn values(d: &Diagram) -> ([i64; 9], [i64; 7]) {
    let c = [6, 7, 8, 9];
    let mut s = [0; 9];
    let mut h = [0; 7];
    for (k, sq) in SQUARES.iter().enumerate() {
        s[k] = loop_linking_number(d, &c, &walk(sq)).unwrap();
    }
    for (k, hx) in HEXAGONS.iter().enumerate() {
        h[k + 1] = loop_linking_number(d, &c, &walk(hx)).unwrap();
    }
    (s, h)
}

#[test]
fn relations_hold_on_random_diagrams() {
    let g = with_loop(&[3, 3], 4).unwrap();
    let mut nonzero = 0;
    for seed in 0..400 {
        let d = random_embedding(&g, seed);
        let (s, h) = values(&d);
        nonzero += s.iter().any(|&x| x != 0) as usize;
        let rhs = [
            -2 * h[3] - 2 * h[4] - h[5] - h[6],
            -h[3] - h[4] - 2 * h[5] - 2 * h[6],
            -h[3] - h[4] + h[5] - 2 * h[6],
            h[3] - 2 * h[4] - h[5] - h[6],
            h[3] + h[4] - h[5] - h[6],
            2 * h[3] - h[4] - 2 * h[5] + h[6],
            h[3] + h[4] + 2 * h[5] - h[6],
            2 * h[3] - h[4] + h[5] + h[6],
            h[3] - 2 * h[4] - h[5] + 2 * h[6],
        ];
        for k in 0..9 {
            assert_eq!(3 * s[k], rhs[k], "square {} seed {seed}", k + 1);
        }
        assert_eq!(h[1], -h[4] - h[5], "h1 seed {seed}");
        assert_eq!(h[2], -h[3] - h[6], "h2 seed {seed}");
    }
    assert!(nonzero > 0);
}
