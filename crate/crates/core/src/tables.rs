//! Published reference values for minimum link and knot counts.

use serde::Serialize;

/// A reference value: exact, or a range where one side may be open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Known {
    Exact { value: u64 },
    Range { lower: Option<u64>, upper: Option<u64> },
}

impl Known {
    pub fn exact(&self) -> Option<u64> {
        match *self {
            Known::Exact { value } => Some(value),
            Known::Range { .. } => None,
        }
    }

    pub fn upper(&self) -> Option<u64> {
        match *self {
            Known::Exact { value } => Some(value),
            Known::Range { upper, .. } => upper,
        }
    }

    pub fn lower(&self) -> Option<u64> {
        match *self {
            Known::Exact { value } => Some(value),
            Known::Range { lower, .. } => lower,
        }
    }
}

const fn exact(value: u64) -> Known {
    Known::Exact { value }
}

const fn at_most(upper: u64) -> Known {
    Known::Range { lower: None, upper: Some(upper) }
}

const fn between(lower: u64, upper: u64) -> Known {
    Known::Range { lower: Some(lower), upper: Some(upper) }
}

/// Minimum number of links for the intrinsically linked complete partite
/// graphs on nine vertices.
pub const NINE_VERTEX_LINKS: &[(&[usize], Known)] = &[
    (&[5, 4], exact(10)),
    (&[5, 3, 1], exact(20)),
    (&[5, 2, 2], exact(10)),
    (&[5, 2, 1, 1], exact(20)),
    (&[5, 1, 1, 1, 1], exact(34)),
    (&[4, 4, 1], exact(74)),
    (&[4, 3, 2], at_most(120)),
    (&[4, 3, 1, 1], at_most(164)),
    (&[4, 2, 2, 1], at_most(178)),
    (&[4, 2, 1, 1, 1], at_most(244)),
    (&[4, 1, 1, 1, 1, 1], at_most(360)),
    (&[3, 3, 3], at_most(248)),
    (&[3, 3, 2, 1], at_most(386)),
    (&[3, 3, 1, 1, 1], at_most(555)),
    (&[3, 2, 2, 2], at_most(372)),
    (&[3, 2, 2, 1, 1], at_most(610)),
    (&[3, 2, 1, 1, 1, 1], at_most(962)),
    (&[3, 1, 1, 1, 1, 1, 1], at_most(1432)),
    (&[2, 2, 2, 2, 1], at_most(1098)),
    (&[2, 2, 2, 1, 1, 1], at_most(1576)),
    (&[2, 2, 1, 1, 1, 1, 1], at_most(2139)),
    (&[2, 1, 1, 1, 1, 1, 1, 1], at_most(2918)),
    (&[1, 1, 1, 1, 1, 1, 1, 1, 1], at_most(3987)),
];

/// Minimum number of knots for the intrinsically knotted complete partite
/// graphs on eight vertices, as tabulated. The `K8` row's lower value (18)
/// disagrees with the covering argument, which only yields 15; see
/// [`crate::bounds::knot_lower_bound_detail`].
pub const EIGHT_VERTEX_KNOTS: &[(&[usize], Known)] = &[
    (&[3, 3, 1, 1], exact(1)),
    (&[3, 2, 1, 1, 1], exact(1)),
    (&[3, 1, 1, 1, 1, 1], between(3, 4)),
    (&[2, 2, 1, 1, 1, 1], exact(2)),
    (&[2, 1, 1, 1, 1, 1, 1], between(8, 9)),
    (&[1, 1, 1, 1, 1, 1, 1, 1], between(18, 29)),
];

/// Lower and upper rows for `K_{n,1,1,1,1}`, n = 3..=12.
pub const N1111_LOWER: [u64; 10] = [3, 12, 34, 75, 147, 262, 432, 675, 1009, 1452];
pub const N1111_UPPER: [u64; 10] = [3, 12, 34, 76, 149, 264, 436, 680, 1015, 1460];

fn canonical(parts: &[usize]) -> Vec<usize> {
    let mut p = parts.to_vec();
    p.sort_unstable_by(|a, b| b.cmp(a));
    p
}

pub fn nine_vertex_links(parts: &[usize]) -> Option<Known> {
    let p = canonical(parts);
    NINE_VERTEX_LINKS.iter().find(|(q, _)| *q == p.as_slice()).map(|(_, k)| *k)
}

pub fn eight_vertex_knots(parts: &[usize]) -> Option<Known> {
    let p = canonical(parts);
    EIGHT_VERTEX_KNOTS.iter().find(|(q, _)| *q == p.as_slice()).map(|(_, k)| *k)
}
