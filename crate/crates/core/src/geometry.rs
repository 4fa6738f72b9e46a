//! Exact planar geometry on rational coordinates.
//!
//! Coordinates are scaled onto a common integer lattice before any predicate
//! runs, so orientation tests are plain integer determinants. Small lattices
//! use `i128`; anything larger falls back to `BigInt`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Ok(Point { x: parse_coord(x)?, y: parse_coord(y)? })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: &BigRational) -> Point {
        Point {
            x: &self.x + t * (&other.x - &self.x),
            y: &self.y + t * (&other.y - &self.y),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_coord(&self.x), format_coord(&self.y))
    }
}

/// Parse a coordinate: a decimal (`-12.5`, `3e-4`) or a fraction (`1/3`).
pub fn parse_coord(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("bad coordinate {s:?}"));
    if s.contains('/') {
        let q = BigRational::from_str(s).map_err(|_| bad())?;
        return Ok(q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    if shift.unsigned_abs() > 4000 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let q = if shift >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(q)
}

/// Format a coordinate exactly: a terminating decimal when possible,
/// otherwise `p/q`.
pub fn format_coord(q: &BigRational) -> String {
    let den = q.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let mut rest = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let places = twos.max(fives);
    let scaled = q.numer() * num_traits::pow(BigInt::from(10), places) / &den;
    if places == 0 {
        return scaled.to_string();
    }
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (a, b) = padded.split_at(padded.len() - places);
    format!("{}{a}.{b}", if neg { "-" } else { "" })
}

/// A coordinate on the wire: accepts JSON strings or numbers, writes strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coord(pub BigRational);

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_coord(&self.0))
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("coordinate must be a string or number, got {other}"))),
        };
        parse_coord(&text).map(Coord).map_err(serde::de::Error::custom)
    }
}

/// Integer types usable for lattice predicates.
pub(crate) trait LatticeInt: Clone + Ord + Signed + Into<BigInt> {}
impl LatticeInt for i128 {}
impl LatticeInt for BigInt {}

pub(crate) type LPoint<T> = (T, T);

fn diff<T: LatticeInt>(a: &LPoint<T>, b: &LPoint<T>) -> LPoint<T> {
    (a.0.clone() - b.0.clone(), a.1.clone() - b.1.clone())
}

fn det<T: LatticeInt>(a: &LPoint<T>, b: &LPoint<T>) -> T {
    a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone()
}

pub(crate) fn cross<T: LatticeInt>(o: &LPoint<T>, a: &LPoint<T>, b: &LPoint<T>) -> T {
    det(&diff(a, o), &diff(b, o))
}

fn sgn<T: LatticeInt>(v: &T) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of the turn `o -> a -> b`.
pub(crate) fn orient<T: LatticeInt>(o: &LPoint<T>, a: &LPoint<T>, b: &LPoint<T>) -> i8 {
    sgn(&cross(o, a, b))
}

/// Sign of the cross product of the directions `p0->p1` and `q0->q1`.
pub(crate) fn turn<T: LatticeInt>(p0: &LPoint<T>, p1: &LPoint<T>, q0: &LPoint<T>, q1: &LPoint<T>) -> i8 {
    sgn(&det(&diff(p1, p0), &diff(q1, q0)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum SegmentHit {
    Disjoint,
    /// Interiors cross transversally at parameters `t` (first) and `s` (second).
    Cross { t: BigRational, s: BigRational },
    /// Meet in exactly one point that is an endpoint of at least one segment.
    Touch,
    /// Collinear with an overlap of positive length.
    Overlap,
}

fn on_box<T: LatticeInt>(p: &LPoint<T>, a: &LPoint<T>, b: &LPoint<T>) -> bool {
    p.0 >= a.0.clone().min(b.0.clone())
        && p.0 <= a.0.clone().max(b.0.clone())
        && p.1 >= a.1.clone().min(b.1.clone())
        && p.1 <= a.1.clone().max(b.1.clone())
}

pub(crate) fn classify<T: LatticeInt>(p0: &LPoint<T>, p1: &LPoint<T>, q0: &LPoint<T>, q1: &LPoint<T>) -> SegmentHit {
    let d1 = orient(q0, q1, p0);
    let d2 = orient(q0, q1, p1);
    let d3 = orient(p0, p1, q0);
    let d4 = orient(p0, p1, q1);
    if (d1 != 0 && d1 == d2) || (d3 != 0 && d3 == d4) {
        return SegmentHit::Disjoint;
    }
    if d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0 {
        let r = diff(p1, p0);
        let u = diff(q1, q0);
        let w = diff(q0, p0);
        let den: BigInt = det(&r, &u).into();
        let tn: BigInt = det(&w, &u).into();
        let sn: BigInt = det(&w, &r).into();
        return SegmentHit::Cross { t: BigRational::new(tn, den.clone()), s: BigRational::new(sn, den) };
    }
    if d1 == 0 && d2 == 0 {
        // collinear: compare extents along the line
        let key = |p: &LPoint<T>| -> T {
            if p0.0 != p1.0 || q0.0 != q1.0 {
                p.0.clone()
            } else {
                p.1.clone()
            }
        };
        let (a0, a1) = (key(p0).min(key(p1)), key(p0).max(key(p1)));
        let (b0, b1) = (key(q0).min(key(q1)), key(q0).max(key(q1)));
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        return match lo.cmp(&hi) {
            std::cmp::Ordering::Less => SegmentHit::Overlap,
            std::cmp::Ordering::Equal => SegmentHit::Touch,
            std::cmp::Ordering::Greater => SegmentHit::Disjoint,
        };
    }
    // one endpoint sits on the other segment's line and the lines are not parallel
    if (d1 == 0 && on_box(p0, q0, q1))
        || (d2 == 0 && on_box(p1, q0, q1))
        || (d3 == 0 && on_box(q0, p0, p1))
        || (d4 == 0 && on_box(q1, p0, p1))
    {
        SegmentHit::Touch
    } else {
        SegmentHit::Disjoint
    }
}

/// True when `p` lies on the closed segment `a b`.
pub(crate) fn on_segment<T: LatticeInt>(p: &LPoint<T>, a: &LPoint<T>, b: &LPoint<T>) -> bool {
    orient(a, b, p) == 0 && on_box(p, a, b)
}

/// Points mapped onto a common integer lattice.
#[derive(Clone, Debug)]
pub(crate) enum Lattice {
    Small(Vec<LPoint<i128>>),
    Big(Vec<LPoint<BigInt>>),
}

/// Lattice coordinates beyond this magnitude use big integers. Differences
/// then stay below 2^62 and products below 2^125, which `i128` holds.
const SMALL_LIMIT: i128 = 1 << 61;

impl Lattice {
    /// Scale all points by the lcm of their denominators. Returns the lattice
    /// and the scale.
    pub(crate) fn new(points: &[Point]) -> (Lattice, BigInt) {
        let mut scale = BigInt::one();
        for p in points {
            scale = scale.lcm(p.x.denom());
            scale = scale.lcm(p.y.denom());
        }
        let big: Vec<LPoint<BigInt>> = points
            .iter()
            .map(|p| {
                (p.x.numer() * (&scale / p.x.denom()), p.y.numer() * (&scale / p.y.denom()))
            })
            .collect();
        let small: Option<Vec<LPoint<i128>>> = big
            .iter()
            .map(|(x, y)| {
                let x = x.to_i128().filter(|v| v.abs() < SMALL_LIMIT)?;
                let y = y.to_i128().filter(|v| v.abs() < SMALL_LIMIT)?;
                Some((x, y))
            })
            .collect();
        match small {
            Some(s) => (Lattice::Small(s), scale),
            None => (Lattice::Big(big), scale),
        }
    }
}
