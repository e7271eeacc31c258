//! Exact rational scalars and their canonical text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational; every scalar in the crate is one of these.
pub type Q = BigRational;

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Canonical `p/q` text: lowest terms, positive denominator, always with a slash.
pub fn format_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Q::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Q>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| if v.denom().is_one() { acc } else { acc.lcm(v.denom()) })
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn to_primitive_integers(values: &[Q]) -> Vec<BigInt> {
    let den = common_denominator(values.iter());
    let mut out: Vec<BigInt> = values
        .iter()
        .map(|v| (v.numer() * &den) / v.denom())
        .collect();
    make_primitive(&mut out);
    out
}

/// Divides an integer vector by the gcd of its entries, in place.
pub fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        if !v.is_zero() {
            g = g.gcd(v);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        if !v.is_zero() {
            *v /= &g;
        }
    }
}

pub fn abs_cmp(a: &Q, b: &Q) -> std::cmp::Ordering {
    a.abs().cmp(&b.abs())
}
