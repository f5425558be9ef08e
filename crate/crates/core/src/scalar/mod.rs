//! Exact scalars: rationals, polynomials in q and cyclotomic values.

mod cyc;
mod poly;

pub(crate) use cyc::prime_factors;
pub use cyc::{cyc_make, CycRing, CycValue, Expansion};
pub use poly::{interpolate, QPolynomial};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary precision rational, always kept in lowest terms.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int<T: Into<BigInt>>(v: T) -> Rat {
    Rat::from_integer(v.into())
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let den: BigInt = b.trim().parse().ok()?;
            if den == BigInt::from(0) {
                return None;
            }
            Some(Rat::new(a.trim().parse().ok()?, den))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}
