//! Exact arithmetic: rationals, cyclotomic values, polynomials and rational
//! functions in the Abel parameter `u`.

pub mod cyclo;
pub mod linalg;
pub mod modint;
pub mod mpoly;
pub mod qpoly;
pub mod ratfunc;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use cyclo::{CycloValue, RootSum};
pub use modint::{flat, sharp, ModRing};
pub use qpoly::QPoly;
pub use ratfunc::{abel_limit, taylor_at_one, RationalFunctionU};

/// Reduced fraction with arbitrary-precision numerator and positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Parses `a`, `-a`, or `a/b`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}
