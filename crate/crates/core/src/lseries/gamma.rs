//! The multiple p-adic Gamma function `Γ_{F,p,V}` and the classical Morita Γ_p.

use num_traits::Zero;

use super::kernel::box_norm_product;
use crate::arith::{ModRing, Rational};
use crate::cones::ConeContext;
use crate::error::{Error, Result};
use crate::padic::{self, pow_checked, Padic, GUARD_DIGITS};
use crate::par::Exec;

/// How many extra approximation exponents are tried before giving up.
const MAX_EXTRA: u32 = 4;
/// Largest box (number of lattice points) a single approximant may visit.
const MAX_BOX: u128 = 1 << 36;

/// `Γ_{F,p,V}(Σ y_i v_i)` to `precision` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaQuery {
    /// Coordinates in V; must be p-integral.
    pub y: Vec<Rational>,
    pub precision: u32,
    /// First approximation exponent; defaults to `precision`.
    pub m_prime: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaValue {
    /// `Γ`, a principal unit.
    pub value: Padic,
    /// `log_p Γ`.
    pub log: Padic,
    /// The approximation exponent at which two successive approximants agreed.
    pub m_prime: u32,
}

/// `y mod p^m` as an integer in `[1, p^m]`.
fn positive_residue(y: &Rational, p: u64, m: u32) -> Result<u64> {
    let pm = pow_checked(p, m)?;
    let ring = ModRing::new(pm);
    let r = ring
        .from_rational(y)
        .ok_or_else(|| Error::DomainViolation(format!("{y} is not p-integral")))?;
    Ok(if r == 0 { pm } else { r })
}

/// Product `Π_{1≤l<n, gcd(p, l·v)=1} Nm(l·v)` at the approximant `n ≡ y mod p^{M'}`.
fn approximant(cone: &ConeContext, y: &[Rational], p: u64, m_prime: u32, digits: u32, exec: Exec) -> Result<Padic> {
    let n: Vec<u64> = y.iter().map(|c| positive_residue(c, p, m_prime)).collect::<Result<_>>()?;
    let size: u128 = n.iter().map(|&x| x as u128).product();
    if size > MAX_BOX {
        return Err(Error::InstanceTooLarge(format!("Gamma box of {size} points")));
    }
    let modulus = pow_checked(p, digits)?;
    let prod = box_norm_product(cone, &n, p, modulus, exec)?;
    Padic::new(p, 0, prod, digits)
}

/// `Γ_{F,p,V}(y)`: approximants at `M'` and `M' + 1` must agree modulo `p^M`.
///
/// Γ is the angle of the norm product and `log Γ` its Iwasawa logarithm;
/// the logarithm kills the roots of unity that separate the two.
pub fn gamma_multiple(cone: &ConeContext, p: u64, query: &GammaQuery, exec: Exec) -> Result<GammaValue> {
    padic::check_prime(p)?;
    if query.y.len() != cone.degree() {
        return Err(Error::InvalidQuery("Gamma argument has the wrong dimension".into()));
    }
    let m = query.precision;
    let digits = m + GUARD_DIGITS;
    let start = query.m_prime.unwrap_or(m).max(1);
    let mut prev = approximant(cone, &query.y, p, start, digits, exec)?;
    let mut prev_log = padic::iwasawa_log(&prev)?;
    for mp in start + 1..=start + MAX_EXTRA {
        let cur = approximant(cone, &query.y, p, mp, digits, exec)?;
        let cur_log = padic::iwasawa_log(&cur)?;
        if cur_log.agrees_mod(&prev_log, m as i64) {
            return Ok(GammaValue {
                value: padic::angle(&cur)?.truncate(m as i64),
                log: cur_log.truncate(m as i64),
                m_prime: mp - 1,
            });
        }
        prev = cur;
        prev_log = cur_log;
    }
    let _ = prev;
    Err(Error::NotConverged(start + MAX_EXTRA))
}

/// Morita's `Γ_p(n) = (−1)^n Π_{0<j<n, p∤j} j` for a positive integer `n`.
pub fn morita_gamma_int(p: u64, n: u64, digits: u32) -> Result<Padic> {
    padic::check_prime(p)?;
    let ring = ModRing::new(pow_checked(p, digits)?);
    let mut acc = 1 % ring.modulus();
    for j in 1..n {
        if j % p != 0 {
            acc = ring.mul(acc, j % ring.modulus());
        }
    }
    if n % 2 == 1 {
        acc = ring.neg(acc);
    }
    Padic::new(p, 0, acc, digits)
}

/// Morita's `Γ_p(y)` for p-integral rational `y`, through the representative
/// of `y` modulo `p^digits` in `[1, p^digits]`.
pub fn morita_gamma(p: u64, y: &Rational, digits: u32) -> Result<Padic> {
    let n = positive_residue(y, p, digits)?;
    morita_gamma_int(p, n, digits)
}

/// The empty product for `y = (1, …, 1)`.
pub fn is_trivial_argument(y: &[Rational]) -> bool {
    y.iter().all(|c| (c - Rational::from_integer(1.into())).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::cones::Decomposition;
    use crate::instances::q_sqrt5_decomposition;

    #[test]
    fn trivial_argument() {
        let dec = q_sqrt5_decomposition();
        let q = GammaQuery { y: vec![int(1), int(1)], precision: 3, m_prime: None };
        // n = (1, 1) only at M' where 1 is its own representative
        let g = approximant(&dec.cones()[0], &q.y, 3, 2, 6, Exec::Sequential).unwrap();
        assert_eq!(g, Padic::one(3, 6).unwrap());
        assert!(is_trivial_argument(&q.y));
    }

    #[test]
    fn rational_gamma_matches_morita() {
        let dec = Decomposition::rational().unwrap();
        let cone = &dec.cones()[0];
        for (p, y) in [(3u64, rat(1, 5)), (5, rat(2, 3)), (7, int(10))] {
            let q = GammaQuery { y: vec![y.clone()], precision: 4, m_prime: None };
            let g = gamma_multiple(cone, p, &q, Exec::Sequential).unwrap();
            let m = padic::angle(&morita_gamma(p, &y, 6).unwrap()).unwrap();
            assert!(g.value.agrees_mod(&m, 4), "p={p} y={y}: {} vs {}", g.value, m);
        }
    }

    #[test]
    fn morita_small_values() {
        // Γ_p(1) = -1, Γ_p(2) = 1, Γ_5(3) = -2
        assert_eq!(morita_gamma_int(5, 1, 3).unwrap(), Padic::from_int(5, -1, 3).unwrap());
        assert_eq!(morita_gamma_int(5, 2, 3).unwrap(), Padic::from_int(5, 1, 3).unwrap());
        assert_eq!(morita_gamma_int(5, 3, 3).unwrap(), Padic::from_int(5, -2, 3).unwrap());
    }

    #[test]
    fn flagship_gamma_stabilises() {
        let dec = q_sqrt5_decomposition();
        let q = GammaQuery { y: vec![rat(2, 5), rat(3, 5)], precision: 3, m_prime: None };
        let a = gamma_multiple(&dec.cones()[0], 3, &q, Exec::Parallel).unwrap();
        let b = gamma_multiple(&dec.cones()[0], 3, &GammaQuery { m_prime: Some(a.m_prime + 1), ..q }, Exec::Sequential).unwrap();
        assert!(a.log.agrees_mod(&b.log, 3));
        let e = padic::padic_exp(&a.log).unwrap();
        assert!(e.agrees_mod(&a.value, 3));
    }
}
