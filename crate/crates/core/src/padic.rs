//! Capped-precision p-adic numbers for odd `p`.
//!
//! A value is `p^val · unit` with `unit` known modulo `p^rel`. A value with
//! `rel = 0` is zero to absolute precision `val`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;

use crate::arith::modint::{is_prime, mod_inverse, val_rational};
use crate::arith::{ModRing, Rational};
use crate::error::{Error, Result};

/// Library default for the working precision in digits.
pub const DEFAULT_PRECISION: u32 = 12;
/// Extra digits carried by callers that chain log/exp.
pub const GUARD_DIGITS: u32 = 4;

const MAX_MODULUS: u64 = 1 << 62;

/// `p^digits`, or `PrecisionTooLarge` when it does not fit the residue type.
pub fn pow_checked(p: u64, digits: u32) -> Result<u64> {
    match p.checked_pow(digits) {
        Some(q) if q <= MAX_MODULUS => Ok(q),
        _ => Err(Error::PrecisionTooLarge { p, digits }),
    }
}

pub fn check_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrimeUnsupported);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    val: i64,
    unit: u64,
    rel: u32,
}

impl Padic {
    /// `p^val · unit` with `unit` read modulo `p^rel` and renormalised.
    pub fn new(p: u64, val: i64, unit: u64, rel: u32) -> Result<Self> {
        let modulus = pow_checked(p, rel)?;
        Ok(Self::normalize(p, val, unit % modulus, rel))
    }

    fn normalize(p: u64, mut val: i64, mut unit: u64, mut rel: u32) -> Self {
        if rel == 0 {
            return Padic { p, val, unit: 0, rel: 0 };
        }
        while rel > 0 && unit.is_multiple_of(p) {
            if unit == 0 {
                // zero to absolute precision val + rel
                return Padic { p, val: val + rel as i64, unit: 0, rel: 0 };
            }
            unit /= p;
            val += 1;
            rel -= 1;
        }
        Padic { p, val, unit, rel }
    }

    pub fn zero(p: u64, abs_precision: i64) -> Self {
        Padic { p, val: abs_precision, unit: 0, rel: 0 }
    }

    pub fn one(p: u64, rel: u32) -> Result<Self> {
        Self::new(p, 0, 1, rel)
    }

    pub fn from_int(p: u64, n: i64, rel: u32) -> Result<Self> {
        Self::from_bigint(p, &BigInt::from(n), rel)
    }

    pub fn from_bigint(p: u64, n: &BigInt, rel: u32) -> Result<Self> {
        Self::from_rational(p, &Rational::from_integer(n.clone()), rel)
    }

    /// Rational number to relative precision `rel`; exact zero becomes zero
    /// to absolute precision `rel`.
    pub fn from_rational(p: u64, r: &Rational, rel: u32) -> Result<Self> {
        let modulus = pow_checked(p, rel)?;
        let Some(v) = val_rational(p, r) else {
            return Ok(Self::zero(p, rel as i64));
        };
        let pb = BigInt::from(p);
        let mut num = r.numer().clone();
        let mut den = r.denom().clone();
        if v > 0 {
            num /= pb.pow(v as u32);
        } else if v < 0 {
            den /= pb.pow((-v) as u32);
        }
        let ring = ModRing::new(modulus);
        let unit = ring
            .from_rational(&Rational::new(num, den))
            .expect("denominator is a p-adic unit");
        Ok(Padic { p, val: v, unit, rel })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    /// Valuation, `None` for a value that is zero at its precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn rel_precision(&self) -> u32 {
        self.rel
    }

    /// Digits known: the value is determined modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.rel as i64
    }

    /// Drops precision so that the value is known modulo `p^abs` at most.
    pub fn truncate(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return *self;
        }
        if abs <= self.val {
            return Self::zero(self.p, abs);
        }
        let rel = (abs - self.val) as u32;
        let m = self.p.pow(rel);
        Self::normalize(self.p, self.val, self.unit % m, rel)
    }

    fn same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing p-adic numbers for different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_prime(other);
        let abs = self.abs_precision().min(other.abs_precision());
        let vmin = self.val.min(other.val);
        if abs <= vmin {
            return Self::zero(self.p, abs);
        }
        let digits = (abs - vmin) as u32;
        let m = self.p.pow(digits);
        let ring = ModRing::new(m);
        let lift = |x: &Padic| -> u64 {
            if x.is_zero() {
                return 0;
            }
            let shift = (x.val - vmin) as u32;
            if shift >= digits {
                0
            } else {
                ring.mul(x.unit % m, self.p.pow(shift))
            }
        };
        let s = ring.add(lift(self), lift(other));
        Self::normalize(self.p, vmin, s, digits)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = self.p.pow(self.rel);
        Padic { unit: m - self.unit, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_prime(other);
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Self::zero(self.p, self.val + other.val),
            (true, false) => Self::zero(self.p, self.val + other.val),
            (false, true) => Self::zero(self.p, self.val + other.val),
            (false, false) => {
                let rel = self.rel.min(other.rel);
                let ring = ModRing::new(self.p.pow(rel));
                let u = ring.mul(self.unit % ring.modulus(), other.unit % ring.modulus());
                Padic { p: self.p, val: self.val + other.val, unit: u, rel }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("p-adic inverse"));
        }
        let m = self.p.pow(self.rel);
        let u = mod_inverse(self.unit, m).expect("unit is invertible");
        Ok(Padic { p: self.p, val: -self.val, unit: u, rel: self.rel })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Padic::one(self.p, self.rel.max(1)).expect("precision already validated");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let c = Padic::from_int(self.p, n, self.rel.max(1)).expect("precision already validated");
        self.mul(&c)
    }

    /// `v_p(self - other)`, capped by the joint precision.
    pub fn distance(&self, other: &Self) -> i64 {
        let d = self.sub(other);
        d.valuation().unwrap_or(d.abs_precision())
    }

    /// True when the two values agree modulo `p^digits` and both are known that far.
    pub fn agrees_mod(&self, other: &Self, digits: i64) -> bool {
        self.abs_precision() >= digits
            && other.abs_precision() >= digits
            && self.distance(other) >= digits
    }

    /// Value modulo `p^digits` as an integer in `[0, p^digits)`; requires a
    /// p-integral value known to at least `digits` digits.
    pub fn residue(&self, digits: u32) -> Result<u64> {
        if self.abs_precision() < digits as i64 {
            return Err(Error::PrecisionExhausted);
        }
        if self.is_zero() || self.val >= digits as i64 {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(Error::DomainViolation("value is not p-integral".into()));
        }
        let m = pow_checked(self.p, digits)?;
        let ring = ModRing::new(m);
        Ok(ring.mul(self.unit % m, self.p.pow(self.val as u32)))
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut u = self.unit;
        (0..self.rel)
            .map(|_| {
                let d = u % self.p;
                u /= self.p;
                d
            })
            .collect()
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(
            f,
            "{}^{} * {} + O({}^{})",
            self.p,
            self.val,
            self.unit,
            self.p,
            self.abs_precision()
        )
    }
}

/// An element of `Z_p` used as the L-function variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicExponent(Padic);

impl PadicExponent {
    pub fn new(s: Padic) -> Result<Self> {
        match s.valuation() {
            Some(v) if v < 0 => Err(Error::DomainViolation(format!(
                "exponent has valuation {v} < 0"
            ))),
            _ => Ok(PadicExponent(s)),
        }
    }

    pub fn from_int(p: u64, s: i64, precision: u32) -> Result<Self> {
        Self::new(Padic::from_int(p, s, precision)?)
    }

    pub fn value(&self) -> &Padic {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

type TeichTable = Arc<Vec<u64>>;

fn teich_cache() -> &'static RwLock<HashMap<(u64, u32), TeichTable>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u32), TeichTable>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const TEICH_TABLE_LIMIT: u64 = 1 << 16;

fn teich_iterate(ring: &ModRing, p: u64, y: u64, digits: u32) -> u64 {
    let mut x = y % ring.modulus();
    for _ in 0..digits {
        x = ring.pow(x, p);
    }
    x
}

/// Table of `ω(r) mod p^digits` for `0 ≤ r < p` (entry 0 unused).
pub fn teichmuller_table(p: u64, digits: u32) -> Result<TeichTable> {
    check_prime(p)?;
    if let Some(t) = teich_cache().read().unwrap().get(&(p, digits)) {
        return Ok(t.clone());
    }
    let ring = ModRing::new(pow_checked(p, digits)?);
    let table: Vec<u64> = (0..p)
        .map(|r| if r == 0 { 0 } else { teich_iterate(&ring, p, r, digits) })
        .collect();
    let table = Arc::new(table);
    teich_cache()
        .write()
        .unwrap()
        .entry((p, digits))
        .or_insert_with(|| table.clone());
    Ok(table)
}

/// `ω(y) mod p^digits` for an integer residue `y`.
pub fn teichmuller_residue(p: u64, y: u64, digits: u32) -> Result<u64> {
    check_prime(p)?;
    if y.is_multiple_of(p) {
        return Err(Error::NotAUnit(format!("{y}")));
    }
    if p < TEICH_TABLE_LIMIT {
        Ok(teichmuller_table(p, digits)?[(y % p) as usize])
    } else {
        let ring = ModRing::new(pow_checked(p, digits)?);
        Ok(teich_iterate(&ring, p, y, digits))
    }
}

/// The Teichmüller lift of a p-adic unit, at the unit's relative precision.
pub fn teichmuller(y: &Padic) -> Result<Padic> {
    check_prime(y.p)?;
    if y.valuation() != Some(0) {
        return Err(Error::NotAUnit(y.to_string()));
    }
    let w = teichmuller_residue(y.p, y.unit, y.rel)?;
    Padic::new(y.p, 0, w, y.rel)
}

/// `⟨y⟩ = y / ω(y) ∈ 1 + pZ_p`.
pub fn angle(y: &Padic) -> Result<Padic> {
    let w = teichmuller(y)?;
    y.div(&w)
}

fn require_nonexhausted(x: &Padic) -> Result<()> {
    if x.abs_precision() <= 0 {
        Err(Error::PrecisionExhausted)
    } else {
        Ok(())
    }
}

/// Iwasawa logarithm on `1 + pZ_p`.
pub fn padic_log(u: &Padic) -> Result<Padic> {
    require_nonexhausted(u)?;
    let p = u.p;
    if u.valuation() != Some(0) || u.unit % p != 1 {
        return Err(Error::DomainViolation(format!("log of {u}: argument is not 1 mod p")));
    }
    let a = u.abs_precision();
    let one = Padic::one(p, u.rel)?;
    let w = u.sub(&one);
    let Some(vw) = w.valuation() else {
        return Ok(Padic::zero(p, a));
    };
    let mut acc = Padic::zero(p, a);
    let mut wn = w;
    let mut n: u64 = 1;
    loop {
        // lower bound n·v(w) - log_p(n) for the valuation of w^n / n
        let log_bound = (n as f64).ln() / (p as f64).ln();
        if (n as i64) * vw - log_bound.floor() as i64 >= a {
            break;
        }
        let term = wn.div(&Padic::from_int(p, n as i64, u.rel)?)?;
        acc = if n % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        wn = wn.mul(&w);
        n += 1;
    }
    Ok(acc.truncate(a))
}

/// p-adic exponential on `pZ_p`.
pub fn padic_exp(z: &Padic) -> Result<Padic> {
    require_nonexhausted(z)?;
    let p = z.p;
    let a = z.abs_precision();
    let rel_out = u32::try_from(a).map_err(|_| Error::PrecisionExhausted)?;
    let one = Padic::one(p, rel_out)?;
    let Some(vz) = z.valuation() else {
        return Ok(one);
    };
    if vz < 1 {
        return Err(Error::DomainViolation(format!("exp of {z}: argument is not 0 mod p")));
    }
    let mut acc = one;
    let mut term = one;
    let mut n: u64 = 1;
    loop {
        // v(z^n / n!) >= n·v(z) - (n-1)/(p-1)
        let bound = n as f64 * vz as f64 - (n - 1) as f64 / (p - 1) as f64;
        if bound >= a as f64 {
            break;
        }
        term = term.mul(z).div(&Padic::from_int(p, n as i64, rel_out)?)?;
        acc = acc.add(&term);
        n += 1;
    }
    Ok(acc.truncate(a))
}

/// `⟨y⟩^{-s}`, computed as an integer power of `⟨y⟩`.
///
/// `⟨y⟩^{p^j}` is 1 modulo `p^{j+1}`, so knowing `s` modulo `p^j` determines
/// the power to `j + 1` digits.
pub fn power(y: &Padic, s: &PadicExponent) -> Result<Padic> {
    let a = angle(y)?;
    let sv = s.value();
    let digits = (a.rel as i64).min(sv.abs_precision() + 1);
    if digits <= 0 {
        return Err(Error::PrecisionExhausted);
    }
    let digits = digits as u32;
    let exp_mod = pow_checked(y.p, digits - 1)?;
    let e = if exp_mod == 1 {
        0
    } else {
        let r = sv.residue(digits - 1)?;
        (exp_mod - r) % exp_mod
    };
    Ok(a.truncate(digits as i64).pow(e))
}

/// `exp(-s · log⟨y⟩)`; the series route for `⟨y⟩^{-s}`.
pub fn power_via_log(y: &Padic, s: &PadicExponent) -> Result<Padic> {
    let a = angle(y)?;
    let l = padic_log(&a)?;
    padic_exp(&l.mul(s.value()).neg())
}

/// Iwasawa logarithm of an arbitrary unit: `log⟨y⟩`.
pub fn iwasawa_log(y: &Padic) -> Result<Padic> {
    padic_log(&angle(y)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pz(p: u64, n: i64, rel: u32) -> Padic {
        Padic::from_int(p, n, rel).unwrap()
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(&pz(5, 2, 2)).unwrap(), pz(5, 7, 2));
        assert_eq!(teichmuller(&pz(3, 1, 9)).unwrap(), pz(3, 1, 9));
        assert_eq!(teichmuller(&pz(7, 6, 3)).unwrap(), pz(7, 342, 3));
        assert_eq!(teichmuller(&pz(3, 3, 4)), Err(Error::NotAUnit(pz(3, 3, 4).to_string())));
        assert_eq!(teichmuller(&pz(3, 2, 4)).unwrap(), pz(3, -1, 4));
        assert_eq!(Padic::from_int(2, 1, 3).and_then(|y| teichmuller(&y)), Err(Error::EvenPrimeUnsupported));
    }

    #[test]
    fn angle_example() {
        let a = angle(&pz(5, 2, 2)).unwrap();
        assert_eq!(a, pz(5, 11, 2));
    }

    #[test]
    fn log_exp_trivial() {
        assert!(padic_log(&pz(5, 1, 8)).unwrap().is_zero());
        assert_eq!(padic_exp(&Padic::zero(5, 8)).unwrap(), pz(5, 1, 8));
    }

    #[test]
    fn power_sign_convention() {
        let y = pz(5, 2, 10);
        let a = angle(&y).unwrap();
        let s = PadicExponent::from_int(5, -4, 10).unwrap();
        assert_eq!(power(&y, &s).unwrap(), a.pow(4));
        let minus_one = PadicExponent::from_int(5, -1, 10).unwrap();
        assert_eq!(power(&y, &minus_one).unwrap(), a);
        let zero = PadicExponent::from_int(5, 0, 10).unwrap();
        assert_eq!(power(&y, &zero).unwrap(), pz(5, 1, 10));
    }

    #[test]
    fn addition_precision() {
        let a = Padic::new(3, 0, 1, 5).unwrap();
        let b = Padic::new(3, 2, 1, 2).unwrap();
        let s = a.add(&b);
        assert_eq!(s.abs_precision(), 4);
        assert_eq!(s.residue(4).unwrap(), 10);
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(z.abs_precision(), 5);
    }

    #[test]
    fn rational_embedding() {
        let r = Rational::new(BigInt::from(9), BigInt::from(2));
        let x = Padic::from_rational(3, &r, 4).unwrap();
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.mul(&pz(3, 2, 4)), pz(3, 9, 4).mul(&pz(3, 1, 4)));
    }
}
