//! Machine-word modular arithmetic used by the lattice-sum kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic in `Z/m` for `m < 2^63`.
///
/// Moduli below `2^32` use a Barrett reduction so that the inner loops stay
/// on 64-bit multiplies; larger moduli fall back to 128-bit remainders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModRing {
    m: u64,
    barrett: u64,
}

impl ModRing {
    pub fn new(m: u64) -> Self {
        assert!((1..(1u64 << 63)).contains(&m), "modulus out of range: {m}");
        let barrett = if m < (1u64 << 32) && m > 1 {
            ((1u128 << 64) / m as u128) as u64
        } else {
            0
        };
        ModRing { m, barrett }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            let x = a * b;
            let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
            let r = x - q * self.m;
            if r >= self.m {
                r - self.m
            } else {
                r
            }
        } else if self.m == 1 {
            0
        } else {
            (a as u128 * b as u128 % self.m as u128) as u64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        mod_inverse(a % self.m, self.m)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.m as i64) as u64
    }

    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.m as i128) as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        a.mod_floor(&m).to_u64().expect("residue fits u64")
    }

    /// Residue of a rational number, `None` when the denominator is not invertible.
    pub fn from_rational(&self, r: &BigRational) -> Option<u64> {
        let num = self.from_bigint(r.numer());
        let den = self.from_bigint(r.denom());
        self.inv(den).map(|d| self.mul(num, d))
    }
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// The unique integer in `[0, h)` congruent to `a`.
#[inline]
pub fn flat(a: i64, h: u64) -> u64 {
    a.rem_euclid(h as i64) as u64
}

/// The unique integer in `(0, h]` congruent to `a`.
#[inline]
pub fn sharp(a: i64, h: u64) -> u64 {
    match flat(a, h) {
        0 => h,
        r => r,
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Multiplicative order of `a` modulo `m` (a must be a unit).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let ring = ModRing::new(m);
    let phi = euler_phi(m);
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord.is_multiple_of(p) && ring.pow(a, ord / p) == 1 % m {
            ord /= p;
        }
    }
    ord
}

/// `p`-adic valuation of a nonzero integer.
pub fn val_int(p: u64, a: &BigInt) -> i64 {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        a = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational number; `None` for zero.
pub fn val_rational(p: u64, r: &BigRational) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(val_int(p, r.numer()) - val_int(p, r.denom()))
    }
}

pub fn pow_u64(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_rational(n: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * (n - BigRational::from_integer(BigInt::from(i)))
            / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}
