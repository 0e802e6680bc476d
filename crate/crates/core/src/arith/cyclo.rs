//! Elements of `Q(ζ_m)` as residues modulo the `m`-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{Error, Result};

fn poly_cache() -> &'static RwLock<HashMap<u32, Arc<CycloData>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CycloData>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Φ_m and the reductions of `x^e` (0 ≤ e < m) modulo Φ_m.
#[derive(Debug)]
pub(crate) struct CycloData {
    /// Coefficients of Φ_m, low degree first; monic of degree φ(m).
    phi: Vec<i64>,
    /// `powers[e]` is `x^e mod Φ_m`, length φ(m).
    powers: Vec<Vec<i64>>,
}

impl CycloData {
    fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

fn int_poly_divexact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![0];
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

fn compute_phi(m: u32) -> Vec<i64> {
    // x^m - 1 divided by Φ_d for proper divisors d
    let mut poly = vec![0i64; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let phi_d = cyclo_data(d).phi.clone();
            poly = int_poly_divexact(&poly, &phi_d);
        }
    }
    poly
}

pub(crate) fn cyclo_data(m: u32) -> Arc<CycloData> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(d) = poly_cache().read().unwrap().get(&m) {
        return d.clone();
    }
    let phi = compute_phi(m);
    let deg = phi.len() - 1;
    let mut powers = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; deg];
    cur[0] = 1;
    for _ in 0..m {
        powers.push(cur.clone());
        // multiply by x and reduce
        let top = cur[deg - 1];
        let mut next = vec![0i64; deg];
        for i in (1..deg).rev() {
            next[i] = cur[i - 1];
        }
        if top != 0 {
            for i in 0..deg {
                next[i] -= top * phi[i];
            }
        }
        cur = next;
    }
    let data = Arc::new(CycloData { phi, powers });
    poly_cache().write().unwrap().insert(m, data.clone());
    data
}

/// The `m`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    cyclo_data(m).phi.clone()
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// An element of the cyclotomic field `Q(ζ_m)`.
///
/// Stored as the coefficient vector (length φ(m)) of its residue modulo Φ_m.
/// Values of different orders are compared and combined inside `Q(ζ_lcm)`.
#[derive(Clone, Debug)]
pub struct CycloValue {
    order: u32,
    coeffs: Vec<Rational>,
}

impl CycloValue {
    pub fn zero(order: u32) -> Self {
        let deg = cyclo_data(order).degree();
        CycloValue {
            order,
            coeffs: vec![Rational::zero(); deg],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(Rational::one(), order)
    }

    pub fn from_rational(r: Rational, order: u32) -> Self {
        let mut v = Self::zero(order);
        v.coeffs[0] = r;
        v
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)), 1)
    }

    /// `ζ_m^e`.
    pub fn root_of_unity(order: u32, e: i64) -> Self {
        let data = cyclo_data(order);
        let e = e.rem_euclid(order as i64) as usize;
        CycloValue {
            order,
            coeffs: data.powers[e]
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    /// Builds from an arbitrary polynomial in ζ_m (low degree first), reducing mod Φ_m.
    pub fn from_poly(order: u32, poly: &[Rational]) -> Self {
        let data = cyclo_data(order);
        let mut out = Self::zero(order);
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let red = &data.powers[e % order as usize];
            for (slot, &r) in out.coeffs.iter_mut().zip(red) {
                if r != 0 {
                    *slot += c * Rational::from_integer(BigInt::from(r));
                }
            }
        }
        out
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Image in `Q(ζ_target)`; `self.order` must divide `target`.
    pub fn embed(&self, target: u32) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "cannot embed Q(ζ_{}) into Q(ζ_{})",
            self.order,
            target
        );
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Self::from_poly(target, &poly)
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm(a.order, b.order);
        (a.embed(l), b.embed(l))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloValue {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut poly = vec![Rational::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[(m - j) % m] += c;
        }
        Self::from_poly(self.order, &poly)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("cyclotomic inverse"));
        }
        let data = cyclo_data(self.order);
        let phi: Vec<Rational> = data
            .phi
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)))
            .collect();
        // extended Euclid: s*a + t*phi = g, g constant since phi irreducible
        let a = trim(self.coeffs.clone());
        let (g, s) = ext_gcd(a, trim(phi));
        debug_assert_eq!(g.len(), 1);
        let ginv = Rational::one() / &g[0];
        let s: Vec<Rational> = s.into_iter().map(|c| c * &ginv).collect();
        Ok(Self::from_poly(self.order, &s))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Smallest order `d | m` whose field already contains this value.
    pub fn minimal_order(&self) -> u32 {
        let mut divisors: Vec<u32> = (1..=self.order).filter(|d| self.order.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        for d in divisors {
            // test membership: element fixed by the Galois group of Q(ζ_m)/Q(ζ_d)
            // is equivalent to being a polynomial in ζ_m^{m/d}; check by trial reduction.
            if let Some(v) = self.restrict(d) {
                debug_assert!(v.embed(self.order) == *self);
                return d;
            }
        }
        self.order
    }

    fn restrict(&self, d: u32) -> Option<Self> {
        if d == self.order {
            return Some(self.clone());
        }
        let deg_d = cyclo_data(d).degree();
        // Solve for coefficients c_0..c_{deg_d-1} with Σ c_j ζ_m^{j m/d} = self.
        // Columns are the reductions of those powers; solve by Gaussian elimination.
        let step = (self.order / d) as usize;
        let data = cyclo_data(self.order);
        let rows = self.coeffs.len();
        let mut mat: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> = (0..deg_d)
                    .map(|j| {
                        Rational::from_integer(BigInt::from(
                            data.powers[(j * step) % self.order as usize][r],
                        ))
                    })
                    .collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let sol = solve_overdetermined(&mut mat, deg_d)?;
        Some(CycloValue {
            order: d,
            coeffs: sol,
        })
    }
}

fn solve_overdetermined(mat: &mut [Vec<Rational>], ncols: usize) -> Option<Vec<Rational>> {
    let nrows = mat.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..nrows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let inv = Rational::one() / &mat[row][col];
        for c in col..=ncols {
            let v = &mat[row][c] * &inv;
            mat[row][c] = v;
        }
        for r in 0..nrows {
            if r != row && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in col..=ncols {
                    let v = &mat[row][c] * &f;
                    mat[r][c] -= v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    if mat[row..].iter().any(|r| !r[ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); ncols];
    for (r, c) in pivots {
        sol[c] = mat[r][ncols].clone();
    }
    Some(sol)
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    if rem.len() - 1 < db || (rem.len() == 1 && rem[0].is_zero()) {
        return (vec![Rational::zero()], rem);
    }
    let lead_inv = Rational::one() / &b[db];
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                let v = &c * bj;
                rem[i + j] -= v;
            }
        }
        quot[i] = c;
    }
    (trim(quot), trim(rem))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect()
}

/// Returns `(g, s)` with `s·a ≡ g (mod b)`.
fn ext_gcd(a: Vec<Rational>, b: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![Rational::one()], vec![Rational::zero()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = trim(poly_sub(&s0, &poly_mul(&q, &s1)));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

impl PartialEq for CycloValue {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloValue {}

impl Add for &CycloValue {
    type Output = CycloValue;
    fn add(self, rhs: &CycloValue) -> CycloValue {
        if self.order == rhs.order {
            return CycloValue {
                order: self.order,
                coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
            };
        }
        let (a, b) = CycloValue::aligned(self, rhs);
        &a + &b
    }
}

impl Sub for &CycloValue {
    type Output = CycloValue;
    fn sub(self, rhs: &CycloValue) -> CycloValue {
        self + &(-rhs)
    }
}

impl Neg for &CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        CycloValue {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycloValue {
    type Output = CycloValue;
    fn mul(self, rhs: &CycloValue) -> CycloValue {
        if self.order != rhs.order {
            let (a, b) = CycloValue::aligned(self, rhs);
            return &a * &b;
        }
        let prod = poly_mul(&self.coeffs, &rhs.coeffs);
        CycloValue::from_poly(self.order, &prod)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloValue {
            type Output = CycloValue;
            fn $m(self, rhs: CycloValue) -> CycloValue {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        -&self
    }
}

impl fmt::Display for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z{}", self.order)?,
                _ => write!(f, "({c})*z{}^{j}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A Z-linear combination `Σ c_e ζ_m^e` with machine-integer coefficients.
///
/// Lattice sums accumulate character values here and convert once at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSum {
    order: u32,
    counts: Vec<i128>,
}

impl RootSum {
    pub fn new(order: u32) -> Self {
        RootSum {
            order,
            counts: vec![0; order as usize],
        }
    }

    #[inline]
    pub fn add(&mut self, exponent: u32, weight: i128) {
        self.counts[exponent as usize] += weight;
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn counts(&self) -> &[i128] {
        &self.counts
    }

    pub fn merge(&mut self, other: &RootSum) {
        assert_eq!(self.order, other.order);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn to_cyclo(&self) -> CycloValue {
        let data = cyclo_data(self.order);
        let deg = data.degree();
        let mut acc = vec![0i128; deg];
        for (e, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &r) in acc.iter_mut().zip(&data.powers[e]) {
                *slot += c * r as i128;
            }
        }
        CycloValue {
            order: self.order,
            coeffs: acc
                .into_iter()
                .map(|c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn roots_of_unity_cycle() {
        let z = CycloValue::root_of_unity(5, 1);
        assert_eq!(z.pow(5), CycloValue::one(5));
        let s = (0..5).fold(CycloValue::zero(5), |acc, e| &acc + &CycloValue::root_of_unity(5, e));
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_and_conjugate() {
        let z = CycloValue::root_of_unity(3, 1);
        let one = CycloValue::one(3);
        let a = &one - &z;
        let ainv = a.inv().unwrap();
        assert_eq!(&a * &ainv, one);
        assert_eq!(z.conj(), CycloValue::root_of_unity(3, 2));
        let i = CycloValue::root_of_unity(4, 1);
        assert_eq!(&i * &i.conj(), CycloValue::one(4));
    }

    #[test]
    fn mixed_orders_embed() {
        let i = CycloValue::root_of_unity(4, 1);
        let w = CycloValue::root_of_unity(3, 1);
        let prod = &i * &w;
        assert_eq!(prod.order(), 12);
        assert_eq!(prod, CycloValue::root_of_unity(12, 3 + 4));
        assert_eq!(CycloValue::from_int(-1), CycloValue::root_of_unity(2, 1));
        assert_eq!(CycloValue::root_of_unity(4, 2), CycloValue::from_int(-1));
    }

    #[test]
    fn minimal_order_detects_subfield() {
        let v = CycloValue::root_of_unity(2, 1).embed(12);
        assert_eq!(v.minimal_order(), 1);
        let i = CycloValue::root_of_unity(4, 1).embed(12);
        assert_eq!(i.minimal_order(), 4);
    }

    #[test]
    fn rootsum_converts() {
        let mut s = RootSum::new(4);
        s.add(0, 1);
        s.add(1, 2);
        s.add(3, -3);
        s.add(2, -4);
        // 1 + 2i - 3(-i) - 4(-1)
        let v = s.to_cyclo();
        assert_eq!(v.coeffs(), &[int(5), int(5)]);
    }
}
