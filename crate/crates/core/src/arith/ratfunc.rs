//! Rational functions in one variable `u` with cyclotomic coefficients, and
//! their regular part at `u = 1`.
//!
//! Expansion at 1 substitutes `u = 1 + ε`: the coefficient of `ε^j` in
//! `Σ a_e u^e` is `Σ a_e binom(e, j)`, so only as many coefficients as are
//! needed are ever formed.

use num_bigint::BigInt;
use num_traits::One;

use super::{CycloValue, Rational};
use crate::arith::modint::binomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RationalFunctionU {
    num: Vec<CycloValue>,
    den: Vec<CycloValue>,
}

fn trim(mut p: Vec<CycloValue>) -> Vec<CycloValue> {
    while p.len() > 1 && p.last().is_some_and(CycloValue::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(CycloValue::zero(1));
    }
    p
}

fn is_zero_poly(p: &[CycloValue]) -> bool {
    p.iter().all(CycloValue::is_zero)
}

fn poly_mul(a: &[CycloValue], b: &[CycloValue]) -> Vec<CycloValue> {
    let mut out = vec![CycloValue::zero(1); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    trim(out)
}

fn poly_add(a: &[CycloValue], b: &[CycloValue]) -> Vec<CycloValue> {
    let n = a.len().max(b.len());
    let z = CycloValue::zero(1);
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
            .collect(),
    )
}

/// Coefficient of `ε^j` after substituting `u = 1 + ε`.
fn shifted_coeff(p: &[CycloValue], j: usize) -> CycloValue {
    let mut acc = CycloValue::zero(1);
    for (e, c) in p.iter().enumerate().skip(j) {
        if c.is_zero() {
            continue;
        }
        let b = Rational::from_integer(binomial(&BigInt::from(e), j));
        acc = &acc + &c.scale(&b);
    }
    acc
}

/// Synthetic division by `u - 1`; caller guarantees `p(1) = 0`.
fn div_u_minus_one(p: &[CycloValue]) -> Vec<CycloValue> {
    let n = p.len();
    if n <= 1 {
        return vec![CycloValue::zero(1)];
    }
    let mut q = vec![CycloValue::zero(1); n - 1];
    q[n - 2] = p[n - 1].clone();
    for i in (1..n - 1).rev() {
        q[i - 1] = &p[i] + &q[i];
    }
    trim(q)
}

impl RationalFunctionU {
    pub fn new(num: Vec<CycloValue>, den: Vec<CycloValue>) -> Result<Self> {
        if is_zero_poly(&den) {
            return Err(Error::DivisionByZero("rational function denominator"));
        }
        Ok(RationalFunctionU {
            num: trim(num),
            den: trim(den),
        })
    }

    pub fn from_rational_coeffs(num: &[Rational], den: &[Rational]) -> Result<Self> {
        let lift = |v: &[Rational]| -> Vec<CycloValue> {
            v.iter()
                .map(|c| CycloValue::from_rational(c.clone(), 1))
                .collect()
        };
        Self::new(lift(num), lift(den))
    }

    pub fn polynomial(num: Vec<CycloValue>) -> Self {
        RationalFunctionU {
            num: trim(num),
            den: vec![CycloValue::one(1)],
        }
    }

    pub fn numerator(&self) -> &[CycloValue] {
        &self.num
    }

    pub fn denominator(&self) -> &[CycloValue] {
        &self.den
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunctionU {
            num: poly_mul(&self.num, &other.num),
            den: poly_mul(&self.den, &other.den),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalFunctionU {
            num: poly_add(
                &poly_mul(&self.num, &other.den),
                &poly_mul(&other.num, &self.den),
            ),
            den: poly_mul(&self.den, &other.den),
        }
    }

    pub fn scale(&self, c: &CycloValue) -> Self {
        RationalFunctionU {
            num: trim(self.num.iter().map(|a| a * c).collect()),
            den: self.den.clone(),
        }
    }

    /// Cancels every common factor `u - 1`.
    pub fn reduce(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        while !is_zero_poly(&num)
            && shifted_coeff(&num, 0).is_zero()
            && shifted_coeff(&den, 0).is_zero()
        {
            num = div_u_minus_one(&num);
            den = div_u_minus_one(&den);
        }
        RationalFunctionU { num, den }
    }

    /// Order of the pole at `u = 1` (0 when regular).
    pub fn pole_order_at_one(&self) -> usize {
        if is_zero_poly(&self.num) {
            return 0;
        }
        let v_den = (0..).find(|&j| !shifted_coeff(&self.den, j).is_zero()).unwrap();
        let v_num = (0..).find(|&j| !shifted_coeff(&self.num, j).is_zero()).unwrap();
        v_den.saturating_sub(v_num)
    }
}

/// Coefficients `c_0..c_order` of the expansion `f = Σ c_j (u-1)^j` at `u = 1`.
pub fn taylor_at_one(f: &RationalFunctionU, order: usize) -> Result<Vec<CycloValue>> {
    let v = (0..)
        .find(|&j| !shifted_coeff(&f.den, j).is_zero())
        .expect("nonzero denominator has finite order at 1");
    let num: Vec<CycloValue> = (0..=v + order).map(|j| shifted_coeff(&f.num, j)).collect();
    if let Some(j) = num[..v].iter().position(|c| !c.is_zero()) {
        return Err(Error::PoleAtOne(v - j));
    }
    let den: Vec<CycloValue> = (v..=v + order).map(|j| shifted_coeff(&f.den, j)).collect();
    let lead_inv = den[0].inv()?;
    let mut out: Vec<CycloValue> = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let mut acc = num[v + i].clone();
        for j in 1..=i {
            acc = &acc - &(&den[j] * &out[i - j]);
        }
        out.push(&acc * &lead_inv);
    }
    Ok(out)
}

/// `lim_{u→1⁻} f(u)` for `f` regular at 1.
pub fn abel_limit(f: &RationalFunctionU) -> Result<CycloValue> {
    Ok(taylor_at_one(f, 0)?.swap_remove(0))
}

/// `(1 - u^m)` as a coefficient vector.
pub fn one_minus_u_pow(m: usize) -> Vec<CycloValue> {
    let mut p = vec![CycloValue::zero(1); m + 1];
    p[0] = CycloValue::one(1);
    p[m] = CycloValue::from_rational(-Rational::one(), 1);
    p
}

pub fn poly_pow(p: &[CycloValue], e: usize) -> Vec<CycloValue> {
    let mut acc = vec![CycloValue::one(1)];
    for _ in 0..e {
        acc = poly_mul(&acc, p);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn q(v: &[i64]) -> Vec<CycloValue> {
        v.iter().map(|&c| CycloValue::from_int(c)).collect()
    }

    #[test]
    fn telescoping_quotients() {
        let f = RationalFunctionU::new(q(&[1, 0, 0, -1]), q(&[1, -1])).unwrap();
        assert_eq!(abel_limit(&f).unwrap(), CycloValue::from_int(3));
        let g = RationalFunctionU::new(one_minus_u_pow(5), one_minus_u_pow(1)).unwrap();
        assert_eq!(abel_limit(&g).unwrap(), CycloValue::from_int(5));
    }

    #[test]
    fn regular_quotient() {
        let f = RationalFunctionU::new(q(&[1]), q(&[1, 1])).unwrap();
        assert_eq!(
            abel_limit(&f).unwrap(),
            CycloValue::from_rational(rat(1, 2), 1)
        );
    }

    #[test]
    fn first_order_expansion() {
        // 2(1-u)/(1-u^2)
        let f = RationalFunctionU::new(q(&[2, -2]), one_minus_u_pow(2)).unwrap();
        let c = taylor_at_one(&f, 1).unwrap();
        assert_eq!(c[0], CycloValue::from_int(1));
        assert_eq!(c[1], CycloValue::from_rational(rat(-1, 2), 1));
    }

    #[test]
    fn cyclotomic_substitution() {
        let z = CycloValue::root_of_unity(3, 1);
        let zero = CycloValue::zero(3);
        let one = CycloValue::one(3);
        let f = RationalFunctionU::new(
            vec![zero.clone(), zero, z.clone()],
            vec![one.clone(), -&z],
        )
        .unwrap();
        let expected = &z * &(&one - &z).inv().unwrap();
        assert_eq!(abel_limit(&f).unwrap(), expected);
    }

    #[test]
    fn pole_detected() {
        let f = RationalFunctionU::new(q(&[1]), q(&[1, -1])).unwrap();
        assert_eq!(abel_limit(&f), Err(Error::PoleAtOne(1)));
        assert_eq!(f.pole_order_at_one(), 1);
    }

    #[test]
    fn reduce_cancels_common_factors() {
        let f = RationalFunctionU::new(q(&[1, -2, 1]), q(&[-1, 0, 1])).unwrap();
        let r = f.reduce();
        assert_eq!(r.numerator().len(), 2);
        assert_eq!(abel_limit(&r).unwrap(), abel_limit(&f).unwrap());
        assert_eq!(abel_limit(&f).unwrap(), CycloValue::from_int(0));
    }
}
