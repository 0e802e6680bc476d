//! Classical one-variable values used to cross-check the `k = 1` case:
//! generalized Bernoulli numbers, Kubota-Leopoldt values and the classical
//! Ferrero-Greenberg derivative.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gamma::morita_gamma;
use crate::arith::modint::binomial;
use crate::arith::{CycloValue, Rational};
use crate::characters::{PadicEmbedding, ResidueCharacter};
use crate::error::{Error, Result};
use crate::padic::{self, Padic};

/// `B_0, …, B_n` with `B_1 = −1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        // Σ_{j≤m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binomial(&BigInt::from(m + 1), j)) * bj;
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `B_m(x) = Σ_j C(m, j) B_j x^{m−j}`.
pub fn bernoulli_polynomial(m: usize, x: &Rational, b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for j in (0..=m).rev() {
        acc += Rational::from_integer(binomial(&BigInt::from(m), j)) * &b[j] * &xp;
        xp *= x;
    }
    acc
}

/// `B_{m,χ} = f^{m−1} Σ_{a=1}^{f} χ(a) B_m(a/f)` for χ of modulus `f`.
pub fn generalized_bernoulli(chi: &ResidueCharacter, m: usize) -> CycloValue {
    let f = chi.modulus();
    let b = bernoulli_numbers(m);
    let mut acc = CycloValue::zero(chi.order());
    for a in 1..=f {
        if chi.exponent(a % f).is_none() {
            continue;
        }
        let x = Rational::new(BigInt::from(a), BigInt::from(f));
        acc = &acc + &chi.value(a % f).scale(&bernoulli_polynomial(m, &x, &b));
    }
    acc.scale(&Rational::from_integer(BigInt::from(f).pow(m as u32 - 1)))
}

/// `L_p(1 − m, χω) = −(1 − χ(p) p^{m−1}) B_{m,χ}/m` for `m ≡ 1 mod (p − 1)`.
pub fn kubota_leopoldt_chi(chi: &ResidueCharacter, p: u64, m: usize, emb: &PadicEmbedding) -> Result<Padic> {
    if m == 0 || !(m as u64 - 1).is_multiple_of(p - 1) {
        return Err(Error::ParameterViolation(format!("m = {m} is not 1 mod {}", p - 1)));
    }
    let bm = generalized_bernoulli(chi, m);
    let chi_p = chi.value(p % chi.modulus());
    let pm = Rational::from_integer(BigInt::from(p).pow(m as u32 - 1));
    let euler = &CycloValue::one(1) - &chi_p.scale(&pm);
    let v = (&euler * &bm).scale(&Rational::new(BigInt::from(-1), BigInt::from(m)));
    emb.embed(&v)
}

/// `ζ_p(0) = −B_{1,ω⁻¹} = −(1/p) Σ_{a=1}^{p−1} ω(a)⁻¹ a`.
pub fn kubota_leopoldt_zeta0(p: u64, digits: u32) -> Result<Padic> {
    padic::check_prime(p)?;
    let work = digits + 1;
    let mut acc = Padic::zero(p, work as i64);
    for a in 1..p {
        let pa = Padic::from_int(p, a as i64, work)?;
        acc = acc.add(&pa.div(&padic::teichmuller(&pa)?)?);
    }
    let inv_p = Padic::from_rational(p, &Rational::new(1.into(), BigInt::from(p)), work)?;
    Ok(acc.mul(&inv_p).neg())
}

/// `L′_p(0, χω) = Σ_{a=1}^{N} χ(a) log_p Γ_p(a/N) − log_p(N) · L_p(0, χω)` with Morita's Γ_p.
pub fn ferrero_greenberg_classical(chi: &ResidueCharacter, p: u64, digits: u32, emb: &PadicEmbedding) -> Result<Padic> {
    let n = chi.modulus();
    let mut acc = Padic::zero(p, digits as i64);
    for a in 1..=n {
        if chi.exponent(a % n).is_none() {
            continue;
        }
        let g = morita_gamma(p, &Rational::new(BigInt::from(a), BigInt::from(n)), digits + 1)?;
        acc = acc.add(&emb.embed(&chi.value(a % n))?.mul(&padic::iwasawa_log(&g)?));
    }
    let l0 = kubota_leopoldt_chi(chi, p, 1, emb)?;
    let log_n = padic::iwasawa_log(&Padic::from_int(p, n as i64, digits + 1)?)?;
    Ok(acc.sub(&log_n.mul(&l0)).truncate(digits as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], int(0));
        assert_eq!(b[12], rat(-691, 2730));
        assert_eq!(bernoulli_polynomial(2, &rat(1, 3), &b), rat(1, 9) - rat(1, 3) + rat(1, 6));
    }

    #[test]
    fn b1_of_odd_character_mod_5() {
        let chars = ResidueCharacter::enumerate(5, &[]);
        let chi = chars.iter().find(|c| c.order() == 4 && c.value(2) == CycloValue::root_of_unity(4, 1)).unwrap();
        // B_{1,χ} = (1/5) Σ χ(a) a = (1 + 2i − 3i − 4)/5
        let expected = &CycloValue::from_rational(rat(-3, 5), 4) + &CycloValue::root_of_unity(4, 1).scale(&rat(-1, 5));
        assert_eq!(generalized_bernoulli(chi, 1), expected);
    }
}
