//! Periods of the Cassou-Noguès measures `μ_{V,x,N}` and `μ_{V,x,χ}`:
//! closed forms, the stratified pieces `Ω_S`, and an Abel-summation oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::modint::{flat, mod_inverse, pow_u64, val_rational};
use crate::arith::ratfunc::{one_minus_u_pow, poly_pow};
use crate::arith::{abel_limit, taylor_at_one, CycloValue, QPoly, Rational, RationalFunctionU, RootSum};
use crate::characters::HeckeCharacter;
use crate::cones::ConeContext;
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldElement};

/// Residues `ρ(v_i)` of a cone's generators together with `ρ(v_k)⁻¹`.
#[derive(Clone, Debug)]
pub struct ConeResidues {
    modulus: u64,
    images: Vec<u64>,
    last_inv: u64,
}

impl ConeResidues {
    pub fn new(cone: &ConeContext, rho: &CNResidueMap) -> Result<Self> {
        let n = rho.modulus();
        let images: Vec<u64> = cone.generators().iter().map(|v| rho.residue(v)).collect::<Result<_>>()?;
        for &r in &images {
            if r.gcd(&n) != 1 {
                return Err(Error::NotCoprimeToModulus(n));
            }
        }
        Self::from_images(n, images)
    }

    pub fn from_images(modulus: u64, images: Vec<u64>) -> Result<Self> {
        let last = *images.last().ok_or_else(|| Error::InvalidCone("empty cone".into()))?;
        let last_inv = mod_inverse(last % modulus, modulus).ok_or(Error::NotCoprimeToModulus(modulus))?;
        Ok(ConeResidues { modulus, images, last_inv })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `Σ d_i ρ(v_i)` mod N.
    #[inline]
    pub fn dot(&self, d: &[u64]) -> u64 {
        let n = self.modulus as u128;
        (d.iter().zip(&self.images).map(|(&a, &b)| a as u128 * b as u128).sum::<u128>() % n) as u64
    }
}

/// `H_V(y) = Σ_{1≤d_i<N, d·v ≡ -y} d_1⋯d_k` for `ρ(y) = ry`.
pub fn h_v(res: &ConeResidues, ry: u64) -> BigInt {
    let n = res.modulus;
    let k = res.degree();
    let target = (n - ry % n) % n;
    let mut total: i128 = 0;
    let mut d = vec![1u64; k - 1];
    if n < 2 {
        return BigInt::zero();
    }
    loop {
        let partial = res.dot(&{
            let mut full = d.clone();
            full.push(0);
            full
        });
        let dk = ((target + n - partial) % n) as u128 * res.last_inv as u128 % n as u128;
        if dk != 0 {
            let prod: i128 = d.iter().map(|&x| x as i128).product::<i128>() * dk as i128;
            total += prod;
        }
        // odometer over 1..N
        let mut i = 0;
        loop {
            if i == k - 1 {
                return BigInt::from(total);
            }
            d[i] += 1;
            if d[i] < n {
                break;
            }
            d[i] = 1;
            i += 1;
        }
    }
}

/// `a_{V,N}(y) = (-1)^{k-1} H_V(y) / N^{k-1}`.
pub fn coeff_a(res: &ConeResidues, ry: u64) -> Rational {
    let k = res.degree() as u32;
    let sign = if k % 2 == 1 { 1 } else { -1 };
    Rational::new(h_v(res, ry) * sign, BigInt::from(res.modulus).pow(k - 1))
}

/// Coefficients `b_0..b_k` of `N^k((1-u)/(1-u^N))^k` at `u = 1`.
pub fn b_coefficients(n: u64, k: usize) -> Result<Vec<Rational>> {
    let geometric = vec![CycloValue::one(1); n as usize];
    let nk = Rational::from_integer(BigInt::from(n).pow(k as u32));
    let f = RationalFunctionU::new(vec![CycloValue::from_rational(nk, 1)], poly_pow(&geometric, k))?;
    Ok(taylor_at_one(&f, k)?
        .into_iter()
        .map(|c| c.as_rational().expect("rational coefficients"))
        .collect())
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// The polynomial `P_i(X)` giving the binomial residue sums for `0 ≤ i ≤ k`.
pub fn residue_binomial_poly(i: usize, k: usize) -> QPoly {
    let mut acc = QPoly::zero();
    for c in compositions(i, k) {
        if i == k && c.iter().all(|&x| x > 0) {
            continue;
        }
        let term = c.iter().fold(QPoly::constant(Rational::one()), |p, &j| &p * &QPoly::binomial(j + 1));
        acc = &acc + &term;
    }
    acc.div_x().expect("every term carries a factor X")
}

/// Checks `Σ_{z∈R(y,N)} binom(z̃, i)` (less the `d_1⋯d_k` sum when `i = k`)
/// against `P_i(N)` by enumerating `R(y, N)`.
pub fn residue_binomial_check(i: usize, res: &ConeResidues, ry: u64) -> bool {
    let n = res.modulus;
    let k = res.degree();
    let mut lhs = Rational::zero();
    let total = (n as usize).pow(k as u32);
    let mut z = vec![0u64; k];
    for idx in 0..total {
        let mut rem = idx;
        for zi in z.iter_mut() {
            *zi = (rem % n as usize) as u64;
            rem /= n as usize;
        }
        if res.dot(&z) != ry % n {
            continue;
        }
        let zt: u64 = z.iter().sum();
        lhs += Rational::from_integer(crate::arith::modint::binomial(&BigInt::from(zt), i));
        if i == k && z.iter().all(|&x| x > 0) {
            lhs -= Rational::from_integer(z.iter().map(|&x| BigInt::from(x)).product());
        }
    }
    lhs == residue_binomial_poly(i, k).eval(&Rational::from_integer(n.into()))
}

/// Which measure a [`MeasureSpec`] describes.
#[derive(Clone, Debug)]
pub enum MeasureKind {
    Zeta,
    Dirichlet(HeckeCharacter),
}

/// A cone, base point and modulus determining `μ_{V,x,N}` or `μ_{V,x,χ}`.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    cone: ConeContext,
    rho: CNResidueMap,
    res: ConeResidues,
    x: FieldElement,
    x_coords: Vec<Rational>,
    rx: u64,
    p: u64,
    t: u32,
    kind: MeasureKind,
}

/// A cylinder `x + l·v + p^n L_V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodQuery {
    pub l: Vec<u64>,
    pub n: u32,
}

impl PeriodQuery {
    pub fn new(l: Vec<u64>, n: u32) -> Self {
        PeriodQuery { l, n }
    }

    /// The `p^k` sub-cylinders at level `n + 1`.
    pub fn children(&self, p: u64) -> Vec<PeriodQuery> {
        let pn = p.pow(self.n);
        let k = self.l.len();
        let mut out = Vec::new();
        for idx in 0..p.pow(k as u32) {
            let mut rem = idx;
            let l = self
                .l
                .iter()
                .map(|&li| {
                    let j = rem % p;
                    rem /= p;
                    li + pn * j
                })
                .collect();
            out.push(PeriodQuery { l, n: self.n + 1 });
        }
        debug_assert_eq!(out.len(), p.pow(k as u32) as usize);
        out
    }
}

const ORACLE_MAX_N: u64 = 11;
const ORACLE_MAX_PN: u64 = 9;
const ORACLE_MAX_K: usize = 2;

impl MeasureSpec {
    pub fn new(cone: ConeContext, rho: CNResidueMap, x: FieldElement, p: u64, kind: MeasureKind) -> Result<Self> {
        crate::padic::check_prime(p)?;
        let n = rho.modulus();
        if n.is_multiple_of(p) {
            return Err(Error::ParameterViolation(format!("p = {p} divides N = {n}")));
        }
        if let MeasureKind::Dirichlet(chi) = &kind {
            chi.require_nontrivial()?;
            if chi.modulus() != n {
                return Err(Error::InvalidCharacter("character modulus differs from N".into()));
            }
        }
        let res = ConeResidues::new(&cone, &rho)?;
        let rx = rho.residue(&x)?;
        let x_coords = cone.v_coords(&x);
        let mut t = 0u32;
        for c in &x_coords {
            if let Some(v) = val_rational(p, c) {
                if v < 0 {
                    t = t.max((-v) as u32);
                }
            }
        }
        for c in &x_coords {
            if val_rational(n, c).is_none() && !c.is_zero() {
                return Err(Error::NotIntegralAtModulus(n));
            }
        }
        Ok(MeasureSpec { cone, rho, res, x, x_coords, rx, p, t, kind })
    }

    pub fn cone(&self) -> &ConeContext {
        &self.cone
    }

    pub fn rho(&self) -> &CNResidueMap {
        &self.rho
    }

    pub fn residues(&self) -> &ConeResidues {
        &self.res
    }

    pub fn x(&self) -> &FieldElement {
        &self.x
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn modulus(&self) -> u64 {
        self.rho.modulus()
    }

    pub fn degree(&self) -> usize {
        self.res.degree()
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    fn chi(&self) -> Result<&HeckeCharacter> {
        match &self.kind {
            MeasureKind::Dirichlet(chi) => Ok(chi),
            MeasureKind::Zeta => Err(Error::InvalidQuery("zeta measure has no character".into())),
        }
    }

    /// `ρ(x + L·v)`.
    #[inline]
    pub fn residue_at(&self, l: &[u64]) -> u64 {
        let n = self.modulus();
        let reduced: Vec<u64> = l.iter().map(|&a| a % n).collect();
        (self.rx + self.res.dot(&reduced)) % n
    }

    fn check_query(&self, q: &PeriodQuery) -> Result<u64> {
        let pn = pow_u64(self.p, q.n).ok_or_else(|| Error::InvalidQuery("p^n overflows".into()))?;
        if q.l.len() != self.degree() || q.l.iter().any(|&li| li >= pn) {
            return Err(Error::InvalidQuery(format!("need 0 ≤ l_i < {pn}")));
        }
        Ok(pn)
    }

    /// `μ_{V,x,N}(x + l·v + p^n L_V) = (-1)^k [H_V((x+l·v)/p^n)/N^{k-1} - ((N-1)/2)^k]`.
    pub fn period_zeta(&self, q: &PeriodQuery) -> Result<Rational> {
        if !matches!(self.kind, MeasureKind::Zeta) {
            return Err(Error::InvalidQuery("period_zeta needs the zeta measure".into()));
        }
        let pn = self.check_query(q)?;
        let n = self.modulus();
        let k = self.degree() as u32;
        let pn_inv = mod_inverse(pn % n, n).expect("p is prime to N");
        let ry = (self.residue_at(&q.l) as u128 * pn_inv as u128 % n as u128) as u64;
        let h = Rational::new(h_v(&self.res, ry), BigInt::from(n).pow(k - 1));
        let half = Rational::new(BigInt::from(n - 1), BigInt::from(2));
        let mut half_k = Rational::one();
        for _ in 0..k {
            half_k *= &half;
        }
        let v = h - half_k;
        Ok(if k % 2 == 1 { -v } else { v })
    }

    /// `μ_{V,x,χ}(x + l·v + p^n L_V) = (-1)^k N^{-k} Σ_{0≤d<N} χ(x + (l + p^n d)·v) Π d_i`.
    pub fn period_chi(&self, q: &PeriodQuery) -> Result<CycloValue> {
        let chi = self.chi()?;
        let pn = self.check_query(q)?;
        let n = self.modulus();
        let k = self.degree();
        let mut acc = RootSum::new(chi.order());
        let pn_mod = pn % n;
        for_each_box(k, n, |d| {
            let l: Vec<u64> = q.l.iter().zip(d).map(|(&li, &di)| li % n + pn_mod * di).collect();
            let r = self.residue_at(&l);
            if let Some(e) = chi.residue_character().exponent(r) {
                let w: i128 = d.iter().map(|&x| x as i128).product();
                acc.add(e, w);
            }
        });
        Ok(acc.to_cyclo().scale(&sign_over_power(k, n, k as u32)))
    }

    /// The `p^n ≡ 1 (mod N)` form of the Dirichlet period, summed over subsets `S`.
    pub fn period_chi_q(&self, q: &PeriodQuery) -> Result<CycloValue> {
        let chi = self.chi()?;
        let pn = self.check_query(q)?;
        let n = self.modulus();
        if pn % n != 1 % n {
            return Err(Error::LevelNotOneModN);
        }
        let k = self.degree();
        let mut total = CycloValue::zero(chi.order());
        for mask in 0u32..(1 << k) {
            let bounds: Vec<u64> = (0..k).map(|i| if mask >> i & 1 == 1 { n } else { q.l[i] }).collect();
            let mut acc = RootSum::new(chi.order());
            for_each_ranges(&bounds, |d| {
                if let Some(e) = chi.residue_character().exponent(self.residue_at(d)) {
                    let w: i128 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| d[i] as i128).product();
                    acc.add(e, w);
                }
            });
            let s = mask.count_ones();
            total = &total + &acc.to_cyclo().scale(&Rational::new(1.into(), BigInt::from(n).pow(s)));
        }
        Ok(if k % 2 == 1 { -total } else { total })
    }

    /// The stratum `Ω_S(a, n)` for `S ⊆ {0..k-1}` given as a bitmask.
    pub fn omega_s(&self, a: &FieldElement, n_level: u32, s_mask: u32) -> Result<CycloValue> {
        let chi = self.chi()?;
        let p = self.p;
        let n = self.modulus();
        let k = self.degree();
        let a_coords = self.cone.v_coords(a);
        let diff: Vec<Rational> = a_coords.iter().zip(&self.x_coords).map(|(a, x)| a - x).collect();
        let p_integral = |r: &Rational| val_rational(p, r).is_none_or(|v| v >= 0);
        for (i, d) in diff.iter().enumerate() {
            if s_mask >> i & 1 == 1 && !p_integral(d) {
                return Ok(CycloValue::zero(chi.order()));
            }
        }
        let pn = pow_u64(p, n_level).ok_or_else(|| Error::InvalidQuery("p^n overflows".into()))?;
        let nr = Rational::from_integer(n.into());
        let mut by_exp = vec![Rational::zero(); chi.order() as usize];
        for_each_box(k, n, |d| {
            let Some(e) = chi.residue_character().exponent(self.residue_at(d)) else { return };
            let mut w = Rational::one();
            for i in 0..k {
                let di = Rational::from_integer(d[i].into());
                if s_mask >> i & 1 == 1 {
                    w *= (&self.x_coords[i] + &di) / &nr;
                } else {
                    w *= padic_flat(&((&diff[i] - &di) / &nr), p, pn);
                }
                if w.is_zero() {
                    return;
                }
            }
            by_exp[e as usize] += w;
        });
        let scale = sign_over_power(k, pn, k as u32);
        Ok(CycloValue::from_poly(chi.order(), &by_exp).scale(&scale))
    }

    /// Abel-summation value of the cylinder measure, computed from the
    /// generating function rather than from the closed forms.
    pub fn oracle_period(&self, q: &PeriodQuery) -> Result<CycloValue> {
        let pn = self.check_query(q)?;
        let n = self.modulus();
        let k = self.degree();
        if n > ORACLE_MAX_N || pn > ORACLE_MAX_PN || k > ORACLE_MAX_K {
            return Err(Error::InstanceTooLarge(format!("N = {n}, p^n = {pn}, k = {k}")));
        }
        // L = l + p^n m with m ≥ 0; the coefficient is periodic in m mod N
        let weight: Box<dyn Fn(u64) -> CycloValue> = match &self.kind {
            MeasureKind::Zeta => Box::new(move |r: u64| {
                CycloValue::from_int(if r == 0 { n as i64 - 1 } else { -1 })
            }),
            MeasureKind::Dirichlet(chi) => {
                let chi = chi.clone();
                Box::new(move |r: u64| chi.residue_character().value(r))
            }
        };
        self.abel_sum(q, pn, weight)
    }

    fn abel_sum(&self, q: &PeriodQuery, pn: u64, weight: impl Fn(u64) -> CycloValue) -> Result<CycloValue> {
        let n = self.modulus();
        let k = self.degree();
        let base: u64 = q.l.iter().sum();
        let deg = base + pn * (n - 1) * k as u64;
        let mut num = vec![CycloValue::zero(1); deg as usize + 1];
        for_each_box(k, n, |m| {
            let l: Vec<u64> = q.l.iter().zip(m).map(|(&li, &mi)| li + pn * mi).collect();
            let w = weight(self.residue_at(&l));
            let e = (base + pn * m.iter().sum::<u64>()) as usize;
            num[e] = &num[e] + &w;
        });
        let den = poly_pow(&one_minus_u_pow((pn * n) as usize), k);
        abel_limit(&RationalFunctionU::new(num, den)?)
    }

    /// For the additive character `ξ_j(y) = ζ_N^{j ρ(y)}`, the Abel value of the
    /// `ξ`-component of the zeta measure and the closed form
    /// `ξ(y) / Π(1 - ξ(p^n v_i))`. `None` when a denominator factor vanishes.
    pub fn xi_component(&self, q: &PeriodQuery, j: u64) -> Result<Option<(CycloValue, CycloValue)>> {
        let pn = self.check_query(q)?;
        let n = self.modulus();
        let xi = |r: u64| CycloValue::root_of_unity(n as u32, ((j * r) % n) as i64);
        let mut den = CycloValue::one(n as u32);
        for &rv in self.res.images() {
            let f = &CycloValue::one(n as u32) - &xi(pn % n * rv % n);
            if f.is_zero() {
                return Ok(None);
            }
            den = &den * &f;
        }
        let closed = &xi(self.residue_at(&q.l)) * &den.inv()?;
        let oracle = self.abel_sum(q, pn, xi)?;
        Ok(Some((oracle, closed)))
    }

    /// Runs the q-telescoping self-test behind the normalisation constant:
    /// `Σ_{0≤l<q} H_V(x + l·v) - H_V(x) = N^{k-1}((N-1)/2)^k (q^k - 1)`.
    pub fn telescoping_check(&self, q: u64) -> Result<bool> {
        let n = self.modulus();
        if q % n != 1 % n {
            return Err(Error::LevelNotOneModN);
        }
        let k = self.degree();
        let mut total = BigInt::zero();
        for_each_box(k, q, |l| total += h_v(&self.res, self.residue_at(l)));
        let lhs = Rational::from_integer(total - h_v(&self.res, self.rx));
        let half = Rational::new(BigInt::from(n - 1), 2.into());
        let rhs = Rational::from_integer(BigInt::from(n).pow(k as u32 - 1))
            * half.pow(k as i32)
            * Rational::from_integer(BigInt::from(q).pow(k as u32) - 1);
        Ok(lhs == rhs)
    }
}

/// `(-1)^k / base^e`.
fn sign_over_power(k: usize, base: u64, e: u32) -> Rational {
    let r = Rational::new(BigInt::one(), BigInt::from(base).pow(e));
    if k % 2 == 1 {
        -r
    } else {
        r
    }
}

/// `a♭_{p^n}` for rational `a`: the representative in `[0, p^n)` when `a` is
/// p-integral and 0 otherwise.
pub fn padic_flat(a: &Rational, p: u64, pn: u64) -> Rational {
    if val_rational(p, a).is_some_and(|v| v < 0) {
        return Rational::zero();
    }
    let den = a.denom().to_u64().map(|d| d % pn).unwrap_or(1);
    let inv = mod_inverse(den, pn).unwrap_or(0);
    let num = a.numer().mod_floor(&BigInt::from(pn)).to_u64().unwrap();
    Rational::from_integer((num as u128 * inv as u128 % pn as u128).into())
}

/// Calls `f` on every tuple in `[0, bound)^k`.
pub fn for_each_box(k: usize, bound: u64, f: impl FnMut(&[u64])) {
    for_each_ranges(&vec![bound; k], f)
}

/// Calls `f` on every tuple `d` with `0 ≤ d_i < bounds[i]`, first index fastest.
pub fn for_each_ranges(bounds: &[u64], mut f: impl FnMut(&[u64])) {
    if bounds.contains(&0) {
        return;
    }
    let mut d = vec![0u64; bounds.len()];
    loop {
        f(&d);
        let mut i = 0;
        loop {
            if i == bounds.len() {
                return;
            }
            d[i] += 1;
            if d[i] < bounds[i] {
                break;
            }
            d[i] = 0;
            i += 1;
        }
    }
}

/// `(-a / p^n)♭_N - (N-1)/2` negated: the regularised Bernoulli period for `F = Q`.
pub fn bernoulli_period(a: u64, p: u64, n_level: u32, n: u64) -> Rational {
    let pn = p.pow(n_level);
    let inv = mod_inverse(pn % n, n).expect("p prime to N");
    let v = flat(-((a % n) as i64) * inv as i64, n);
    -Rational::from_integer(v.into()) + Rational::new(BigInt::from(n - 1), 2.into())
}

/// `Σ_{x} [H_V(x)/N^{k-1} - ((N-1)/2)^k]` over the given base points.
pub fn zero_sum(res: &ConeResidues, base_residues: &[u64]) -> Rational {
    let n = res.modulus();
    let k = res.degree() as u32;
    let half = Rational::new(BigInt::from(n - 1), 2.into()).pow(k as i32);
    base_residues
        .iter()
        .map(|&rx| Rational::new(h_v(res, rx), BigInt::from(n).pow(k - 1)) - &half)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::characters::enumerate_characters;
    use crate::field::FieldData;
    use std::sync::Arc;

    fn rational_setup(n: u64) -> (ConeContext, CNResidueMap) {
        let f = Arc::new(FieldData::new(vec!["1".into()], vec![vec![FieldElement::from_ints(&[1])]]).unwrap());
        let cone = ConeContext::new(f.clone(), vec![f.one()]).unwrap();
        let rho = CNResidueMap::new(&f, n, vec![1]).unwrap();
        (cone, rho)
    }

    fn sqrt5_setup(n: u64, eps_image: u64) -> (ConeContext, CNResidueMap) {
        let e = FieldElement::from_ints;
        let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[-1, 3])]];
        let f = Arc::new(FieldData::new(vec!["1".into(), "eps".into()], table).unwrap());
        let cone = ConeContext::new(f.clone(), vec![f.one(), f.basis(1)]).unwrap();
        let rho = CNResidueMap::new(&f, n, vec![1, eps_image]).unwrap();
        (cone, rho)
    }

    #[test]
    fn h_v_examples() {
        let r1 = ConeResidues::from_images(5, vec![1]).unwrap();
        assert_eq!(h_v(&r1, 2), BigInt::from(3));
        assert_eq!(h_v(&r1, 0), BigInt::zero());
        let r2 = ConeResidues::from_images(5, vec![1, 4]).unwrap();
        assert_eq!(h_v(&r2, 0), BigInt::from(30));
        assert_eq!(coeff_a(&r2, 0), int(-6));
        assert_eq!(coeff_a(&r1, 2), int(3));
        // zero-sum at x = 1
        assert_eq!(h_v(&r2, 1), BigInt::from(20));
        assert_eq!(zero_sum(&r2, &[1]), int(0));
    }

    #[test]
    fn b_coefficient_examples() {
        assert_eq!(b_coefficients(2, 1).unwrap(), vec![int(1), rat(-1, 2)]);
        assert_eq!(b_coefficients(3, 1).unwrap(), vec![int(1), int(-1)]);
        for n in [2, 3, 5, 7] {
            for k in 1..4 {
                assert_eq!(b_coefficients(n, k).unwrap()[0], int(1));
            }
        }
    }

    #[test]
    fn residue_binomial_sums() {
        assert_eq!(residue_binomial_poly(0, 1), QPoly::constant(int(1)));
        assert_eq!(residue_binomial_poly(1, 2), QPoly::new(vec![int(0), int(-1), int(1)]));
        for k in 1..=3 {
            for n in [3u64, 5, 7] {
                let images: Vec<u64> = [1, n - 1, 2][..k].to_vec();
                let res = ConeResidues::from_images(n, images).unwrap();
                for i in 0..=k {
                    for y in 0..n {
                        assert!(residue_binomial_check(i, &res, y), "k={k} n={n} i={i} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn kubota_leopoldt_reduction() {
        for (p, n) in [(3u64, 5u64), (5, 4), (2, 3)] {
            let (cone, rho) = rational_setup(n);
            let x = FieldElement::from_ints(&[0]);
            let spec = MeasureSpec::new(cone, rho, x, p, MeasureKind::Zeta);
            let Ok(spec) = spec else { continue };
            for lvl in 0..3 {
                for a in 0..p.pow(lvl) {
                    let q = PeriodQuery::new(vec![a], lvl);
                    assert_eq!(spec.period_zeta(&q).unwrap(), bernoulli_period(a, p, lvl, n));
                }
            }
        }
    }

    #[test]
    fn zeta_oracle_and_additivity() {
        let (cone, rho) = sqrt5_setup(5, 4);
        let f = cone.field().clone();
        let spec = MeasureSpec::new(cone, rho, f.one(), 3, MeasureKind::Zeta).unwrap();
        let root = PeriodQuery::new(vec![0, 0], 0);
        let total = spec.period_zeta(&root).unwrap();
        assert_eq!(total, int(0));
        assert_eq!(spec.oracle_period(&root).unwrap(), CycloValue::from_rational(total.clone(), 1));
        let sum: Rational = root.children(3).iter().map(|c| spec.period_zeta(c).unwrap()).sum();
        assert_eq!(sum, total);
        for c in root.children(3) {
            let closed = spec.period_zeta(&c).unwrap();
            assert_eq!(spec.oracle_period(&c).unwrap(), CycloValue::from_rational(closed, 1));
        }
        assert!(spec.telescoping_check(81).unwrap());
    }

    #[test]
    fn rational_zeta_oracle() {
        let (cone, rho) = rational_setup(3);
        let spec = MeasureSpec::new(cone, rho, FieldElement::from_ints(&[0]), 2, MeasureKind::Zeta);
        // p = 2 is rejected by the p-adic layer
        assert_eq!(spec.unwrap_err(), Error::EvenPrimeUnsupported);
        let (cone, rho) = rational_setup(3);
        let spec = MeasureSpec::new(cone, rho, FieldElement::from_ints(&[0]), 5, MeasureKind::Zeta).unwrap();
        for a in 0..5 {
            let q = PeriodQuery::new(vec![a], 1);
            let o = spec.oracle_period(&q).unwrap();
            assert_eq!(o, CycloValue::from_rational(bernoulli_period(a, 5, 1, 3), 1));
        }
    }

    #[test]
    fn dirichlet_periods() {
        let (cone, rho) = sqrt5_setup(5, 4);
        let f = cone.field().clone();
        let chi = enumerate_characters(&rho, &[4]).remove(1);
        let spec = MeasureSpec::new(cone, rho, f.one(), 3, MeasureKind::Dirichlet(chi)).unwrap();
        for lvl in 0..2 {
            let pn = 3u64.pow(lvl);
            for l0 in 0..pn {
                for l1 in 0..pn {
                    let q = PeriodQuery::new(vec![l0, l1], lvl);
                    let closed = spec.period_chi(&q).unwrap();
                    assert_eq!(spec.oracle_period(&q).unwrap(), closed);
                    let a = spec.cone().translate(spec.x(), &[l0 as i64, l1 as i64]);
                    let strata = (0..4).fold(CycloValue::zero(1), |acc, s| &acc + &spec.omega_s(&a, lvl, s).unwrap());
                    assert_eq!(strata, closed);
                    let kids: CycloValue = q
                        .children(3)
                        .iter()
                        .fold(CycloValue::zero(1), |acc, c| &acc + &spec.period_chi(c).unwrap());
                    assert_eq!(kids, closed);
                }
            }
        }
    }

    #[test]
    fn dirichlet_q_form() {
        // N = 5, p = 11 ≡ 1 mod 5
        let (cone, rho) = sqrt5_setup(5, 4);
        let f = cone.field().clone();
        let chi = enumerate_characters(&rho, &[4]).remove(1);
        let spec = MeasureSpec::new(cone, rho, f.one(), 11, MeasureKind::Dirichlet(chi)).unwrap();
        for l0 in 0..11 {
            for l1 in [0u64, 3, 10] {
                let q = PeriodQuery::new(vec![l0, l1], 1);
                assert_eq!(spec.period_chi_q(&q).unwrap(), spec.period_chi(&q).unwrap());
            }
        }
        let (cone, rho) = sqrt5_setup(5, 4);
        let chi = enumerate_characters(&rho, &[4]).remove(1);
        let spec3 = MeasureSpec::new(cone, rho, f.one(), 3, MeasureKind::Dirichlet(chi)).unwrap();
        assert_eq!(
            spec3.period_chi_q(&PeriodQuery::new(vec![0, 0], 1)),
            Err(Error::LevelNotOneModN)
        );
    }

    #[test]
    fn rational_dirichlet_example() {
        let (cone, rho) = rational_setup(5);
        let chars = enumerate_characters(&rho, &[1]);
        let quad = chars.iter().find(|c| c.order() == 2).unwrap().clone();
        let spec = MeasureSpec::new(cone, rho, FieldElement::from_ints(&[0]), 3, MeasureKind::Dirichlet(quad)).unwrap();
        assert!(spec.period_chi(&PeriodQuery::new(vec![0], 1)).unwrap().is_zero());
    }

    #[test]
    fn xi_components() {
        let (cone, rho) = sqrt5_setup(5, 4);
        let f = cone.field().clone();
        let spec = MeasureSpec::new(cone, rho, f.one(), 3, MeasureKind::Zeta).unwrap();
        let mut checked = 0;
        for j in 1..5 {
            for l0 in 0..3 {
                let q = PeriodQuery::new(vec![l0, 2], 1);
                if let Some((o, c)) = spec.xi_component(&q, j).unwrap() {
                    assert_eq!(o, c);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn trivial_character_rejected() {
        let (cone, rho) = sqrt5_setup(5, 4);
        let f = cone.field().clone();
        let triv = enumerate_characters(&rho, &[4]).remove(0);
        assert_eq!(
            MeasureSpec::new(cone, rho, f.one(), 3, MeasureKind::Dirichlet(triv)).unwrap_err(),
            Error::CharacterHasTrivialNarrowModulus
        );
    }
}
