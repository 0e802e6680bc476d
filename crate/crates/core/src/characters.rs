//! Finite characters: residue characters on `(Z/N)^×` read through a
//! Cassou-Noguès map, Hecke characters of `Cl₊(N)` for `h = 1`, auxiliary
//! characters ψ of `p`-power level, and `ω_F`.

use std::collections::HashMap;
use std::hash::Hash;

use num_integer::Integer;

use crate::arith::modint::euler_phi;
use crate::arith::{CycloValue, ModRing, Rational};
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldData, FieldElement};
use crate::padic::{self, pow_checked, Padic};

/// Characters of `G / H` for a finite abelian group `G` given by its
/// elements, with `H` generated by `sub_gens`. Values are exponents of
/// `ζ_M` where `M` is any multiple of the group exponent.
fn quotient_characters<T, F>(elements: &[T], identity: T, mul: F, sub_gens: &[T], m: u64) -> Vec<HashMap<T, u64>>
where
    T: Clone + Eq + Hash + Ord,
    F: Fn(&T, &T) -> T,
{
    // subgroup H, every element gets exponent 0
    let mut base: Vec<T> = vec![identity.clone()];
    let mut in_base: HashMap<T, usize> = HashMap::from([(identity.clone(), 0)]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in sub_gens {
            let y = mul(&x, g);
            if !in_base.contains_key(&y) {
                in_base.insert(y.clone(), base.len());
                base.push(y.clone());
                frontier.push(y);
            }
        }
    }
    // chain H = G_0 ⊂ G_1 ⊂ … with generators chosen smallest-first
    let mut sorted = elements.to_vec();
    sorted.sort();
    let mut current: Vec<T> = base;
    let mut chain: Vec<(T, u64, Vec<T>)> = Vec::new();
    loop {
        let members: std::collections::HashSet<&T> = current.iter().collect();
        let Some(g) = sorted.iter().find(|e| !members.contains(e)).cloned() else { break };
        // relative order of g
        let mut e = 1u64;
        let mut gp = g.clone();
        while !members.contains(&gp) {
            gp = mul(&gp, &g);
            e += 1;
        }
        let prev = current.clone();
        let mut next = Vec::with_capacity(prev.len() * e as usize);
        let mut gj = None::<T>;
        for _ in 0..e {
            for h in &prev {
                next.push(match &gj {
                    None => h.clone(),
                    Some(x) => mul(h, x),
                });
            }
            gj = Some(match gj {
                None => g.clone(),
                Some(x) => mul(&x, &g),
            });
        }
        chain.push((g, e, prev));
        current = next;
    }
    // extend characters one generator at a time
    let mut chars: Vec<HashMap<T, u64>> = vec![in_base.keys().map(|k| (k.clone(), 0)).collect()];
    for (g, e, prev) in &chain {
        let mut extended = Vec::new();
        for chi in &chars {
            // g^e lies in prev
            let mut ge = g.clone();
            for _ in 1..*e {
                ge = mul(&ge, g);
            }
            let target = chi[&ge];
            for a in 0..m {
                if (a * e) % m != target {
                    continue;
                }
                let mut t = chi.clone();
                let mut gj = g.clone();
                for j in 1..*e {
                    for h in prev {
                        t.insert(mul(h, &gj), (chi[h] + j * a) % m);
                    }
                    gj = mul(&gj, g);
                }
                extended.push(t);
            }
        }
        chars = extended;
    }
    chars
}

/// A character of `(Z/N)^×`, extended by zero to non-units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueCharacter {
    modulus: u64,
    order: u32,
    /// `χ(r) = ζ_order^{table[r]}`; `None` for `gcd(r, N) > 1`.
    table: Vec<Option<u32>>,
}

impl ResidueCharacter {
    /// From a full exponent table; the order is reduced to the minimal one.
    pub fn from_exponents(modulus: u64, m: u64, exps: &HashMap<u64, u64>) -> Result<Self> {
        let g = exps.values().fold(m, |acc, &a| acc.gcd(&a));
        let order = m / g.max(1);
        let table: Vec<Option<u32>> = (0..modulus)
            .map(|r| exps.get(&r).map(|&a| ((a / g.max(1)) % order) as u32))
            .collect();
        let chi = ResidueCharacter { modulus, order: order as u32, table };
        chi.check_multiplicative()?;
        Ok(chi)
    }

    fn check_multiplicative(&self) -> Result<()> {
        let n = self.modulus;
        for a in 1..n {
            for b in a..n {
                let ab = (a * b) % n;
                let lhs = match (self.table[a as usize], self.table[b as usize]) {
                    (Some(x), Some(y)) => Some((x + y) % self.order),
                    _ => None,
                };
                if lhs != self.table[ab as usize] {
                    return Err(Error::InvalidCharacter(format!("not multiplicative at ({a}, {b})")));
                }
            }
        }
        if self.table[1 % n as usize].unwrap_or(1) != 0 && n > 1 {
            return Err(Error::InvalidCharacter("χ(1) ≠ 1".into()));
        }
        Ok(())
    }

    /// The characters of `(Z/N)^×` trivial on the subgroup generated by `kernel_gens`.
    pub fn enumerate(modulus: u64, kernel_gens: &[u64]) -> Vec<ResidueCharacter> {
        let units: Vec<u64> = (1..modulus).filter(|r| r.gcd(&modulus) == 1).collect();
        let m = euler_phi(modulus).max(1);
        let gens: Vec<u64> = kernel_gens.iter().map(|g| g % modulus).collect();
        let mut out: Vec<ResidueCharacter> = quotient_characters(&units, 1 % modulus, |a, b| (a * b) % modulus, &gens, m)
            .iter()
            .map(|t| ResidueCharacter::from_exponents(modulus, m, t).expect("constructed characters are multiplicative"))
            .collect();
        out.sort_by(|a, b| (a.order, &a.table).cmp(&(b.order, &b.table)));
        out
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Exponent `e` with `χ(r) = ζ^e`, or `None` when `r` is not a unit.
    #[inline]
    pub fn exponent(&self, r: u64) -> Option<u32> {
        self.table[(r % self.modulus) as usize]
    }

    pub fn value(&self, r: u64) -> CycloValue {
        match self.exponent(r) {
            Some(e) => CycloValue::root_of_unity(self.order, e as i64),
            None => CycloValue::zero(self.order),
        }
    }

    /// `χ(-1) = 1`.
    pub fn is_even(&self) -> bool {
        self.exponent(self.modulus - 1) == Some(0)
    }

    /// Values `(χ(0), …, χ(N-1))` as exponents for reports.
    pub fn exponents(&self) -> &[Option<u32>] {
        &self.table
    }
}

/// A Hecke character of `Cl₊(N)` for a field with narrow class number one,
/// seen through a Cassou-Noguès map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeCharacter {
    residue: ResidueCharacter,
    rho: CNResidueMap,
    ideal_values: Vec<CycloValue>,
    nontrivial_narrow_modulus: bool,
}

impl HeckeCharacter {
    pub fn new(residue: ResidueCharacter, rho: CNResidueMap, unit_images: &[u64]) -> Result<Self> {
        if residue.modulus() != rho.modulus() {
            return Err(Error::InvalidCharacter("modulus mismatch".into()));
        }
        for &u in unit_images {
            if residue.exponent(u) != Some(0) {
                return Err(Error::InvalidCharacter(format!("not trivial on unit image {u}")));
            }
        }
        let nontrivial = !residue.is_trivial();
        Ok(HeckeCharacter {
            residue,
            rho,
            ideal_values: vec![CycloValue::one(1)],
            nontrivial_narrow_modulus: nontrivial,
        })
    }

    pub fn residue_character(&self) -> &ResidueCharacter {
        &self.residue
    }

    pub fn rho(&self) -> &CNResidueMap {
        &self.rho
    }

    pub fn modulus(&self) -> u64 {
        self.residue.modulus()
    }

    pub fn order(&self) -> u32 {
        self.residue.order()
    }

    pub fn nontrivial_narrow_modulus(&self) -> bool {
        self.nontrivial_narrow_modulus
    }

    pub fn require_nontrivial(&self) -> Result<()> {
        if self.nontrivial_narrow_modulus {
            Ok(())
        } else {
            Err(Error::CharacterHasTrivialNarrowModulus)
        }
    }

    /// `χ(y)` for `y` coprime to N.
    pub fn evaluate(&self, y: &FieldElement) -> Result<CycloValue> {
        let r = self.rho.residue(y)?;
        self.evaluate_residue(r)
    }

    /// Exponent of `χ(y)`, zero-extended: `None` when `ρ(y)` is not a unit.
    pub fn exponent(&self, y: &FieldElement) -> Result<Option<u32>> {
        Ok(self.residue.exponent(self.rho.residue(y)?))
    }

    pub fn evaluate_residue(&self, r: u64) -> Result<CycloValue> {
        if self.residue.exponent(r).is_none() {
            return Err(Error::NotCoprimeToModulus(self.modulus()));
        }
        Ok(self.residue.value(r))
    }

    /// `χ(a_i)` on the chosen ideal class representatives.
    pub fn evaluate_ideal(&self, i: usize) -> Result<CycloValue> {
        self.ideal_values
            .get(i)
            .cloned()
            .ok_or(Error::CharacterIndex { index: i, count: self.ideal_values.len() })
    }

    /// Value on the rational integer `n`, e.g. `χ(p)`.
    pub fn evaluate_int(&self, n: i64) -> Result<CycloValue> {
        self.evaluate_residue(n.rem_euclid(self.modulus() as i64) as u64)
    }
}

/// All Hecke characters of `Cl₊(N)` for `h = 1`: characters of
/// `(Z/N)^× / ⟨ρ(E)⟩`, trivial character first.
pub fn enumerate_characters(rho: &CNResidueMap, unit_images: &[u64]) -> Vec<HeckeCharacter> {
    ResidueCharacter::enumerate(rho.modulus(), unit_images)
        .into_iter()
        .map(|r| HeckeCharacter::new(r, rho.clone(), unit_images).expect("enumerated characters kill the units"))
        .collect()
}

/// Image of the unit generators under a residue map.
pub fn unit_images(rho: &CNResidueMap, units: &[FieldElement]) -> Result<Vec<u64>> {
    units.iter().map(|u| rho.residue(u)).collect()
}

/// A fixed embedding of roots of unity of order dividing `p - 1` into `Z_p`:
/// `ζ_m ↦ ω(g)^{(p-1)/m}` for the least primitive root `g` mod p.
#[derive(Clone, Debug)]
pub struct PadicEmbedding {
    p: u64,
    digits: u32,
    generator: u64,
}

impl PadicEmbedding {
    pub fn new(p: u64, digits: u32) -> Result<Self> {
        padic::check_prime(p)?;
        let generator = (2..p.max(3))
            .find(|&g| crate::arith::modint::mult_order(g, p) == p - 1)
            .unwrap_or(1);
        Ok(PadicEmbedding { p, digits, generator })
    }

    /// Uses `g` (a primitive root mod p) instead of the least one.
    pub fn with_generator(mut self, g: u64) -> Result<Self> {
        if crate::arith::modint::mult_order(g % self.p, self.p) != self.p - 1 {
            return Err(Error::InvalidCharacter(format!("{g} is not a primitive root mod {}", self.p)));
        }
        self.generator = g % self.p;
        Ok(self)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Image of `ζ_m^e`.
    pub fn root(&self, m: u32, e: u32) -> Result<Padic> {
        let m64 = m as u64;
        if m64 == 0 || !(self.p - 1).is_multiple_of(m64) {
            return Err(Error::EmbeddingUnavailable { order: m, p: self.p });
        }
        let ring = ModRing::new(pow_checked(self.p, self.digits)?);
        let w = padic::teichmuller_residue(self.p, self.generator, self.digits)?;
        let z = ring.pow(w, (self.p - 1) / m64 * (e as u64 % m64));
        Padic::new(self.p, 0, z, self.digits)
    }

    /// Image of a cyclotomic value; rational values need no root of unity.
    pub fn embed(&self, v: &CycloValue) -> Result<Padic> {
        if let Some(r) = v.as_rational() {
            return Padic::from_rational(self.p, &r, self.digits);
        }
        let m = v.order();
        let zeta = self.root(m, 1)?;
        let mut acc = Padic::zero(self.p, self.digits as i64);
        let mut zj = Padic::one(self.p, self.digits)?;
        for c in v.coeffs() {
            acc = acc.add(&Padic::from_rational(self.p, c, self.digits)?.mul(&zj));
            zj = zj.mul(&zeta);
        }
        Ok(acc)
    }
}

/// `ω_F(y) = ω(Nm y)`.
pub fn omega_f(field: &FieldData, y: &FieldElement, p: u64, digits: u32) -> Result<Padic> {
    let nm = field.norm(y);
    let x = Padic::from_rational(p, &nm, digits)?;
    if x.valuation() != Some(0) {
        return Err(Error::NotCoprimeToP(p));
    }
    padic::teichmuller(&x)
}

/// An auxiliary finite character ψ of `Cl₊(p^t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiCharacter {
    Trivial,
    /// `ψ(y) = φ(Nm y mod p^t)` for a character φ of `(Z/p^t)^×`; trivial on
    /// totally positive units since their norm is 1.
    NormComposite { level_exp: u32, inner: ResidueCharacter },
    /// A table on `(O/p^t)^×` in integral-basis coordinates, trivial on the
    /// supplied unit generators.
    Table {
        level_exp: u32,
        order: u32,
        table: HashMap<Vec<u64>, u32>,
    },
}

impl PsiCharacter {
    pub fn level_exp(&self) -> u32 {
        match self {
            PsiCharacter::Trivial => 0,
            PsiCharacter::NormComposite { level_exp, .. } | PsiCharacter::Table { level_exp, .. } => *level_exp,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            PsiCharacter::Trivial => true,
            PsiCharacter::NormComposite { inner, .. } => inner.is_trivial(),
            PsiCharacter::Table { order, .. } => *order == 1,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            PsiCharacter::Trivial => 1,
            PsiCharacter::NormComposite { inner, .. } => inner.order(),
            PsiCharacter::Table { order, .. } => *order,
        }
    }

    /// Exponent `e` with `ψ(y) = ζ_order^e`; `None` if `y` is not a unit at p.
    pub fn exponent(&self, field: &FieldData, p: u64, y: &FieldElement) -> Result<Option<u32>> {
        match self {
            PsiCharacter::Trivial => Ok(Some(0)),
            PsiCharacter::NormComposite { level_exp, inner } => {
                let q = pow_checked(p, *level_exp)?;
                let ring = ModRing::new(q);
                let nm = ring.from_rational(&field.norm(y)).ok_or(Error::NotCoprimeToP(p))?;
                Ok(inner.exponent(nm))
            }
            PsiCharacter::Table { level_exp, table, .. } => {
                let key = integral_residue(field, y, pow_checked(p, *level_exp)?)?;
                Ok(table.get(&key).copied())
            }
        }
    }

    pub fn value(&self, field: &FieldData, p: u64, y: &FieldElement) -> Result<CycloValue> {
        Ok(match self.exponent(field, p, y)? {
            Some(e) => CycloValue::root_of_unity(self.order(), e as i64),
            None => CycloValue::zero(self.order()),
        })
    }

    /// Norm-composite characters of level `p^t`.
    pub fn enumerate_norm(p: u64, t: u32) -> Result<Vec<PsiCharacter>> {
        let q = pow_checked(p, t)?;
        Ok(ResidueCharacter::enumerate(q, &[])
            .into_iter()
            .map(|inner| PsiCharacter::NormComposite { level_exp: t, inner })
            .collect())
    }

    /// Characters of `(O/p^t)^×` trivial on the images of `units`.
    pub fn enumerate_table(field: &FieldData, p: u64, t: u32, units: &[FieldElement]) -> Result<Vec<PsiCharacter>> {
        let q = pow_checked(p, t)?;
        let k = field.degree();
        let size = (q as usize).checked_pow(k as u32).filter(|&s| s <= 1 << 16).ok_or_else(|| {
            Error::InstanceTooLarge(format!("(O/{p}^{t}) has more than 2^16 elements"))
        })?;
        let basis = field.integral_basis().to_vec();
        let ring = ModRing::new(q);
        let to_elem = |c: &[u64]| -> FieldElement {
            basis.iter().zip(c).fold(FieldElement::zero(k), |acc, (b, &x)| {
                acc.add(&b.scale(&Rational::from_integer(x.into())))
            })
        };
        let mut units_mod: Vec<Vec<u64>> = Vec::new();
        for idx in 0..size {
            let mut rem = idx as u64;
            let c: Vec<u64> = (0..k)
                .map(|_| {
                    let d = rem % q;
                    rem /= q;
                    d
                })
                .collect();
            let nm = field.norm(&to_elem(&c));
            if ring.from_rational(&nm).is_some_and(|r| r % p != 0) {
                units_mod.push(c);
            }
        }
        let mul = |a: &Vec<u64>, b: &Vec<u64>| -> Vec<u64> {
            integral_residue(field, &field.mul(&to_elem(a), &to_elem(b)), q).expect("integral basis is closed")
        };
        let gens: Vec<Vec<u64>> = units.iter().map(|u| integral_residue(field, u, q)).collect::<Result<_>>()?;
        let m = units_mod.len() as u64;
        let identity = integral_residue(field, &field.one(), q)?;
        let tables = quotient_characters(&units_mod, identity, mul, &gens, m);
        let mut out: Vec<PsiCharacter> = tables
            .into_iter()
            .map(|tab| {
                let g = tab.values().fold(m, |acc, &a| acc.gcd(&a)).max(1);
                let order = (m / g) as u32;
                let table = tab.into_iter().map(|(key, a)| (key, ((a / g) % order as u64) as u32)).collect();
                PsiCharacter::Table { level_exp: t, order, table }
            })
            .collect();
        out.sort_by_key(|c| c.order());
        Ok(out)
    }
}

/// Integral-basis coordinates of `y` reduced modulo `q`.
pub(crate) fn integral_residue(field: &FieldData, y: &FieldElement, q: u64) -> Result<Vec<u64>> {
    let basis = crate::field::coordinate_matrix(field.integral_basis());
    let inv = crate::arith::linalg::inverse(&basis).ok_or_else(|| Error::InvalidField("singular integral basis".into()))?;
    let c = crate::arith::linalg::mat_vec(&inv, y.coords());
    let ring = ModRing::new(q);
    c.iter()
        .map(|x| ring.from_rational(x).ok_or(Error::NotCoprimeToP(q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn q_sqrt5() -> FieldData {
        let e = FieldElement::from_ints;
        let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[-1, 3])]];
        FieldData::new(vec!["1".into(), "eps".into()], table).unwrap()
    }

    #[test]
    fn rational_mod5() {
        let chars = ResidueCharacter::enumerate(5, &[]);
        let orders: Vec<u32> = chars.iter().map(|c| c.order()).collect();
        assert_eq!(orders, vec![1, 2, 4, 4]);
        let i = CycloValue::root_of_unity(4, 1);
        assert!(chars.iter().any(|c| c.value(2) == i));
        for c in &chars[1..] {
            let s = (1..5).fold(CycloValue::zero(c.order()), |acc, r| &acc + &c.value(r));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn quadratic_field_characters() {
        let f = q_sqrt5();
        let rho5 = CNResidueMap::new(&f, 5, vec![1, 4]).unwrap();
        let chars = enumerate_characters(&rho5, &[4]);
        assert_eq!(chars.len(), 2);
        let chi = &chars[1];
        assert!(chi.nontrivial_narrow_modulus());
        assert!(!chars[0].nontrivial_narrow_modulus());
        assert_eq!(chi.evaluate_int(3).unwrap(), CycloValue::from_int(-1));
        assert_eq!(chi.evaluate_int(4).unwrap(), CycloValue::from_int(1));
        assert_eq!(chi.evaluate_int(5), Err(Error::NotCoprimeToModulus(5)));

        let rho11 = CNResidueMap::new(&f, 11, vec![1, 9]).unwrap();
        let chars = enumerate_characters(&rho11, &[9]);
        assert_eq!(chars.len(), 2);
        for r in 1..11u64 {
            let qr = [1, 3, 4, 5, 9].contains(&r);
            let expect = CycloValue::from_int(if qr { 1 } else { -1 });
            assert_eq!(chars[1].evaluate_int(r as i64).unwrap(), expect);
        }
    }

    #[test]
    fn omega_examples() {
        let q = FieldData::new(vec!["1".into()], vec![vec![FieldElement::from_ints(&[1])]]).unwrap();
        let w = omega_f(&q, &FieldElement::from_ints(&[2]), 5, 2).unwrap();
        assert_eq!(w, Padic::from_int(5, 7, 2).unwrap());
        let f = q_sqrt5();
        let one = omega_f(&f, &f.one(), 3, 5).unwrap();
        assert_eq!(one, Padic::one(3, 5).unwrap());
        assert_eq!(omega_f(&f, &FieldElement::from_ints(&[3, 0]), 3, 5), Err(Error::NotCoprimeToP(3)));
    }

    #[test]
    fn embedding() {
        let emb = PadicEmbedding::new(5, 4).unwrap();
        let i = emb.root(4, 1).unwrap();
        assert_eq!(i.mul(&i), Padic::from_int(5, -1, 4).unwrap());
        assert_eq!(emb.root(3, 1).unwrap_err(), Error::EmbeddingUnavailable { order: 3, p: 5 });
        let v = CycloValue::from_rational(rat(3, 5), 4);
        assert_eq!(
            emb.embed(&v).unwrap(),
            Padic::from_rational(5, &rat(3, 5), 4).unwrap()
        );
    }

    #[test]
    fn psi_tables() {
        let f = q_sqrt5();
        let eps = f.basis(1);
        let psis = PsiCharacter::enumerate_table(&f, 3, 1, std::slice::from_ref(&eps)).unwrap();
        // (O/3)^× = F_9^× of order 8; ε has order 4 there
        assert_eq!(psis.len(), 2);
        for psi in &psis {
            assert_eq!(psi.exponent(&f, 3, &eps).unwrap(), Some(0));
        }
        let norms = PsiCharacter::enumerate_norm(3, 2).unwrap();
        assert_eq!(norms.len(), 6);
        assert_eq!(norms[3].exponent(&f, 3, &eps).unwrap(), Some(0));
    }
}
