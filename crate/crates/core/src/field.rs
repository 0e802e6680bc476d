//! Totally real fields given by a multiplication table on a fixed Q-basis.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::linalg::{self, Matrix};
use crate::arith::modint::{factorize, is_prime, val_rational};
use crate::arith::{ModRing, Rational};
use crate::error::{Error, Result};

/// Rational coordinates with respect to the field basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coords: Vec<Rational>,
}

impl FieldElement {
    pub fn new(coords: Vec<Rational>) -> Self {
        FieldElement { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero(k: usize) -> Self {
        Self::new(vec![Rational::zero(); k])
    }

    pub fn unit_vector(k: usize, i: usize) -> Self {
        let mut v = Self::zero(k);
        v.coords[i] = Rational::one();
        v
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(self.coords.iter().map(|a| a * r).collect())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// How the real places σ_1..σ_k are realised.
#[derive(Clone, Debug)]
pub enum Places {
    /// `F = Q`.
    Rational,
    /// `F = Q(√D)`: `sqrt_d` is the element sent to `+√D` by σ_1.
    Quadratic { d: i64, sqrt_d: FieldElement },
    /// Degree ≥ 3: σ_i(generator) is the root isolated by `roots[i]`.
    Isolated {
        generator: FieldElement,
        charpoly: Vec<Rational>,
        roots: Vec<(Rational, Rational)>,
        /// Maps field coordinates to coordinates in the power basis of the generator.
        to_power_basis: Matrix,
    },
}

#[derive(Clone, Debug)]
pub struct FieldData {
    labels: Vec<String>,
    table: Vec<Vec<FieldElement>>,
    one: FieldElement,
    integral_basis: Vec<FieldElement>,
    places: Places,
}

fn squarefree_part(n: u64) -> (u64, u64) {
    // n = core * f^2
    let mut core = 1;
    let mut f = 1;
    for (q, e) in factorize(n) {
        if e % 2 == 1 {
            core *= q;
        }
        f *= q.pow(e / 2);
    }
    (core, f)
}

const REFINE_LIMIT: usize = 400;

impl FieldData {
    /// Validates the table and derives default places: for `k = 2` the
    /// square root of `D` is normalised to be positive at σ_1 with respect to
    /// the first non-rational basis element; for `k ≥ 3` the places are the
    /// roots of the default generator in increasing order.
    pub fn new(labels: Vec<String>, table: Vec<Vec<FieldElement>>) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        if table.len() != k || table.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidField(format!("multiplication table must be {k}x{k}")));
        }
        if table.iter().flatten().any(|e| e.degree() != k) {
            return Err(Error::InvalidField("table entries must have k coordinates".into()));
        }
        for i in 0..k {
            for j in 0..k {
                if table[i][j] != table[j][i] {
                    return Err(Error::InvalidField(format!(
                        "table is not commutative at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let mut field = FieldData {
            labels,
            table,
            one: FieldElement::zero(k),
            integral_basis: Vec::new(),
            places: Places::Rational,
        };
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let left = field.mul(&field.table[i][j], &FieldElement::unit_vector(k, l));
                    let right = field.mul(&FieldElement::unit_vector(k, i), &field.table[j][l]);
                    if left != right {
                        return Err(Error::InvalidField(format!(
                            "table is not associative on ({}, {}, {})",
                            field.labels[i], field.labels[j], field.labels[l]
                        )));
                    }
                }
            }
        }
        field.one = field.solve_unit()?;
        let gram: Matrix = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| field.trace(&field.table[i][j]))
                    .collect()
            })
            .collect();
        if linalg::det(&gram).is_zero() {
            return Err(Error::InvalidField("trace form is degenerate".into()));
        }
        field.integral_basis = (0..k).map(|i| FieldElement::unit_vector(k, i)).collect();
        field.places = field.default_places()?;
        Ok(field)
    }

    fn solve_unit(&self) -> Result<FieldElement> {
        // e with e·v_j = v_j for all j: k^2 equations in k unknowns
        let k = self.degree();
        let mut rows: Matrix = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..k {
            for r in 0..k {
                rows.push((0..k).map(|i| self.table[i][j].coords[r].clone()).collect());
                rhs.push(if r == j { Rational::one() } else { Rational::zero() });
            }
        }
        // pick k independent rows
        let mut chosen: Vec<usize> = Vec::new();
        for idx in 0..rows.len() {
            let mut cand: Matrix = chosen.iter().map(|&c| rows[c].clone()).collect();
            cand.push(rows[idx].clone());
            if rank(&cand) == cand.len() {
                chosen.push(idx);
            }
            if chosen.len() == k {
                break;
            }
        }
        if chosen.len() < k {
            return Err(Error::InvalidField("no multiplicative identity".into()));
        }
        let a: Matrix = chosen.iter().map(|&c| rows[c].clone()).collect();
        let b: Vec<Rational> = chosen.iter().map(|&c| rhs[c].clone()).collect();
        let e = FieldElement::new(linalg::solve(&a, &b).expect("independent rows"));
        for j in 0..k {
            if self.mul(&e, &FieldElement::unit_vector(k, j)) != FieldElement::unit_vector(k, j) {
                return Err(Error::InvalidField("no multiplicative identity".into()));
            }
        }
        Ok(e)
    }

    fn default_places(&self) -> Result<Places> {
        let k = self.degree();
        match k {
            1 => Ok(Places::Rational),
            2 => {
                let w = (0..2)
                    .map(|i| FieldElement::unit_vector(2, i))
                    .find(|w| self.rational_value(w).is_none())
                    .expect("a degree-2 basis has a non-rational element");
                let t = self.trace(&w);
                let n = self.norm(&w);
                let disc = &t * &t - Rational::from_integer(4.into()) * n;
                if !disc.is_positive() {
                    return Err(Error::InvalidField("quadratic field is not real".into()));
                }
                let num = (disc.numer() * disc.denom())
                    .to_u64()
                    .ok_or_else(|| Error::InvalidField("discriminant too large".into()))?;
                let (d, f) = squarefree_part(num);
                // sqrt(disc) = f sqrt(d) / denom
                let scale = Rational::new(BigInt::from(f), disc.denom().clone());
                let two_w_minus_t = w
                    .scale(&Rational::from_integer(2.into()))
                    .sub(&self.one.scale(&t));
                let sqrt_d = two_w_minus_t.scale(&(Rational::one() / scale));
                Ok(Places::Quadratic { d: d as i64, sqrt_d })
            }
            _ => {
                let candidates = (0..k)
                    .map(|i| FieldElement::unit_vector(k, i))
                    .chain((1..20).map(|m| {
                        FieldElement::new(
                            (0..k)
                                .map(|i| Rational::from_integer(BigInt::from(m).pow(i as u32)))
                                .collect(),
                        )
                    }));
                for g in candidates {
                    let cp = self.char_poly(&g);
                    if linalg::is_squarefree(&cp) {
                        return self.isolated_places(g, None);
                    }
                }
                Err(Error::InvalidField("no primitive element found".into()))
            }
        }
    }

    fn isolated_places(&self, generator: FieldElement, order: Option<&[usize]>) -> Result<Places> {
        let k = self.degree();
        let charpoly = self.char_poly(&generator);
        if !linalg::is_squarefree(&charpoly) {
            return Err(Error::InvalidField("generator is not primitive".into()));
        }
        let mut roots = linalg::isolate_real_roots(&charpoly);
        if roots.len() != k {
            return Err(Error::InvalidField(format!(
                "field is not totally real ({} real places of {k})",
                roots.len()
            )));
        }
        if let Some(order) = order {
            let mut seen = vec![false; k];
            if order.len() != k || order.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidField("place numbering must be a permutation".into()));
            }
            roots = order.iter().map(|&i| roots[i].clone()).collect();
        }
        let mut powers: Vec<FieldElement> = vec![self.one.clone()];
        for _ in 1..k {
            let last = powers.last().unwrap().clone();
            powers.push(self.mul(&last, &generator));
        }
        let pb: Matrix = (0..k)
            .map(|r| (0..k).map(|c| powers[c].coords[r].clone()).collect())
            .collect();
        let to_power_basis = linalg::inverse(&pb).expect("primitive element");
        Ok(Places::Isolated { generator, charpoly, roots, to_power_basis })
    }

    /// Replaces the default square root for `k = 2`; σ_1 sends `sqrt_d` to `+√D`.
    pub fn with_sqrt(mut self, sqrt_d: FieldElement) -> Result<Self> {
        let Places::Quadratic { d, .. } = self.places else {
            return Err(Error::InvalidField("square root data only applies to k = 2".into()));
        };
        if self.mul(&sqrt_d, &sqrt_d) != self.one.scale(&Rational::from_integer(d.into())) {
            return Err(Error::InvalidField(format!("given element does not square to {d}")));
        }
        self.places = Places::Quadratic { d, sqrt_d };
        Ok(self)
    }

    /// Fixes the numbering of real places for `k ≥ 3`: σ_i(generator) is the
    /// `order[i]`-th smallest real root of its characteristic polynomial.
    pub fn with_place_order(mut self, generator: FieldElement, order: &[usize]) -> Result<Self> {
        if self.degree() < 3 {
            return Err(Error::InvalidField("generator data only applies to k >= 3".into()));
        }
        self.places = self.isolated_places(generator, Some(order))?;
        Ok(self)
    }

    /// Declares a Z-basis of the ring of integers (default: the field basis).
    pub fn with_integral_basis(mut self, basis: Vec<FieldElement>) -> Result<Self> {
        let k = self.degree();
        if basis.len() != k {
            return Err(Error::InvalidField("integral basis must have k elements".into()));
        }
        let m = coordinate_matrix(&basis);
        if linalg::det(&m).is_zero() {
            return Err(Error::InvalidField("integral basis is degenerate".into()));
        }
        // every product of integral basis elements must be integral
        let inv = linalg::inverse(&m).unwrap();
        for a in &basis {
            if !self.char_poly(a).iter().all(|c| c.is_integer()) {
                return Err(Error::InvalidField(format!("{a} is not an algebraic integer")));
            }
            for b in &basis {
                let c = linalg::mat_vec(&inv, self.mul(a, b).coords());
                if !c.iter().all(|x| x.is_integer()) {
                    return Err(Error::InvalidField("integral basis is not closed under products".into()));
                }
            }
        }
        self.integral_basis = basis;
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<FieldElement>] {
        &self.table
    }

    pub fn places(&self) -> &Places {
        &self.places
    }

    pub fn one(&self) -> FieldElement {
        self.one.clone()
    }

    pub fn integral_basis(&self) -> &[FieldElement] {
        &self.integral_basis
    }

    pub fn from_rational(&self, r: &Rational) -> FieldElement {
        self.one.scale(r)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(&Rational::from_integer(n.into()))
    }

    pub fn basis(&self, i: usize) -> FieldElement {
        FieldElement::unit_vector(self.degree(), i)
    }

    /// Square-free `D` with `F = Q(√D)`, for `k = 2`.
    pub fn discriminant_core(&self) -> Option<i64> {
        match self.places {
            Places::Quadratic { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let k = self.degree();
        let mut out = vec![Rational::zero(); k];
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                for (slot, t) in out.iter_mut().zip(&self.table[i][j].coords) {
                    if !t.is_zero() {
                        *slot += &c * t;
                    }
                }
            }
        }
        FieldElement::new(out)
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> FieldElement {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Matrix of multiplication by `a`; column j holds `a·v_j`.
    pub fn mult_matrix(&self, a: &FieldElement) -> Matrix {
        let k = self.degree();
        let cols: Vec<FieldElement> = (0..k)
            .map(|j| self.mul(a, &FieldElement::unit_vector(k, j)))
            .collect();
        (0..k)
            .map(|r| (0..k).map(|c| cols[c].coords[r].clone()).collect())
            .collect()
    }

    pub fn norm(&self, a: &FieldElement) -> Rational {
        linalg::det(&self.mult_matrix(a))
    }

    pub fn trace(&self, a: &FieldElement) -> Rational {
        linalg::trace(&self.mult_matrix(a))
    }

    /// Characteristic polynomial of multiplication by `a`, low degree first.
    pub fn char_poly(&self, a: &FieldElement) -> Vec<Rational> {
        linalg::char_poly(&self.mult_matrix(a))
    }

    pub fn inverse(&self, a: &FieldElement) -> Result<FieldElement> {
        linalg::solve(&self.mult_matrix(a), self.one.coords())
            .map(FieldElement::new)
            .ok_or(Error::DivisionByZero("field inverse"))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    /// The rational number `a` equals, if `a ∈ Q`.
    pub fn rational_value(&self, a: &FieldElement) -> Option<Rational> {
        let k = self.degree();
        let c = self.trace(a) / Rational::from_integer(k.into());
        (self.one.scale(&c) == *a).then_some(c)
    }

    /// Exact test via the sign pattern of the characteristic polynomial,
    /// whose roots are the real conjugates of `a`.
    pub fn is_totally_positive(&self, a: &FieldElement) -> bool {
        linalg::real_rooted_all_positive(&self.char_poly(a))
    }

    /// For `k = 2`: `(α, β)` with `a = α + β√D`.
    pub fn quadratic_parts(&self, a: &FieldElement) -> Option<(Rational, Rational)> {
        let Places::Quadratic { d, sqrt_d } = &self.places else {
            return None;
        };
        let two = Rational::from_integer(2.into());
        let alpha = self.trace(a) / &two;
        let beta = self.trace(&self.mul(a, sqrt_d)) / (two * Rational::from_integer((*d).into()));
        Some((alpha, beta))
    }

    /// Galois conjugate for `k = 2`.
    pub fn conjugate(&self, a: &FieldElement) -> Option<FieldElement> {
        matches!(self.places, Places::Quadratic { .. })
            .then(|| self.one.scale(&self.trace(a)).sub(a))
    }

    /// Sign of σ_place(a).
    pub fn place_sign(&self, a: &FieldElement, place: usize) -> Result<Ordering> {
        match &self.places {
            Places::Rational => Ok(self.rational_value(a).unwrap().cmp(&Rational::zero())),
            Places::Quadratic { d, .. } => {
                let (alpha, beta) = self.quadratic_parts(a).unwrap();
                let beta = if place == 0 { beta } else { -beta };
                Ok(sign_alpha_plus_beta_sqrt(&alpha, &beta, *d))
            }
            Places::Isolated { .. } => {
                if a.is_zero() {
                    return Ok(Ordering::Equal);
                }
                for steps in 0..REFINE_LIMIT {
                    let (lo, hi) = self.place_interval(a, place, steps);
                    if lo.is_positive() {
                        return Ok(Ordering::Greater);
                    }
                    if hi.is_negative() {
                        return Ok(Ordering::Less);
                    }
                }
                Err(Error::UndecidedAtPrecision)
            }
        }
    }

    /// An interval containing σ_place(a), after `steps` bisections of the
    /// generator's isolating interval.
    pub fn place_interval(&self, a: &FieldElement, place: usize, steps: usize) -> (Rational, Rational) {
        match &self.places {
            Places::Rational => {
                let v = self.rational_value(a).unwrap();
                (v.clone(), v)
            }
            Places::Quadratic { d, .. } => {
                let (alpha, beta) = self.quadratic_parts(a).unwrap();
                let beta = if place == 0 { beta } else { -beta };
                let (slo, shi) = sqrt_interval(*d, steps + 8);
                let (x, y) = (&beta * &slo, &beta * &shi);
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                (&alpha + lo, &alpha + hi)
            }
            Places::Isolated { charpoly, roots, to_power_basis, .. } => {
                let (mut lo, mut hi) = roots[place].clone();
                let two = Rational::from_integer(2.into());
                for _ in 0..steps {
                    let mid = (&lo + &hi) / &two;
                    let fm = linalg::poly_eval(charpoly, &mid);
                    if fm.is_zero() {
                        lo = mid.clone();
                        hi = mid;
                        break;
                    }
                    let fh = linalg::poly_eval(charpoly, &hi);
                    if fh.is_zero() {
                        lo = hi.clone();
                        break;
                    }
                    if (fm.is_positive()) == (fh.is_positive()) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let c = linalg::mat_vec(to_power_basis, a.coords());
                interval_poly(&c, &lo, &hi)
            }
        }
    }

    /// Floating-point approximations of all real conjugates.
    pub fn approx_places(&self, a: &FieldElement) -> Vec<f64> {
        (0..self.degree())
            .map(|i| {
                let (lo, hi) = self.place_interval(a, i, 60);
                (lo.to_f64().unwrap() + hi.to_f64().unwrap()) / 2.0
            })
            .collect()
    }

    /// `v_p(Nm a) = 0`.
    pub fn is_coprime_to_p(&self, a: &FieldElement, p: u64) -> bool {
        val_rational(p, &self.norm(a)) == Some(0)
    }

    /// Whether the odd prime `p` is inert in `F`.
    ///
    /// Exact for `k ≤ 3`; higher degrees are reported as not inert.
    pub fn is_inert(&self, p: u64) -> bool {
        if !is_prime(p) || p == 2 {
            return false;
        }
        match &self.places {
            Places::Rational => true,
            Places::Quadratic { d, .. } => {
                let r = (*d).rem_euclid(p as i64) as u64;
                r != 0 && ModRing::new(p).pow(r, (p - 1) / 2) == p - 1
            }
            Places::Isolated { .. } if self.degree() == 3 => {
                // inert iff the minimal polynomial of an integral generator of
                // O_p has no root mod p; use the integral basis elements
                let ring = ModRing::new(p);
                let k = self.degree();
                let candidates = self.integral_basis.iter().cloned().chain((1..10).map(|m| {
                    (0..k).fold(FieldElement::zero(k), |acc, i| {
                        acc.add(&self.integral_basis[i].scale(&Rational::from_integer((m as i64).pow(i as u32).into())))
                    })
                }));
                for g in candidates {
                    let cp = self.char_poly(&g);
                    let Some(res) = cp.iter().map(|c| ring.from_rational(c)).collect::<Option<Vec<u64>>>() else {
                        continue;
                    };
                    // need p not dividing the index of Z[g], i.e. squarefree mod p
                    if !squarefree_mod_p(&res, p) {
                        continue;
                    }
                    return (0..p).all(|x| eval_mod(&res, x, &ring) != 0);
                }
                false
            }
            Places::Isolated { .. } => false,
        }
    }
}

fn squarefree_mod_p(f: &[u64], p: u64) -> bool {
    // discriminant-free check for small p: no repeated root over F_p is
    // necessary but for cubics with no roots it is also sufficient
    let ring = ModRing::new(p);
    let df: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| ring.mul(c, i as u64 % p))
        .collect();
    (0..p).all(|x| eval_mod(f, x, &ring) != 0 || eval_mod(&df, x, &ring) != 0)
}

fn eval_mod(f: &[u64], x: u64, ring: &ModRing) -> u64 {
    f.iter().rev().fold(0, |acc, &c| ring.add(ring.mul(acc, x), c))
}

fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..rows {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Matrix whose columns are the coordinates of the given elements.
pub fn coordinate_matrix(elems: &[FieldElement]) -> Matrix {
    let k = elems[0].degree();
    (0..k)
        .map(|r| elems.iter().map(|e| e.coords[r].clone()).collect())
        .collect()
}

fn sign_alpha_plus_beta_sqrt(alpha: &Rational, beta: &Rational, d: i64) -> Ordering {
    // sign of α + β√D
    let sa = alpha.cmp(&Rational::zero());
    let sb = beta.cmp(&Rational::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare α² with β²D
    let a2 = alpha * alpha;
    let b2d = beta * beta * Rational::from_integer(d.into());
    match a2.cmp(&b2d) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

fn sqrt_interval(d: i64, steps: usize) -> (Rational, Rational) {
    let dr = Rational::from_integer(d.into());
    let mut lo = Rational::zero();
    let mut hi = Rational::from_integer((d.max(1)).into());
    let two = Rational::from_integer(2.into());
    for _ in 0..steps {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= dr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn interval_poly(c: &[Rational], lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut acc = (Rational::zero(), Rational::zero());
    for coeff in c.iter().rev() {
        let prods = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        acc = (mn + coeff, mx + coeff);
    }
    acc
}

/// A Cassou-Noguès residue map `O → Z/N` given by the images of the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CNResidueMap {
    modulus: u64,
    images: Vec<u64>,
}

impl CNResidueMap {
    /// Validates that ρ is multiplicative on basis pairs and sends 1 to 1.
    pub fn new(field: &FieldData, modulus: u64, images: Vec<u64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidResidueMap("modulus must exceed 1".into()));
        }
        if images.len() != field.degree() {
            return Err(Error::InvalidResidueMap(format!(
                "expected {} images, got {}",
                field.degree(),
                images.len()
            )));
        }
        let rho = CNResidueMap {
            modulus,
            images: images.into_iter().map(|x| x % modulus).collect(),
        };
        let ring = ModRing::new(modulus);
        let k = field.degree();
        for i in 0..k {
            for j in i..k {
                let lhs = ring.mul(rho.images[i], rho.images[j]);
                let rhs = rho
                    .residue(&field.table[i][j])
                    .map_err(|_| Error::ResidueMapNotMultiplicative { modulus, i, j })?;
                if lhs != rhs {
                    return Err(Error::ResidueMapNotMultiplicative { modulus, i, j });
                }
            }
        }
        if rho.residue(&field.one)? != 1 % modulus {
            return Err(Error::InvalidResidueMap("ρ(1) ≠ 1".into()));
        }
        Ok(rho)
    }

    /// Every valid residue map modulo `n` (brute force over the basis images).
    pub fn enumerate(field: &FieldData, n: u64) -> Vec<CNResidueMap> {
        let k = field.degree();
        let mut out = Vec::new();
        let total = (n as usize).pow(k as u32);
        for idx in 0..total {
            let mut rem = idx;
            let images: Vec<u64> = (0..k)
                .map(|_| {
                    let d = (rem % n as usize) as u64;
                    rem /= n as usize;
                    d
                })
                .collect();
            if let Ok(rho) = CNResidueMap::new(field, n, images) {
                out.push(rho);
            }
        }
        out
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    /// ρ(a) for N-integral `a`.
    pub fn residue(&self, a: &FieldElement) -> Result<u64> {
        let ring = ModRing::new(self.modulus);
        let mut acc = 0;
        for (c, &img) in a.coords.iter().zip(&self.images) {
            let r = ring
                .from_rational(c)
                .ok_or(Error::NotIntegralAtModulus(self.modulus))?;
            acc = ring.add(acc, ring.mul(r, img));
        }
        Ok(acc)
    }

    /// `a♭_N`.
    pub fn flat(&self, a: &FieldElement) -> Result<u64> {
        self.residue(a)
    }

    /// `a♯_N`.
    pub fn sharp(&self, a: &FieldElement) -> Result<u64> {
        Ok(match self.residue(a)? {
            0 => self.modulus,
            r => r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    pub(crate) fn q_sqrt5() -> FieldData {
        let labels = vec!["1".to_string(), "eps".to_string()];
        let e = FieldElement::from_ints;
        let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[-1, 3])]];
        FieldData::new(labels, table).unwrap()
    }

    #[test]
    fn norm_and_trace() {
        let f = q_sqrt5();
        let eps = f.basis(1);
        assert_eq!(f.norm(&eps), int(1));
        assert_eq!(f.trace(&eps), int(3));
        assert_eq!(f.norm(&f.one()), int(1));
        assert_eq!(f.trace(&f.one()), int(2));
        let a = FieldElement::from_ints(&[1, 1]);
        assert_eq!(f.norm(&a), int(5));
    }

    #[test]
    fn positivity() {
        let f = q_sqrt5();
        let sqrt5 = FieldElement::from_ints(&[-3, 2]);
        assert!(!f.is_totally_positive(&sqrt5));
        assert!(f.is_totally_positive(&f.basis(1)));
        assert!(f.is_totally_positive(&f.one()));
        assert_eq!(f.discriminant_core(), Some(5));
        assert_eq!(f.place_sign(&sqrt5, 0).unwrap(), Ordering::Greater);
        assert_eq!(f.place_sign(&sqrt5, 1).unwrap(), Ordering::Less);
    }

    #[test]
    fn coprimality() {
        let f = q_sqrt5();
        assert!(f.is_coprime_to_p(&f.one(), 3));
        assert!(!f.is_coprime_to_p(&FieldElement::from_ints(&[0, 3]), 3));
        assert!(f.is_coprime_to_p(&FieldElement::from_ints(&[1, 1]), 3));
        assert!(f.is_inert(3));
        assert!(!f.is_inert(11));
    }

    #[test]
    fn residue_maps() {
        let f = q_sqrt5();
        let rho = CNResidueMap::new(&f, 5, vec![1, 4]).unwrap();
        assert_eq!(rho.flat(&f.basis(1)).unwrap(), 4);
        assert_eq!(rho.sharp(&FieldElement::from_ints(&[1, 1])).unwrap(), 5);
        assert_eq!(
            CNResidueMap::new(&f, 5, vec![1, 3]),
            Err(Error::ResidueMapNotMultiplicative { modulus: 5, i: 1, j: 1 })
        );
        let maps = CNResidueMap::enumerate(&f, 11);
        let mut eps_images: Vec<u64> = maps.iter().map(|m| m.images()[1]).collect();
        eps_images.sort();
        assert_eq!(eps_images, vec![5, 9]);
        let half = FieldElement::new(vec![rat(1, 2), int(0)]);
        assert_eq!(rho.residue(&half).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_tables() {
        let e = FieldElement::from_ints;
        let labels = vec!["1".to_string(), "w".to_string()];
        let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 2]), e(&[-1, 3])]];
        assert!(matches!(FieldData::new(labels, table), Err(Error::InvalidField(_))));
    }

    #[test]
    fn cubic_places() {
        // Q(α), α^3 = 3α - 1 (the totally real cubic of discriminant 81)
        let e = FieldElement::from_ints;
        let labels = vec!["1".into(), "a".into(), "a2".into()];
        let table = vec![
            vec![e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])],
            vec![e(&[0, 1, 0]), e(&[0, 0, 1]), e(&[-1, 3, 0])],
            vec![e(&[0, 0, 1]), e(&[-1, 3, 0]), e(&[0, -1, 3])],
        ];
        let f = FieldData::new(labels, table).unwrap();
        let a = f.basis(1);
        let signs: Vec<Ordering> = (0..3).map(|i| f.place_sign(&a, i).unwrap()).collect();
        assert_eq!(signs, vec![Ordering::Less, Ordering::Greater, Ordering::Greater]);
        assert!(!f.is_totally_positive(&a));
        let a2 = f.basis(2);
        assert!(f.is_totally_positive(&a2));
        assert!(f.is_inert(5));
        assert!(!f.is_inert(17));
        assert!(!f.is_inert(3));
    }
}
