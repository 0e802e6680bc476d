//! Simplicial cones, their upper closures and fundamental parallelotopes,
//! and the single-cone decomposition of real quadratic fields.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::linalg::{self, Matrix};
use crate::arith::modint::mod_inverse;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::field::{coordinate_matrix, FieldData, FieldElement, Places};

/// A cone `C(V)` with its upper closure with respect to `e_1`.
#[derive(Clone, Debug)]
pub struct ConeContext {
    field: Arc<FieldData>,
    generators: Vec<FieldElement>,
    /// Field coordinates → V-coordinates.
    to_v: Matrix,
    /// Sign of the i-th V-coordinate of `e_1`.
    e1_signs: Vec<Ordering>,
}

const E1_REFINE_LIMIT: usize = 300;

impl ConeContext {
    pub fn new(field: Arc<FieldData>, generators: Vec<FieldElement>) -> Result<Self> {
        let k = field.degree();
        if generators.len() != k {
            return Err(Error::InvalidCone(format!("need {k} generators, got {}", generators.len())));
        }
        let m = coordinate_matrix(&generators);
        let to_v = linalg::inverse(&m)
            .ok_or_else(|| Error::InvalidCone("generators are not a Q-basis".into()))?;
        for (i, v) in generators.iter().enumerate() {
            if !field.is_totally_positive(v) {
                return Err(Error::InvalidCone(format!("generator {} is not totally positive", i + 1)));
            }
        }
        let e1_signs = e1_coordinate_signs(&field, &generators)?;
        Ok(ConeContext { field, generators, to_v, e1_signs })
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    pub fn degree(&self) -> usize {
        self.generators.len()
    }

    pub fn e1_signs(&self) -> &[Ordering] {
        &self.e1_signs
    }

    /// Whether the face `t_i = 0` belongs to the upper closure.
    ///
    /// For `k = 1` the only face is the origin, which is not totally
    /// positive, so it is never included.
    pub fn face_included(&self, i: usize) -> bool {
        self.degree() > 1 && self.e1_signs[i] == Ordering::Greater
    }

    /// Coordinates of `y` in the basis V.
    pub fn v_coords(&self, y: &FieldElement) -> Vec<Rational> {
        linalg::mat_vec(&self.to_v, y.coords())
    }

    pub fn from_v_coords(&self, t: &[Rational]) -> FieldElement {
        let k = self.field.degree();
        self.generators
            .iter()
            .zip(t)
            .fold(FieldElement::zero(k), |acc, (v, c)| acc.add(&v.scale(c)))
    }

    /// `x + Σ l_i v_i`.
    pub fn translate(&self, x: &FieldElement, l: &[i64]) -> FieldElement {
        self.generators
            .iter()
            .zip(l)
            .fold(x.clone(), |acc, (v, &li)| acc.add(&v.scale(&Rational::from_integer(li.into()))))
    }

    pub fn upper_closure_contains(&self, y: &FieldElement) -> bool {
        if y.is_zero() {
            return false;
        }
        self.v_coords(y).iter().enumerate().all(|(i, t)| match t.cmp(&Rational::zero()) {
            Ordering::Greater => true,
            Ordering::Equal => self.face_included(i),
            Ordering::Less => false,
        })
    }

    /// Normalises coordinates modulo `Z^k` into the parallelotope ranges and
    /// returns `(normalised, integer shifts)`.
    fn normalize(&self, t: &[Rational]) -> (Vec<Rational>, Vec<i64>) {
        let mut out = Vec::with_capacity(t.len());
        let mut shifts = Vec::with_capacity(t.len());
        for (i, c) in t.iter().enumerate() {
            let fl = c.floor();
            let mut frac = c - &fl;
            let mut shift = fl.to_integer();
            if frac.is_zero() && !self.face_included(i) {
                frac = Rational::one();
                shift -= 1;
            }
            out.push(frac);
            shifts.push(shift.to_i64().expect("lattice offset fits i64"));
        }
        (out, shifts)
    }

    fn lattice_in_v(&self, lattice: &[FieldElement]) -> Result<Matrix> {
        let k = self.degree();
        if lattice.len() != k {
            return Err(Error::InvalidCone("lattice basis must have k elements".into()));
        }
        let b: Vec<Vec<Rational>> = lattice.iter().map(|e| self.v_coords(e)).collect();
        // the cone lattice must lie in the given lattice
        let lm = coordinate_matrix(lattice);
        let linv = linalg::inverse(&lm).ok_or(Error::LatticeNotContained)?;
        for v in &self.generators {
            if !linalg::mat_vec(&linv, v.coords()).iter().all(Rational::is_integer) {
                return Err(Error::LatticeNotContained);
            }
        }
        Ok(b)
    }

    /// `[lattice : L_V]`.
    pub fn lattice_index(&self, lattice: &[FieldElement]) -> Result<u64> {
        let b = self.lattice_in_v(lattice)?;
        let d = linalg::det(&b).abs();
        let inv = Rational::one() / d;
        inv.to_integer().to_u64().ok_or(Error::LatticeNotContained)
    }

    /// Exponent of the finite group `lattice / L_V`.
    pub fn group_exponent(&self, lattice: &[FieldElement]) -> Result<u64> {
        let b = self.lattice_in_v(lattice)?;
        let e = b
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        e.to_u64().ok_or(Error::LatticeNotContained)
    }

    /// All points of `P(V) ∩ lattice`, sorted by V-coordinates.
    pub fn parallelotope_points(&self, lattice: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let b = self.lattice_in_v(lattice)?;
        let frac = |t: &[Rational]| -> Vec<Rational> { t.iter().map(|c| c - c.floor()).collect() };
        let zero = vec![Rational::zero(); self.degree()];
        let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
        seen.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(t) = frontier.pop() {
            for g in &b {
                let sum: Vec<Rational> = t.iter().zip(g).map(|(a, c)| a + c).collect();
                let r = frac(&sum);
                if seen.insert(r.clone()) {
                    frontier.push(r);
                }
            }
        }
        let mut pts: Vec<Vec<Rational>> = seen.into_iter().map(|t| self.normalize(&t).0).collect();
        pts.sort();
        Ok(pts.iter().map(|t| self.from_v_coords(t)).collect())
    }

    fn check_p_regular(&self, lattice: &[FieldElement], p: u64) -> Result<u64> {
        let index = self.lattice_index(lattice)?;
        if index % p == 0 {
            return Err(Error::PDividesIndex { p, index });
        }
        self.group_exponent(lattice)
    }

    fn scale_mod_lattice(&self, x: &FieldElement, c: u64) -> FieldElement {
        let t: Vec<Rational> = self
            .v_coords(x)
            .iter()
            .map(|a| a * Rational::from_integer(c.into()))
            .collect();
        self.from_v_coords(&self.normalize(&t).0)
    }

    /// The point of `P(V) ∩ lattice` congruent to `p·x` modulo `L_V`.
    pub fn tau_p(&self, lattice: &[FieldElement], x: &FieldElement, p: u64) -> Result<FieldElement> {
        self.check_p_regular(lattice, p)?;
        Ok(self.scale_mod_lattice(x, p))
    }

    /// The point congruent to `p⁻¹·x` modulo `L_V`.
    pub fn tau_p_inv(&self, lattice: &[FieldElement], x: &FieldElement, p: u64) -> Result<FieldElement> {
        let e = self.check_p_regular(lattice, p)?;
        let c = mod_inverse(p % e, e).expect("p is prime to the group exponent");
        Ok(self.scale_mod_lattice(x, if e == 1 { 1 } else { c }))
    }

    /// Splits `z ∈ C̄(V)` as `x + Σ l_i v_i` with `x` in the parallelotope.
    pub fn split(&self, z: &FieldElement) -> (FieldElement, Vec<i64>) {
        let (t, l) = self.normalize(&self.v_coords(z));
        (self.from_v_coords(&t), l)
    }
}

/// Signs of the V-coordinates of `e_1 = (1, 0, …, 0)` (Cramer's rule).
fn e1_coordinate_signs(field: &FieldData, gens: &[FieldElement]) -> Result<Vec<Ordering>> {
    let k = gens.len();
    match field.places() {
        Places::Rational => Ok(vec![field.place_sign(&gens[0], 0)?]),
        Places::Quadratic { .. } => {
            // M = [[σ1 v1, σ1 v2], [σ2 v1, σ2 v2]]; s_1 = σ2(v2)/det, s_2 = -σ2(v1)/det,
            // det = σ1(v1 v̄2) - σ2(v1 v̄2) = 2β√D where v1 v̄2 = α + β√D
            let conj2 = field.conjugate(&gens[1]).unwrap();
            let (_, beta) = field.quadratic_parts(&field.mul(&gens[0], &conj2)).unwrap();
            let det_sign = beta.cmp(&Rational::zero());
            if det_sign == Ordering::Equal {
                return Err(Error::InvalidCone("degenerate cone".into()));
            }
            let s1 = field.place_sign(&gens[1], 1)?;
            let s2 = field.place_sign(&gens[0], 1)?.reverse();
            let apply = |s: Ordering| if det_sign == Ordering::Less { s.reverse() } else { s };
            Ok(vec![apply(s1), apply(s2)])
        }
        Places::Isolated { .. } => {
            for steps in (0..E1_REFINE_LIMIT).step_by(10) {
                // rows = places, columns = generators
                let m: Vec<Vec<(Rational, Rational)>> = (0..k)
                    .map(|j| gens.iter().map(|v| field.place_interval(v, j, steps)).collect())
                    .collect();
                let det = interval_det(&m);
                let Some(det_sign) = interval_sign(&det) else { continue };
                let mut signs = Vec::with_capacity(k);
                for i in 0..k {
                    // cofactor of entry (0, i) with e_1 substituted in column i
                    let minor: Vec<Vec<(Rational, Rational)>> = m[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|(c, _)| *c != i)
                                .map(|(_, v)| v.clone())
                                .collect()
                        })
                        .collect();
                    let md = interval_det(&minor);
                    let Some(ms) = interval_sign(&md) else { break };
                    let s = if i % 2 == 1 { ms.reverse() } else { ms };
                    signs.push(if det_sign == Ordering::Less { s.reverse() } else { s });
                }
                if signs.len() == k {
                    return Ok(signs);
                }
            }
            Err(Error::UndecidedAtPrecision)
        }
    }
}

type Interval = (Rational, Rational);

fn interval_mul(a: &Interval, b: &Interval) -> Interval {
    let p = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    (p.iter().min().unwrap().clone(), p.iter().max().unwrap().clone())
}

fn interval_det(m: &[Vec<Interval>]) -> Interval {
    let n = m.len();
    if n == 0 {
        return (Rational::one(), Rational::one());
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = (Rational::zero(), Rational::zero());
    for col in 0..n {
        let minor: Vec<Vec<Interval>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let t = interval_mul(&m[0][col], &interval_det(&minor));
        acc = if col % 2 == 0 {
            (&acc.0 + &t.0, &acc.1 + &t.1)
        } else {
            (&acc.0 - &t.1, &acc.1 - &t.0)
        };
    }
    acc
}

fn interval_sign(i: &Interval) -> Option<Ordering> {
    if i.0.is_positive() {
        Some(Ordering::Greater)
    } else if i.1.is_negative() {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// A representative `a_i` of a narrow ideal class, given through a Z-basis of `a_i⁻¹`.
#[derive(Clone, Debug)]
pub struct IdealClassRep {
    pub inverse_lattice: Vec<FieldElement>,
    pub norm: Rational,
}

/// Cone decomposition `F ⊗ R₊ = ⊔_ε ⊔_V ε C̄(V)`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    field: Arc<FieldData>,
    cones: Vec<ConeContext>,
    /// Generators of the totally positive units `E`.
    units: Vec<FieldElement>,
    ideals: Vec<IdealClassRep>,
}

/// Output of [`Decomposition::locate`]: `y = Π ε_j^{n_j} · (x + Σ l_i v_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub unit_exponents: Vec<i64>,
    pub cone: usize,
    pub x: FieldElement,
    pub l: Vec<i64>,
}

const LOCATE_RADIUS: i64 = 2;

impl Decomposition {
    pub fn new(
        field: Arc<FieldData>,
        cones: Vec<ConeContext>,
        units: Vec<FieldElement>,
        ideals: Vec<IdealClassRep>,
    ) -> Result<Self> {
        if cones.is_empty() {
            return Err(Error::InvalidCone("decomposition has no cones".into()));
        }
        if units.len() + 1 != field.degree() {
            return Err(Error::InvalidCone(format!(
                "need {} unit generators, got {}",
                field.degree() - 1,
                units.len()
            )));
        }
        for u in &units {
            if field.norm(u) != Rational::one() || !field.is_totally_positive(u) {
                return Err(Error::InvalidCone(format!("{u} is not a totally positive unit")));
            }
        }
        if ideals.is_empty() {
            return Err(Error::InvalidCone("at least one ideal class is required".into()));
        }
        Ok(Decomposition { field, cones, units, ideals })
    }

    /// The trivial decomposition of `Q`.
    pub fn rational() -> Result<Self> {
        let field = Arc::new(FieldData::new(
            vec!["1".into()],
            vec![vec![FieldElement::from_ints(&[1])]],
        )?);
        let cone = ConeContext::new(field.clone(), vec![FieldElement::from_ints(&[1])])?;
        let ideal = IdealClassRep {
            inverse_lattice: field.integral_basis().to_vec(),
            norm: Rational::one(),
        };
        Self::new(field, vec![cone], vec![], vec![ideal])
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn cones(&self) -> &[ConeContext] {
        &self.cones
    }

    pub fn units(&self) -> &[FieldElement] {
        &self.units
    }

    pub fn ideals(&self) -> &[IdealClassRep] {
        &self.ideals
    }

    fn unit_power(&self, exps: &[i64]) -> Result<FieldElement> {
        let mut acc = self.field.one();
        for (u, &e) in self.units.iter().zip(exps) {
            let base = if e < 0 { self.field.inverse(u)? } else { u.clone() };
            acc = self.field.mul(&acc, &self.field.pow(&base, e.unsigned_abs() as u32));
        }
        Ok(acc)
    }

    fn log_vector(&self, y: &FieldElement) -> Vec<f64> {
        let s = self.field.approx_places(y);
        let logs: Vec<f64> = s.iter().map(|x| x.abs().ln()).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        logs.iter().map(|l| l - mean).collect()
    }

    /// Floating estimate of the unit exponents moving `y` next to cone `c`.
    fn estimate(&self, y: &FieldElement, c: usize) -> Vec<i64> {
        let r = self.units.len();
        if r == 0 {
            return Vec::new();
        }
        let center = self.cones[c]
            .generators
            .iter()
            .fold(FieldElement::zero(self.field.degree()), |a, v| a.add(v));
        let ly = self.log_vector(y);
        let lc = self.log_vector(&center);
        let target: Vec<f64> = ly.iter().zip(&lc).map(|(a, b)| a - b).collect();
        let cols: Vec<Vec<f64>> = self.units.iter().map(|u| self.log_vector(u)).collect();
        // normal equations
        let mut a = vec![vec![0.0; r]; r];
        let mut b = vec![0.0; r];
        for i in 0..r {
            for j in 0..r {
                a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
            }
            b[i] = cols[i].iter().zip(&target).map(|(x, y)| x * y).sum();
        }
        solve_f64(a, b).iter().map(|x| x.round() as i64).collect()
    }

    /// The unique `(ε-exponents, V, x, l)` with `y = ε^n (x + l·v)`.
    pub fn locate(&self, y: &FieldElement) -> Result<Located> {
        if !self.field.is_totally_positive(y) {
            return Err(Error::InvalidQuery(format!("{y} is not totally positive")));
        }
        let mut found: Vec<Located> = Vec::new();
        for c in 0..self.cones.len() {
            let center = self.estimate(y, c);
            for offset in box_offsets(self.units.len(), LOCATE_RADIUS) {
                let n: Vec<i64> = center.iter().zip(&offset).map(|(a, b)| a + b).collect();
                let u = self.unit_power(&n)?;
                let z = self.field.div(y, &u)?;
                let cone = &self.cones[c];
                if cone.upper_closure_contains(&z) {
                    let (x, l) = cone.split(&z);
                    let loc = Located { unit_exponents: n, cone: c, x, l };
                    if !found.contains(&loc) {
                        found.push(loc);
                    }
                }
            }
        }
        match found.len() {
            0 => Err(Error::NotInAnyCone),
            1 => Ok(found.pop().unwrap()),
            _ => Err(Error::NotUnique),
        }
    }

    /// Round-trips `locate` on the given points and on unit translates of
    /// lattice points of every cone.
    pub fn validate(&self, samples: &[FieldElement]) -> Result<()> {
        for y in samples {
            self.locate(y)?;
        }
        for (c, cone) in self.cones.iter().enumerate() {
            for ideal in &self.ideals {
                for x in cone.parallelotope_points(&ideal.inverse_lattice)? {
                    for l in [vec![0i64; cone.degree()], vec![1; cone.degree()]] {
                        let y = cone.translate(&x, &l);
                        for n in box_offsets(self.units.len(), 1) {
                            let u = self.unit_power(&n)?;
                            let loc = self.locate(&self.field.mul(&u, &y))?;
                            if loc.cone != c || loc.unit_exponents != n || loc.x != x || loc.l != l {
                                return Err(Error::NotUnique);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn box_offsets(r: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-radius..=radius).map(move |d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// Quadratic numbers `(P + √d)/Q` expanded as a continued fraction.
fn fundamental_unit_parts(d: i64, p0: i64, q0: i64) -> Result<(Rational, Rational)> {
    // returns (α, β) with ε = α + β√d the product of complete quotients over one period
    let s = (d as u64).sqrt() as i64;
    let (mut p, mut q) = (p0, q0);
    let mut states: Vec<(i64, i64)> = Vec::new();
    for _ in 0..100_000 {
        states.push((p, q));
        let a = (p + s).div_euclid(q);
        let np = a * q - p;
        let nq = (d - np * np) / q;
        p = np;
        q = nq;
        if let Some(start) = states.iter().skip(1).position(|&st| st == (p, q)) {
            let start = start + 1;
            // ε = Π_{i in period} (P_i + √d)/Q_i
            let mut alpha = Rational::one();
            let mut beta = Rational::zero();
            let dr = Rational::from_integer(d.into());
            for &(pi, qi) in &states[start..] {
                let a2 = Rational::new(pi.into(), qi.into());
                let b2 = Rational::new(1.into(), qi.into());
                let na = &alpha * &a2 + &beta * &b2 * &dr;
                let nb = &alpha * &b2 + &beta * &a2;
                alpha = na;
                beta = nb;
            }
            return Ok((alpha, beta));
        }
    }
    Err(Error::UnitNotFound(d as u64))
}

/// Narrow class number of discriminant `disc` via cycles of reduced forms.
pub fn narrow_class_number(disc: i64) -> u64 {
    let s = (disc as u64).sqrt() as i64;
    let reduced = |a: i64, b: i64| -> bool {
        let two_a = 2 * a.abs();
        b > 0 && b * b < disc && disc < (two_a + b) * (two_a + b) && (two_a - b <= 0 || (two_a - b) * (two_a - b) < disc)
    };
    let mut forms: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
    for b in 1..=s {
        if (b - disc).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b * b - disc) / 4;
        if (b * b - disc) % 4 != 0 {
            continue;
        }
        for a_abs in 1..=ac.abs() {
            if ac % a_abs != 0 {
                continue;
            }
            for a in [a_abs, -a_abs] {
                let c = ac / a;
                if reduced(a, b) && a.gcd(&b).gcd(&c) == 1 {
                    forms.insert((a, b, c));
                }
            }
        }
    }
    let step = |(_a, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        let m = 2 * c.abs();
        // largest b' ≤ s with b' ≡ -b mod 2|c|
        let r = (-b).rem_euclid(m);
        let bp = s - (s - r).rem_euclid(m);
        let ap = (bp * bp - disc) / (4 * c);
        (c, bp, ap)
    };
    let mut seen: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        while seen.insert(g) {
            g = step(g);
        }
    }
    cycles
}

/// `Q(√D)` on the integral basis `{1, ω}` with `ω = √D` or `(1 + √D)/2`.
pub fn quadratic_field(d: u64) -> Result<FieldData> {
    let squarefree = crate::arith::modint::factorize(d).iter().all(|&(_, e)| e == 1);
    if d < 2 || !squarefree {
        return Err(Error::InvalidField(format!("{d} is not a square-free integer > 1")));
    }
    let e = FieldElement::from_ints;
    let d = d as i64;
    let (label, w2) = if d % 4 == 1 {
        ("omega", e(&[(d - 1) / 4, 1]))
    } else {
        ("sqrtD", e(&[d, 0]))
    };
    let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), w2]];
    let field = FieldData::new(vec!["1".into(), label.into()], table)?;
    let sqrt_d = if d % 4 == 1 { e(&[-1, 2]) } else { e(&[0, 1]) };
    field.with_sqrt(sqrt_d)
}

/// The totally positive fundamental unit of `Q(√D)` in the basis of [`quadratic_field`].
pub fn totally_positive_unit(field: &FieldData) -> Result<FieldElement> {
    let d = field.discriminant_core().ok_or_else(|| Error::InvalidField("not quadratic".into()))?;
    let (p0, q0) = if d % 4 == 1 { (1, 2) } else { (0, 1) };
    let (alpha, beta) = fundamental_unit_parts(d, p0, q0)?;
    // ε = α + β√D; in the basis {1, ω}
    let sqrt_d = match field.places() {
        Places::Quadratic { sqrt_d, .. } => sqrt_d.clone(),
        _ => unreachable!(),
    };
    let mut eps = field.one().scale(&alpha).add(&sqrt_d.scale(&beta));
    if field.norm(&eps) != Rational::one() {
        eps = field.mul(&eps, &eps);
    }
    if !field.is_totally_positive(&eps) {
        eps = eps.neg();
    }
    if field.place_sign(&eps.sub(&field.one()), 0)? == Ordering::Less {
        eps = field.inverse(&eps)?;
    }
    if field.norm(&eps) != Rational::one() || !eps.coords().iter().all(Rational::is_integer) {
        return Err(Error::UnitNotFound(d as u64));
    }
    Ok(eps)
}

/// The single-cone decomposition `{V = {1, ε₊}}` of `Q(√D)` with narrow class number one.
pub fn build_quadratic_decomposition(d: u64) -> Result<Decomposition> {
    let field = quadratic_field(d)?;
    let disc = if d % 4 == 1 { d as i64 } else { 4 * d as i64 };
    if narrow_class_number(disc) != 1 {
        return Err(Error::NarrowClassNumberNotOne(d));
    }
    let eps = totally_positive_unit(&field)?;
    decomposition_for_unit(Arc::new(field), eps)
}

/// Single-cone decomposition `{1, ε}` of a real quadratic field with trivial
/// narrow class group, on any field basis.
pub fn decomposition_for_unit(field: Arc<FieldData>, eps: FieldElement) -> Result<Decomposition> {
    let cone = ConeContext::new(field.clone(), vec![field.one(), eps.clone()])?;
    let ideal = IdealClassRep {
        inverse_lattice: field.integral_basis().to_vec(),
        norm: Rational::one(),
    };
    let dec = Decomposition::new(field, vec![cone], vec![eps], vec![ideal])?;
    dec.validate(&[])?;
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_sqrt5() -> Arc<FieldData> {
        let e = FieldElement::from_ints;
        let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[-1, 3])]];
        Arc::new(FieldData::new(vec!["1".into(), "eps".into()], table).unwrap())
    }

    fn flagship() -> Decomposition {
        let f = q_sqrt5();
        decomposition_for_unit(f.clone(), f.basis(1)).unwrap()
    }

    #[test]
    fn closure_signs_q_sqrt5() {
        let dec = flagship();
        let cone = &dec.cones()[0];
        assert_eq!(cone.e1_signs(), &[Ordering::Less, Ordering::Greater]);
        assert!(!cone.face_included(0));
        assert!(cone.face_included(1));
        let e = FieldElement::from_ints;
        assert!(cone.upper_closure_contains(&e(&[1, 1])));
        assert!(!cone.upper_closure_contains(&e(&[0, 1])));
        assert!(cone.upper_closure_contains(&e(&[1, 0])));
        assert!(!cone.upper_closure_contains(&e(&[-1, 1])));
    }

    #[test]
    fn parallelotope_singleton() {
        let dec = flagship();
        let cone = &dec.cones()[0];
        let pts = cone.parallelotope_points(&dec.ideals()[0].inverse_lattice).unwrap();
        assert_eq!(pts, vec![FieldElement::from_ints(&[1, 0])]);
        assert_eq!(cone.tau_p(&dec.ideals()[0].inverse_lattice, &pts[0], 3).unwrap(), pts[0]);
    }

    #[test]
    fn rational_parallelotope() {
        let dec = Decomposition::rational().unwrap();
        let cone = &dec.cones()[0];
        let pts = cone.parallelotope_points(&dec.ideals()[0].inverse_lattice).unwrap();
        assert_eq!(pts, vec![FieldElement::from_ints(&[1])]);
    }

    #[test]
    fn locate_examples() {
        let dec = flagship();
        let f = dec.field().clone();
        let y = FieldElement::from_ints(&[7, 4]);
        let loc = dec.locate(&y).unwrap();
        assert_eq!(loc.unit_exponents, vec![0]);
        assert_eq!(loc.x, f.one());
        assert_eq!(loc.l, vec![6, 4]);
        let eps_inv = f.inverse(&f.basis(1)).unwrap();
        let z = f.mul(&eps_inv, &FieldElement::from_ints(&[2, 0]));
        let loc = dec.locate(&z).unwrap();
        assert_eq!(loc.unit_exponents, vec![-1]);
        assert_eq!(loc.l, vec![1, 0]);
    }

    #[test]
    fn quadratic_builder() {
        let dec = build_quadratic_decomposition(5).unwrap();
        // ε₊ = (3+√5)/2 = 1 + ω
        assert_eq!(dec.units()[0], FieldElement::from_ints(&[1, 1]));
        let dec2 = build_quadratic_decomposition(2).unwrap();
        assert_eq!(dec2.units()[0], FieldElement::from_ints(&[3, 2]));
        assert_eq!(
            build_quadratic_decomposition(3).unwrap_err(),
            Error::NarrowClassNumberNotOne(3)
        );
        assert_eq!(narrow_class_number(5), 1);
        assert_eq!(narrow_class_number(12), 2);
        assert_eq!(narrow_class_number(8), 1);
    }

    #[test]
    fn index_two_sublattice() {
        let f = q_sqrt5();
        // V = {1, ε^2}: ε^2 = 3ε - 1, index 3 in O
        let eps2 = f.mul(&f.basis(1), &f.basis(1));
        let cone = ConeContext::new(f.clone(), vec![f.one(), eps2]).unwrap();
        let lattice = f.integral_basis().to_vec();
        assert_eq!(cone.lattice_index(&lattice).unwrap(), 3);
        let pts = cone.parallelotope_points(&lattice).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(
            cone.tau_p(&lattice, &pts[0], 3),
            Err(Error::PDividesIndex { p: 3, index: 3 })
        );
        for x in &pts {
            let y = cone.tau_p(&lattice, x, 5).unwrap();
            assert_eq!(&cone.tau_p_inv(&lattice, &y, 5).unwrap(), x);
        }
    }
}
