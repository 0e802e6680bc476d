//! Sparse multivariate polynomials over `Q`, used for norms `Nm(x + l·v)` as
//! polynomials in the lattice offsets `l`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg};

use num_traits::Zero;

use super::{ModRing, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, Rational::from_integer(1.into()));
        p
    }

    /// `c + Σ a_i l_i`.
    pub fn affine(c: Rational, linear: &[Rational]) -> Self {
        let n = linear.len();
        let mut p = Self::constant(n, c);
        for (i, a) in linear.iter().enumerate() {
            if !a.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, a.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficients (low degree first) of the univariate polynomial in the last
    /// variable obtained by fixing the others to `prefix`, reduced modulo the
    /// ring. `None` if a coefficient denominator is not invertible.
    pub fn specialize_last_mod(&self, ring: &ModRing, prefix: &[u64]) -> Option<Vec<u64>> {
        debug_assert_eq!(prefix.len() + 1, self.nvars);
        let deg = self
            .terms
            .keys()
            .map(|e| e[self.nvars - 1])
            .max()
            .unwrap_or(0) as usize;
        let mut out = vec![0u64; deg + 1];
        for (e, c) in &self.terms {
            let mut t = ring.from_rational(c)?;
            for (&x, &k) in prefix.iter().zip(e) {
                t = ring.mul(t, ring.pow(x, k as u64));
            }
            let slot = e[self.nvars - 1] as usize;
            out[slot] = ring.add(out[slot], t);
        }
        Some(out)
    }

    pub fn eval_mod(&self, ring: &ModRing, point: &[u64]) -> Option<u64> {
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = ring.from_rational(c)?;
            for (&x, &k) in point.iter().zip(e) {
                t = ring.mul(t, ring.pow(x, k as u64));
            }
            acc = ring.add(acc, t);
        }
        Some(acc)
    }

    fn insert_add(&mut self, e: Vec<u32>, c: Rational) {
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(e, ca * cb);
            }
        }
        out
    }
}

/// Determinant of a square matrix with polynomial entries (Laplace expansion).
pub fn det(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    let nvars = m[0][0].nvars();
    match n {
        0 => MPoly::constant(nvars, Rational::from_integer(1.into())),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = MPoly::zero(nvars);
            for col in 0..n {
                let minor: Vec<Vec<MPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][col] * &det(&minor);
                acc = if col % 2 == 0 { &acc + &term } else { &acc + &(-&term) };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn determinant_of_affine_matrix() {
        // [[1 + l0, l1], [l1, 1]] -> 1 + l0 - l1^2
        let one = MPoly::constant(2, int(1));
        let m = vec![
            vec![MPoly::affine(int(1), &[int(1), int(0)]), MPoly::var(2, 1)],
            vec![MPoly::var(2, 1), one],
        ];
        let d = det(&m);
        assert_eq!(d.eval(&[int(3), int(2)]), int(0));
        assert_eq!(d.total_degree(), 2);
        let ring = ModRing::new(7);
        assert_eq!(d.eval_mod(&ring, &[3, 5]), Some(0));
        let uni = d.specialize_last_mod(&ring, &[3]).unwrap();
        assert_eq!(uni, vec![4, 0, 6]);
    }
}
