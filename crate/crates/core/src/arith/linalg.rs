//! Dense rational linear algebra and real-root tools for small matrices.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..inner).fold(Rational::zero(), |acc, t| {
                        if a[i][t].is_zero() || b[t][j].is_zero() {
                            acc
                        } else {
                            acc + &a[i][t] * &b[t][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn trace(a: &Matrix) -> Rational {
    (0..a.len()).fold(Rational::zero(), |acc, i| acc + &a[i][i])
}

pub fn det(a: &Matrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let pv = m[col][col].clone();
        d *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    d
}

/// Solves `a x = b` for square invertible `a`.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        let inv = Rational::one() / &m[col][col];
        for c in col..=n {
            let v = &m[col][c] * &inv;
            m[col][c] = v;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &f * &m[col][c];
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let id = identity(n);
    let cols: Option<Vec<Vec<Rational>>> = (0..n)
        .map(|j| {
            let e: Vec<Rational> = id.iter().map(|r| r[j].clone()).collect();
            solve(a, &e)
        })
        .collect();
    let cols = cols?;
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Characteristic polynomial `det(X·I - a)`, low degree first (Faddeev–LeVerrier).
pub fn char_poly(a: &Matrix) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mat_mul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = mat_mul(a, &mk);
        coeffs[n - k] = -trace(&am) / Rational::from_integer(k.into());
    }
    coeffs
}

pub fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let b = poly_trim(b.to_vec());
    let db = b.len() - 1;
    let mut r = a.to_vec();
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        if !lead.is_zero() {
            let shift = r.len() - 1 - db;
            let f = lead / b.last().unwrap();
            for (j, bj) in b.iter().enumerate() {
                let t = &f * bj;
                r[shift + j] -= t;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(Rational::zero());
    }
    poly_trim(r)
}

pub fn derivative(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer(i.into()))
        .collect()
}

/// True when `p` has no repeated factor.
pub fn is_squarefree(p: &[Rational]) -> bool {
    let mut a = poly_trim(p.to_vec());
    let mut b = poly_trim(derivative(p));
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

/// Sturm sequence of a square-free polynomial.
pub fn sturm_sequence(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut seq = vec![poly_trim(p.to_vec()), poly_trim(derivative(p))];
    loop {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes_at(seq: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<Ordering> = seq
        .iter()
        .map(|q| poly_eval(q, x).cmp(&Rational::zero()))
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub fn count_roots(seq: &[Vec<Rational>], lo: &Rational, hi: &Rational) -> usize {
    sign_changes_at(seq, lo) - sign_changes_at(seq, hi)
}

pub fn root_bound(p: &[Rational]) -> Rational {
    let lead = p.last().unwrap().abs();
    let m = p[..p.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + Rational::one()
}

/// Disjoint isolating intervals `(lo, hi]` for the real roots of a square-free
/// polynomial, in increasing order.
pub fn isolate_real_roots(p: &[Rational]) -> Vec<(Rational, Rational)> {
    let seq = sturm_sequence(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&seq, &lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Rational::from_integer(2.into());
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Descartes sign test: for a polynomial whose roots are all real, every
/// root is positive iff the coefficients strictly alternate in sign.
pub fn real_rooted_all_positive(p: &[Rational]) -> bool {
    let p = poly_trim(p.to_vec());
    if p[0].is_zero() {
        return false;
    }
    p.windows(2)
        .all(|w| !w[0].is_zero() && !w[1].is_zero() && w[0].is_positive() != w[1].is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn char_poly_of_companion() {
        // multiplication by eps with eps^2 = 3 eps - 1
        let m = vec![vec![int(0), int(-1)], vec![int(1), int(3)]];
        assert_eq!(char_poly(&m), vec![int(1), int(-3), int(1)]);
        assert_eq!(det(&m), int(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
    }

    #[test]
    fn root_isolation() {
        // x^3 - 3x + 1 has three real roots
        let p = vec![int(1), int(-3), int(0), int(1)];
        assert!(is_squarefree(&p));
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        assert!(!is_squarefree(&[int(1), int(-2), int(1)]));
    }

    #[test]
    fn descartes_positivity() {
        assert!(real_rooted_all_positive(&[int(1), int(-3), int(1)]));
        assert!(!real_rooted_all_positive(&[int(-5), int(0), int(1)]));
        assert!(!real_rooted_all_positive(&[rat(1, 2), int(3), int(1)]));
    }
}
