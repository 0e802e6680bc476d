//! The lattice-sum hot loop.
//!
//! A sum over `l ∈ [lo, lo + len)^k` of a weight depending on `Nm(x + l·v)`
//! is split into rows (all but the last coordinate fixed) and chunks of the
//! last coordinate. Each work item specialises the norm polynomial to a
//! univariate one and runs Horner's rule modulo `p^W`. Results are binned by
//! `l mod N` and by the ψ-exponent, so that the exact coefficient tables are
//! applied once per bin instead of once per point.

use std::collections::HashMap;

use crate::arith::mpoly::{self, MPoly};
use crate::arith::{ModRing, Rational};
use crate::cones::ConeContext;
use crate::error::{Error, Result};
use crate::field::{FieldData, FieldElement};
use crate::par::{fold_range, Exec};

const CHUNK: u64 = 1 << 14;

/// `Nm(x + Σ l_i v_i)` as a polynomial in `l`.
pub fn norm_polynomial(field: &FieldData, x: &FieldElement, gens: &[FieldElement]) -> MPoly {
    let mx = field.mult_matrix(x);
    let mv: Vec<_> = gens.iter().map(|v| field.mult_matrix(v)).collect();
    let k = field.degree();
    let m: Vec<Vec<MPoly>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let lin: Vec<Rational> = mv.iter().map(|m| m[a][b].clone()).collect();
                    MPoly::affine(mx[a][b].clone(), &lin)
                })
                .collect()
        })
        .collect();
    mpoly::det(&m)
}

/// Which points of the box contribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    /// `gcd(p, y) = 1`.
    Units,
    /// `p | Nm(y)`.
    NonUnits,
    All,
}

/// Per-point weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// Exact counting; the bins hold plain integers.
    Count,
    /// `⟨Nm y⟩^e · ω(Nm y)^{-j}` modulo `p^W`.
    Power { e: u64, omega_inv: u32 },
}

/// ψ evaluated inside the loop.
#[derive(Clone, Debug)]
pub enum PsiEval {
    Trivial,
    /// `ψ(y) = φ(Nm y mod p^t)` with φ given by an exponent table on `Z/p^t`.
    Norm { modulus: u64, exps: Vec<Option<u32>> },
    /// Exponent table on integral-basis coordinates of `y` modulo `p^t`.
    Table {
        modulus: u64,
        base: Vec<u64>,
        steps: Vec<Vec<u64>>,
        table: HashMap<Vec<u64>, u32>,
    },
}

impl PsiEval {
    #[inline]
    fn exponent(&self, l: &[u64], nm: u64) -> Option<u32> {
        match self {
            PsiEval::Trivial => Some(0),
            PsiEval::Norm { modulus, exps } => exps[(nm % modulus) as usize],
            PsiEval::Table { modulus, base, steps, table } => {
                let key: Vec<u64> = (0..base.len())
                    .map(|j| {
                        let mut c = base[j] as u128;
                        for (i, &li) in l.iter().enumerate() {
                            c += steps[i][j] as u128 * (li % modulus) as u128;
                        }
                        (c % *modulus as u128) as u64
                    })
                    .collect();
                table.get(&key).copied()
            }
        }
    }
}

/// A fully specified box sum.
pub struct BoxSpec<'a> {
    pub poly: &'a MPoly,
    pub lo: Vec<u64>,
    pub len: u64,
    /// Bins are indexed by `Σ (l_i mod n_bins)·n_bins^i`.
    pub n_bins: u64,
    pub p: u64,
    /// `p^W` for weighted sums.
    pub modulus: u64,
    pub weight: Weight,
    pub filter: Filter,
    pub psi: &'a PsiEval,
    pub psi_order: u32,
}

/// Output of [`run_box`]: `bins[class * psi_order + e]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSum {
    pub bins: Vec<u64>,
    pub visited: u64,
    pub contributing: u64,
}

struct ModPoly {
    terms: Vec<(Vec<u32>, u64)>,
    last_degree: usize,
}

impl ModPoly {
    fn new(poly: &MPoly, ring: &ModRing) -> Result<Self> {
        let k = poly.nvars();
        let mut terms = Vec::new();
        let mut last_degree = 0;
        for (e, c) in poly.terms() {
            let c = ring
                .from_rational(c)
                .ok_or_else(|| Error::DomainViolation("norm polynomial is not p-integral".into()))?;
            last_degree = last_degree.max(e[k - 1] as usize);
            terms.push((e.clone(), c));
        }
        Ok(ModPoly { terms, last_degree })
    }

    fn specialize(&self, ring: &ModRing, prefix: &[u64], out: &mut [u64]) {
        out.iter_mut().for_each(|c| *c = 0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&x, &k) in prefix.iter().zip(e) {
                if k > 0 {
                    t = ring.mul(t, ring.pow(x % ring.modulus(), k as u64));
                }
            }
            let slot = e[e.len() - 1] as usize;
            out[slot] = ring.add(out[slot], t);
        }
    }
}

/// Runs the box sum.
pub fn run_box(spec: &BoxSpec<'_>, exec: Exec) -> Result<BoxSum> {
    let k = spec.poly.nvars();
    if spec.lo.len() != k || k == 0 {
        return Err(Error::InvalidQuery("box dimension mismatch".into()));
    }
    let ring_mod = match spec.weight {
        Weight::Count => spec.p,
        Weight::Power { .. } => spec.modulus,
    };
    let ring = ModRing::new(ring_mod);
    let mp = ModPoly::new(spec.poly, &ring)?;
    let rows = spec
        .len
        .checked_pow(k as u32 - 1)
        .ok_or_else(|| Error::InstanceTooLarge("box too large".into()))?;
    let chunks = spec.len.div_ceil(CHUNK).max(1);
    let items = rows
        .checked_mul(chunks)
        .ok_or_else(|| Error::InstanceTooLarge("box too large".into()))?;
    let n_bins = spec.n_bins;
    let m_psi = spec.psi_order.max(1) as usize;
    let bin_count = (n_bins as usize).pow(k as u32) * m_psi;
    let stride_last = (n_bins as usize).pow(k as u32 - 1);

    // ⟨y⟩^e ω(y)^{-j} = y^e · ω(y)^{-e-j}; the second factor depends on y mod p
    let weight_table: Vec<u64> = match spec.weight {
        Weight::Count => Vec::new(),
        Weight::Power { e, omega_inv } => {
            let digits = digits_of(spec.modulus, spec.p);
            let teich = crate::padic::teichmuller_table(spec.p, digits)?;
            let order = spec.modulus / spec.p * (spec.p - 1);
            let exp = (order - (e as u128 + omega_inv as u128).rem_euclid(order as u128) as u64) % order;
            (0..spec.p)
                .map(|r| if r == 0 { 0 } else { ring.pow(teich[r as usize], exp) })
                .collect()
        }
    };

    let fold = |acc: &mut BoxSum, item: u64| {
        let row = item / chunks;
        let chunk = item % chunks;
        let mut prefix = Vec::with_capacity(k - 1);
        let mut rem = row;
        let mut class_prefix = 0usize;
        let mut scale = 1usize;
        for i in 0..k - 1 {
            let li = spec.lo[i] + rem % spec.len;
            rem /= spec.len;
            class_prefix += (li % n_bins) as usize * scale;
            scale *= n_bins as usize;
            prefix.push(li);
        }
        let mut coeffs = vec![0u64; mp.last_degree + 1];
        mp.specialize(&ring, &prefix, &mut coeffs);
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(spec.len);
        let mut point = prefix.clone();
        point.push(0);
        let lo_last = spec.lo[k - 1];
        let mut r_last = ((lo_last + start) % n_bins) as usize;
        let modulus = ring.modulus();
        for j in start..end {
            let lk = lo_last + j;
            let xk = lk % modulus;
            let mut nm = 0u64;
            for &c in coeffs.iter().rev() {
                nm = ring.add(ring.mul(nm, xk), c);
            }
            acc.visited += 1;
            let unit = !nm.is_multiple_of(spec.p);
            let keep = match spec.filter {
                Filter::Units => unit,
                Filter::NonUnits => !unit,
                Filter::All => true,
            };
            if keep {
                let e = if matches!(spec.psi, PsiEval::Trivial) {
                    Some(0)
                } else {
                    point[k - 1] = lk;
                    spec.psi.exponent(&point, nm)
                };
                if let Some(e) = e {
                    let bin = (class_prefix + r_last * stride_last) * m_psi + e as usize;
                    acc.contributing += 1;
                    match spec.weight {
                        Weight::Count => acc.bins[bin] += 1,
                        Weight::Power { e: pe, .. } => {
                            let w = ring.mul(ring.pow(nm, pe), weight_table[(nm % spec.p) as usize]);
                            acc.bins[bin] = ring.add(acc.bins[bin], w);
                        }
                    }
                }
            }
            r_last += 1;
            if r_last == n_bins as usize {
                r_last = 0;
            }
        }
    };
    let merge = |mut a: BoxSum, b: BoxSum| {
        for (x, y) in a.bins.iter_mut().zip(&b.bins) {
            *x = match spec.weight {
                Weight::Count => *x + y,
                Weight::Power { .. } => ring.add(*x, *y),
            };
        }
        a.visited += b.visited;
        a.contributing += b.contributing;
        a
    };
    let init = || BoxSum { bins: vec![0; bin_count], visited: 0, contributing: 0 };
    Ok(fold_range(exec, 0..items, init, fold, merge))
}

/// Product of `Nm(l·v)` over `l ∈ Π [1, n_i)` with `p ∤ Nm(l·v)`, modulo `p^W`.
pub fn box_norm_product(cone: &ConeContext, n: &[u64], p: u64, modulus: u64, exec: Exec) -> Result<u64> {
    let k = cone.degree();
    let field = cone.field();
    let poly = norm_polynomial(field, &FieldElement::zero(k), cone.generators());
    let ring = ModRing::new(modulus);
    let mp = ModPoly::new(&poly, &ring)?;
    if n.iter().any(|&ni| ni <= 1) {
        return Ok(1 % modulus);
    }
    let lens: Vec<u64> = n.iter().map(|&ni| ni - 1).collect();
    let rows: u64 = lens[..k - 1].iter().product();
    let last = lens[k - 1];
    let chunks = last.div_ceil(CHUNK).max(1);
    let fold = |acc: &mut u64, item: u64| {
        let row = item / chunks;
        let chunk = item % chunks;
        let mut rem = row;
        let prefix: Vec<u64> = lens[..k - 1]
            .iter()
            .map(|&len| {
                let li = 1 + rem % len;
                rem /= len;
                li
            })
            .collect();
        let mut coeffs = vec![0u64; mp.last_degree + 1];
        mp.specialize(&ring, &prefix, &mut coeffs);
        let start = 1 + chunk * CHUNK;
        let end = (start + CHUNK).min(last + 1);
        let mut prod = *acc;
        for lk in start..end {
            let xk = lk % modulus;
            let mut nm = 0u64;
            for &c in coeffs.iter().rev() {
                nm = ring.add(ring.mul(nm, xk), c);
            }
            if !nm.is_multiple_of(p) {
                prod = ring.mul(prod, nm);
            }
        }
        *acc = prod;
    };
    Ok(fold_range(exec, 0..rows * chunks, || 1 % modulus, fold, |a, b| ring.mul(a, b)))
}

pub(crate) fn digits_of(modulus: u64, p: u64) -> u32 {
    let mut d = 0;
    let mut m = modulus;
    while m > 1 {
        m /= p;
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::q_sqrt5;

    #[test]
    fn norm_polynomial_matches_field_norm() {
        let f = q_sqrt5();
        let x = FieldElement::from_ints(&[1, 0]);
        let gens = vec![f.one(), f.basis(1)];
        let poly = norm_polynomial(&f, &x, &gens);
        for (a, b) in [(0i64, 0i64), (2, 3), (5, 1)] {
            let y = FieldElement::from_ints(&[1 + a, b]);
            let pt = vec![Rational::from_integer(a.into()), Rational::from_integer(b.into())];
            assert_eq!(poly.eval(&pt), f.norm(&y));
        }
    }

    #[test]
    fn count_partition_and_modes() {
        let f = q_sqrt5();
        let x = f.one();
        let gens = vec![f.one(), f.basis(1)];
        let poly = norm_polynomial(&f, &x, &gens);
        let run = |filter, exec| {
            let spec = BoxSpec {
                poly: &poly,
                lo: vec![0, 0],
                len: 81,
                n_bins: 5,
                p: 3,
                modulus: 3,
                weight: Weight::Count,
                filter,
                psi: &PsiEval::Trivial,
                psi_order: 1,
            };
            run_box(&spec, exec).unwrap()
        };
        let units = run(Filter::Units, Exec::Sequential);
        let non = run(Filter::NonUnits, Exec::Sequential);
        let all = run(Filter::All, Exec::Parallel);
        assert_eq!(all.visited, 81 * 81);
        for i in 0..25 {
            assert_eq!(units.bins[i] + non.bins[i], all.bins[i]);
        }
        // 3 is inert in Q(√5): exactly one residue class of O/3 is non-unit
        assert_eq!(non.contributing, 81 * 81 / 9);
        assert_eq!(units, run(Filter::Units, Exec::Parallel));
    }
}
