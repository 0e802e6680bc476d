//! Standalone identities: the Ferrero-Greenberg index map, the curious
//! `(N−1)²/4` sum, the zero-sum identity, the line-sum congruence and the
//! shifted-box reindexing of `L_{p,V,x}` sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::kernel::{norm_polynomial, run_box, BoxSpec, Filter, PsiEval, Weight};
use super::LSeriesConfig;
use crate::arith::modint::{flat, is_prime, sharp};
use crate::arith::{CycloValue, ModRing, Rational, RootSum};
use crate::characters::{PadicEmbedding, PsiCharacter};
use crate::cones::Decomposition;
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldData, FieldElement};
use crate::measure::{zero_sum, ConeResidues};
use crate::padic::{self, pow_checked, Padic, PadicExponent};

/// `ι(m) = (k + 1) + (N − m♯)(Q − 1)/N` for `m = m♯ + kN`, `Q = q^n`.
pub fn fg_map(m: i64, n: u64, qn: u64) -> Result<i64> {
    if n == 0 || qn % n != 1 % n {
        return Err(Error::ParameterViolation(format!("{qn} is not 1 mod {n}")));
    }
    let ms = sharp(m, n) as i64;
    let k = (m - ms) / n as i64;
    Ok(k + 1 + (n as i64 - ms) * ((qn as i64 - 1) / n as i64))
}

/// Parameters of one Ferrero-Greenberg instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FgParams {
    pub p: u64,
    /// `Q = q^n`, a power of `p`.
    pub qn: u64,
    pub n: u64,
    pub h: u64,
    pub s: u64,
    pub t: u64,
}

impl FgParams {
    fn validate(&self) -> Result<()> {
        let FgParams { p, qn, n, h, s, t } = *self;
        let fail = |msg: String| Err(Error::ParameterViolation(msg));
        if !is_prime(p) {
            return fail(format!("{p} is not prime"));
        }
        let mut r = qn;
        while r > 1 && r % p == 0 {
            r /= p;
        }
        if r != 1 || qn < p {
            return fail(format!("{qn} is not a power of {p}"));
        }
        if n < 2 || h == 0 {
            return fail("need N ≥ 2 and h ≥ 1".into());
        }
        if !(1..=n).contains(&t) {
            return fail(format!("t = {t} outside [1, {n}]"));
        }
        if s > h {
            return fail(format!("s = {s} outside [0, {h}]"));
        }
        if qn % (n * h) != 1 {
            return fail(format!("{qn} is not 1 mod N·h = {}", n * h));
        }
        Ok(())
    }
}

/// The source set Φ and target set Ψ of the index map.
pub fn fg_sets(params: &FgParams) -> Result<(Vec<i64>, Vec<i64>)> {
    params.validate()?;
    let FgParams { qn, n, h, s, t, .. } = *params;
    let (qn, n, h, s, t) = (qn as i64, n as i64, h as i64, s as i64, t as i64);
    let lo_phi = (h - s + qn * s) / h;
    let phi: Vec<i64> = (lo_phi..qn + lo_phi)
        .filter(|&m| sharp(m, n as u64) as i64 > t)
        .collect();
    let lo_psi = 1 + s * (qn - 1) / (n * h);
    let psi: Vec<i64> = (lo_psi..lo_psi + (n - t) * (qn - 1) / n).collect();
    Ok((phi, psi))
}

/// Bijectivity of `ι: Φ → Ψ`, p-divisibility preservation and `N·ι(m) ≡ m mod Q`.
pub fn fg_check(params: &FgParams) -> Result<bool> {
    let (phi, psi) = fg_sets(params)?;
    let FgParams { p, qn, n, t, .. } = *params;
    let expected = ((n - t) * (qn - 1) / n) as usize;
    if phi.len() != expected || psi.len() != expected {
        return Ok(false);
    }
    let mut image = Vec::with_capacity(phi.len());
    for &m in &phi {
        let i = fg_map(m, n, qn)?;
        if (m.rem_euclid(p as i64) == 0) != (i.rem_euclid(p as i64) == 0) {
            return Ok(false);
        }
        if (n as i64 * i - m).rem_euclid(qn as i64) != 0 {
            return Ok(false);
        }
        image.push(i);
    }
    image.sort_unstable();
    Ok(image == psi)
}

/// Outcome of [`fg_grid`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FgGridReport {
    pub cases: usize,
    pub failures: Vec<FgParams>,
}

/// Every admissible `(p, Q, N, h, s, t)` with `Q ≤ max_q`, `N ∈ moduli`, `h ∈ denominators`.
pub fn fg_grid(max_q: u64, moduli: &[u64], denominators: &[u64]) -> Result<FgGridReport> {
    let mut report = FgGridReport::default();
    for p in (2..=max_q).filter(|&p| is_prime(p)) {
        let mut qn = p;
        while qn <= max_q {
            for &n in moduli {
                for &h in denominators {
                    if qn % (n * h) != 1 {
                        continue;
                    }
                    for s in 0..=h {
                        for t in 1..=n {
                            let params = FgParams { p, qn, n, h, s, t };
                            report.cases += 1;
                            if !fg_check(&params)? {
                                report.failures.push(params);
                            }
                        }
                    }
                }
            }
            qn = match qn.checked_mul(p) {
                Some(x) => x,
                None => break,
            };
        }
    }
    Ok(report)
}

/// Roots of `X² − 3X + 1` modulo `n`.
pub fn golden_roots(n: u64) -> Vec<u64> {
    let ring = ModRing::new(n);
    (0..n)
        .filter(|&e| ring.add(ring.sub(ring.mul(e, e), ring.mul(3 % n, e)), 1 % n) == 0)
        .collect()
}

/// `(1/N) Σ_{1≤d<N} d · (−1 − dε)♭_N`.
pub fn curious_sum(n: u64, eps: u64) -> Rational {
    let total: i128 = (1..n as i64)
        .map(|d| d as i128 * flat(-1 - d * eps as i64, n) as i128)
        .sum();
    Rational::new(BigInt::from(total), BigInt::from(n))
}

/// Whether the curious sum equals `(N − 1)²/4` for every root ε.
pub fn curious_identity(n: u64) -> Result<bool> {
    let roots = golden_roots(n);
    if roots.is_empty() {
        return Err(Error::NoRootMod(n));
    }
    let target = Rational::new(BigInt::from((n - 1) * (n - 1)), BigInt::from(4));
    Ok(roots.iter().all(|&e| curious_sum(n, e) == target))
}

/// `Σ_i Σ_V Σ_x [H_V(x)/N^{k−1} − ((N−1)/2)^k]`; zero whenever the
/// decomposition is complete.
pub fn zero_sum_identity(dec: &Decomposition, rho: &CNResidueMap) -> Result<Rational> {
    if dec.field().degree() < 2 {
        return Err(Error::ParameterViolation("the zero-sum identity needs F ≠ Q".into()));
    }
    let mut acc = Rational::zero();
    for ideal in dec.ideals() {
        for cone in dec.cones() {
            let res = ConeResidues::new(cone, rho)?;
            let base: Vec<u64> = cone
                .parallelotope_points(&ideal.inverse_lattice)?
                .iter()
                .map(|x| rho.residue(x))
                .collect::<Result<_>>()?;
            acc += zero_sum(&res, &base);
        }
    }
    Ok(acc)
}

/// Which points enter a [`line_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineSumVariant {
    /// `0 ≤ m < p^n`, units only.
    Full,
    /// Also keeps p-divisible points, weighted by the unit part of their norm.
    WithNonUnits,
    /// `0 ≤ m < p^n − 1`: one point short of a full period.
    DropLast,
}

/// `Σ_{0≤m<p^n, gcd(p, a+m·v)=1} ψ(a + m·v) ⟨Nm(a + m·v)⟩^{−s}`.
#[allow(clippy::too_many_arguments)]
pub fn line_sum(
    field: &FieldData,
    a: &FieldElement,
    v: &FieldElement,
    psi: &PsiCharacter,
    s: &PadicExponent,
    p: u64,
    n: u32,
    digits: u32,
    variant: LineSumVariant,
) -> Result<Padic> {
    let emb = PadicEmbedding::new(p, digits)?;
    let pn = pow_checked(p, n)?;
    let end = if variant == LineSumVariant::DropLast { pn - 1 } else { pn };
    let mut acc = Padic::zero(p, digits as i64);
    for m in 0..end {
        let y = a.add(&v.scale(&Rational::from_integer(m.into())));
        let nm = Padic::from_rational(p, &field.norm(&y), digits)?;
        match nm.valuation() {
            Some(0) => {
                let term = emb.embed(&psi.value(field, p, &y)?)?.mul(&padic::power(&nm, s)?);
                acc = acc.add(&term);
            }
            Some(vn) if variant == LineSumVariant::WithNonUnits => {
                let scale = Rational::new(BigInt::one(), BigInt::from(p).pow(vn as u32));
                let u = nm.mul(&Padic::from_rational(p, &scale, digits)?);
                acc = acc.add(&padic::power(&u, s)?);
            }
            _ => {}
        }
    }
    Ok(acc)
}

/// The line-sum congruence: the sum over a full period `p^n` vanishes modulo
/// `p^{n−t}` for ψ of level `p^t` (`t ≥ 1`).
#[allow(clippy::too_many_arguments)]
pub fn line_sum_congruence(
    field: &FieldData,
    a: &FieldElement,
    v: &FieldElement,
    psi: &PsiCharacter,
    s: &PadicExponent,
    p: u64,
    n: u32,
    variant: LineSumVariant,
) -> Result<bool> {
    let t = psi.level_exp().max(1);
    if n < t {
        return Err(Error::ParameterViolation(format!("n = {n} < t = {t}")));
    }
    let target = (n - t) as i64;
    let sum = line_sum(field, a, v, psi, s, p, n, n + padic::GUARD_DIGITS, variant)?;
    Ok(sum.valuation().is_none_or(|v| v >= target))
}

/// Both sides of the shifted-box reindexing at `s = 0` for `x = (c/h)·v`:
/// the direct sum `Σ_{l<Q, gcd(p, x+l·v)=1} Σ_{0≤d<l♭} χ(x + d·v)` and
/// `Σ_{1≤d≤N} χ(x + (d−1)·v) · #{L₀ ≤ l < L₀ + Q : gcd(p, l·v)=1, l♯ > d}`
/// with `L₀ = (c + Q(h − c))/h`.
pub fn reindexing_check(cfg: &LSeriesConfig, cone: usize, x: &FieldElement, level: u32) -> Result<(CycloValue, CycloValue)> {
    let chi = cfg.require_chi()?;
    let c = cfg.cone(cone)?;
    let n_mod = cfg.modulus();
    let k = c.degree();
    let xv = c.v_coords(x);
    let h = xv.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let h = u64::try_from(h).map_err(|_| Error::ParameterViolation("denominator too large".into()))?;
    if !(cfg.q() - 1).is_multiple_of(n_mod * h) {
        return Err(Error::ParameterViolation(format!("q = {} is not 1 mod N·h = {}", cfg.q(), n_mod * h)));
    }
    let qn = cfg
        .q()
        .checked_pow(level)
        .ok_or_else(|| Error::InstanceTooLarge("q^n overflows".into()))?;
    let hr = Rational::from_integer(h.into());
    let cs: Vec<i64> = xv
        .iter()
        .map(|r| i64::try_from((r * &hr).to_integer()).map_err(|_| Error::ParameterViolation("coordinate too large".into())))
        .collect::<Result<_>>()?;
    let lo: Vec<u64> = cs
        .iter()
        .map(|&ci| {
            let num = ci as i128 + qn as i128 * (h as i128 - ci as i128);
            u64::try_from(num / h as i128).map_err(|_| Error::ParameterViolation("negative shift".into()))
        })
        .collect::<Result<_>>()?;
    let field = cfg.decomposition().field();
    let res = ConeResidues::new(c, cfg.rho())?;
    let rx = cfg.rho().residue(x)?;
    let m = chi.order();
    let chi_at = |d: &[u64]| chi.residue_character().exponent((rx + res.dot(d)) % n_mod);
    let count = |poly: &crate::arith::mpoly::MPoly, lo: Vec<u64>| {
        let spec = BoxSpec {
            poly,
            lo,
            len: qn,
            n_bins: n_mod,
            p: cfg.p(),
            modulus: cfg.p(),
            weight: Weight::Count,
            filter: Filter::Units,
            psi: &PsiEval::Trivial,
            psi_order: 1,
        };
        run_box(&spec, cfg.exec())
    };
    let decode = |mut idx: usize| -> Vec<u64> {
        (0..k)
            .map(|_| {
                let d = (idx % n_mod as usize) as u64;
                idx /= n_mod as usize;
                d
            })
            .collect()
    };

    // direct: classes of l mod N at base point x
    let direct_bins = count(&norm_polynomial(field, x, c.generators()), vec![0; k])?;
    let mut direct = RootSum::new(m);
    for (idx, &cnt) in direct_bins.bins.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        crate::measure::for_each_ranges(&decode(idx), |d| {
            if let Some(e) = chi_at(d) {
                direct.add(e, cnt as i128);
            }
        });
    }

    // reindexed: classes of l' mod N on the shifted box at the origin
    let shifted = count(&norm_polynomial(field, &FieldElement::zero(k), c.generators()), lo)?;
    let mut reindexed = RootSum::new(m);
    for (idx, &cnt) in shifted.bins.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        let l_sharp: Vec<u64> = decode(idx).iter().map(|&r| if r == 0 { n_mod } else { r }).collect();
        // d ∈ [1, N]^k with d < l♯, i.e. d − 1 ∈ [0, l♯ − 1)
        let bounds: Vec<u64> = l_sharp.iter().map(|&s| s - 1).collect();
        crate::measure::for_each_ranges(&bounds, |d| {
            if let Some(e) = chi_at(d) {
                reindexed.add(e, cnt as i128);
            }
        });
    }
    Ok((direct.to_cyclo(), reindexed.to_cyclo()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn fg_example_q16() {
        let params = FgParams { p: 2, qn: 16, n: 5, h: 1, s: 1, t: 3 };
        let (phi, psi) = fg_sets(&params).unwrap();
        assert_eq!(phi, vec![19, 20, 24, 25, 29, 30]);
        assert_eq!(psi, (4..=9).collect::<Vec<_>>());
        assert_eq!(fg_map(19, 5, 16).unwrap(), 7);
        assert_eq!(fg_map(20, 5, 16).unwrap(), 4);
        assert_eq!(fg_map(24, 5, 16).unwrap(), 8);
        assert!(fg_check(&params).unwrap());
        assert!(matches!(
            fg_check(&FgParams { t: 0, ..params }),
            Err(Error::ParameterViolation(_))
        ));
        assert!(matches!(fg_map(3, 5, 8), Err(Error::ParameterViolation(_))));
    }

    #[test]
    fn curious_examples() {
        assert_eq!(golden_roots(5), vec![4]);
        assert_eq!(curious_sum(5, 4), int(4));
        assert_eq!(golden_roots(11), vec![5, 9]);
        assert_eq!(curious_sum(11, 5), int(25));
        assert_eq!(curious_sum(11, 9), int(25));
        assert!(curious_identity(19).unwrap());
        assert_eq!(curious_identity(7), Err(Error::NoRootMod(7)));
    }
}
