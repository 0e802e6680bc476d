//! Truncated sum expressions for `L_{F,p}` and `L_{p,V,x}`, their values at
//! `s = 0`, the multiple Gamma function and the derivative formulas.
//!
//! A truncation at level `n` sums over `l ∈ [0, q^n)^k` where `q` is the least
//! power of `p` congruent to 1 modulo N.

pub mod gamma;
pub mod identities;
pub mod kernel;
pub mod reference;

use std::time::{Duration, Instant};

use num_traits::One;

use crate::arith::modint::{mult_order, val_rational};
use crate::arith::{CycloValue, Rational, RootSum};
use crate::characters::{integral_residue, HeckeCharacter, PadicEmbedding, PsiCharacter};
use crate::cones::{ConeContext, Decomposition};
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldElement};
use crate::measure::{coeff_a, ConeResidues};
use crate::padic::{self, pow_checked, Padic, PadicExponent};
use crate::par::Exec;

pub use gamma::{gamma_multiple, morita_gamma, GammaQuery, GammaValue};
use kernel::{norm_polynomial, run_box, BoxSpec, BoxSum, Filter, PsiEval, Weight};

/// Least `q = p^j > 1` with `q ≡ 1 mod m`.
pub fn minimal_q(p: u64, m: u64) -> Result<u64> {
    padic::check_prime(p)?;
    if m.is_multiple_of(p) {
        return Err(Error::ParameterViolation(format!("p = {p} divides {m}")));
    }
    let j = if m <= 1 { 1 } else { mult_order(p % m, m) };
    pow_checked(p, j as u32)
}

/// Everything a sum expression depends on besides `s` and the level.
#[derive(Clone, Debug)]
pub struct LSeriesConfig {
    decomposition: Decomposition,
    rho: CNResidueMap,
    chi: Option<HeckeCharacter>,
    psi: PsiCharacter,
    p: u64,
    precision: u32,
    q: u64,
    exec: Exec,
}

impl LSeriesConfig {
    fn build(decomposition: Decomposition, rho: CNResidueMap, chi: Option<HeckeCharacter>, p: u64, precision: u32) -> Result<Self> {
        padic::check_prime(p)?;
        pow_checked(p, precision)?;
        if precision == 0 {
            return Err(Error::ParameterViolation("precision must be positive".into()));
        }
        let q = minimal_q(p, rho.modulus())?;
        Ok(LSeriesConfig {
            decomposition,
            rho,
            chi,
            psi: PsiCharacter::Trivial,
            p,
            precision,
            q,
            exec: Exec::best(),
        })
    }

    /// Zeta mode: the partial zeta measure `μ_{F,N}`.
    pub fn zeta(decomposition: Decomposition, rho: CNResidueMap, p: u64, precision: u32) -> Result<Self> {
        Self::build(decomposition, rho, None, p, precision)
    }

    /// Dirichlet mode for a character with nontrivial narrow modulus.
    pub fn dirichlet(decomposition: Decomposition, chi: HeckeCharacter, p: u64, precision: u32) -> Result<Self> {
        chi.require_nontrivial()?;
        let rho = chi.rho().clone();
        Self::build(decomposition, rho, Some(chi), p, precision)
    }

    pub fn with_psi(mut self, psi: PsiCharacter) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Uses the least `q ≡ 1 mod N·h`, as needed when base points have denominator `h`.
    pub fn with_denominator(mut self, h: u64) -> Result<Self> {
        self.q = minimal_q(self.p, self.rho.modulus() * h)?;
        Ok(self)
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn rho(&self) -> &CNResidueMap {
        &self.rho
    }

    pub fn chi(&self) -> Option<&HeckeCharacter> {
        self.chi.as_ref()
    }

    pub fn psi(&self) -> &PsiCharacter {
        &self.psi
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn modulus(&self) -> u64 {
        self.rho.modulus()
    }

    pub fn embedding(&self) -> Result<PadicEmbedding> {
        PadicEmbedding::new(self.p, self.precision)
    }

    fn require_chi(&self) -> Result<&HeckeCharacter> {
        self.chi
            .as_ref()
            .ok_or_else(|| Error::InvalidQuery("operation needs a Dirichlet-mode configuration".into()))
    }

    fn cone(&self, index: usize) -> Result<&ConeContext> {
        self.decomposition
            .cones()
            .get(index)
            .ok_or_else(|| Error::InvalidQuery(format!("no cone {index}")))
    }

    fn ideal_lattice(&self, index: usize) -> Result<&[FieldElement]> {
        self.decomposition
            .ideals()
            .get(index)
            .map(|i| i.inverse_lattice.as_slice())
            .ok_or_else(|| Error::InvalidQuery(format!("no ideal class {index}")))
    }

    /// `P(V) ∩ a_i⁻¹` for every cone, indexed `[cone][point]`.
    pub fn points(&self, ideal: usize) -> Result<Vec<Vec<FieldElement>>> {
        let lattice = self.ideal_lattice(ideal)?;
        self.decomposition
            .cones()
            .iter()
            .map(|c| c.parallelotope_points(lattice))
            .collect()
    }

    /// Checks `L_V ⊗ Z_p = O_p` for every cone.
    pub fn check_assumption_op(&self) -> Result<()> {
        let basis = self.decomposition.field().integral_basis();
        for cone in self.decomposition.cones() {
            let index = cone.lattice_index(basis)?;
            if index % self.p == 0 {
                return Err(Error::AssumptionOpViolated(index));
            }
        }
        Ok(())
    }

    fn require_inert(&self) -> Result<()> {
        if self.decomposition.field().is_inert(self.p) {
            Ok(())
        } else {
            Err(Error::PNotInert(self.p))
        }
    }
}

/// One truncation `S_n` of a sum expression.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub level: u32,
    pub p: u64,
    /// Digits to which each term was computed.
    pub precision: u32,
    /// `S_n` on the p-adic side; `None` when a character value has no
    /// embedding into `Q_p`.
    pub value: Option<Padic>,
    /// Exact `S_n` when every weight is rational (s = 0, ψ trivial).
    pub exact: Option<CycloValue>,
    /// `v_p(S_n − S_{n−1})`, capped at the working precision.
    pub distance: Option<i64>,
    pub terms: u64,
    pub unit_terms: u64,
    pub elapsed: Duration,
}

/// p-adic valuation of a cyclotomic number for `p` prime to its order.
pub fn cyclo_valuation(v: &CycloValue, p: u64) -> Option<i64> {
    v.coeffs().iter().filter_map(|c| val_rational(p, c)).min()
}

/// Fills `distance` from consecutive entries.
pub fn fill_distances(reports: &mut [TruncationReport]) {
    for i in 1..reports.len() {
        let (a, b) = (&reports[i - 1], &reports[i]);
        let cap = a.precision.min(b.precision) as i64;
        let d = match (&a.exact, &b.exact, &a.value, &b.value) {
            (Some(x), Some(y), _, _) => Some(cyclo_valuation(&(y - x), b.p).map_or(cap, |v| v.min(cap))),
            (_, _, Some(x), Some(y)) => Some(y.distance(x).min(cap)),
            _ => None,
        };
        reports[i].distance = d;
    }
}

/// Which sum expression to truncate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumKind {
    /// Zeta form with weights `ψω_F⁻¹(y)⟨Nm y⟩^{−s}`: approximates
    /// `(1 − ψ(N)⟨N⟩^{1−s}) L_{F,p}(s, ψ)`.
    Zeta,
    /// Zeta form with weights `ψ(y)⟨Nm y⟩^{−s}`: approximates
    /// `(1 − ψ(N)⟨N⟩^{1−s}) L_{F,p}(s, ψω_F)`, which vanishes at `s = 0` for
    /// trivial ψ and `F ≠ Q`.
    ZetaTwisted,
    /// Dirichlet form: approximates `L_{F,p}(s, χψω_F)`.
    Chi,
    /// A single `L_{p,V,x}(s, χω_F)`.
    Line { cone: usize, ideal: usize, x: FieldElement },
}

/// `(−1)^k Σ_{0≤d<r} χ(x + d·v)` for every class `r ∈ [0, N)^k`.
fn chi_coefficients(chi: &HeckeCharacter, res: &ConeResidues, rx: u64) -> Vec<CycloValue> {
    let n = res.modulus();
    let k = res.degree();
    let m = chi.order();
    let classes = (n as usize).pow(k as u32);
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    // χ(x + d·v) exponents on the full box, then box prefix sums
    let mut out = Vec::with_capacity(classes);
    for idx in 0..classes {
        let r = decode(idx as u64, n, k);
        let mut acc = RootSum::new(m);
        crate::measure::for_each_ranges(&r, |d| {
            let y = (rx + res.dot(d)) % n;
            if let Some(e) = chi.residue_character().exponent(y) {
                acc.add(e, sign);
            }
        });
        out.push(acc.to_cyclo());
    }
    out
}

fn decode(mut idx: u64, n: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = idx % n;
            idx /= n;
            d
        })
        .collect()
}

/// `a_{V,N}(x + r·v)` for every class `r ∈ [0, N)^k`.
fn zeta_coefficients(res: &ConeResidues, rx: u64) -> Vec<Rational> {
    let n = res.modulus();
    let k = res.degree();
    (0..(n as usize).pow(k as u32))
        .map(|idx| {
            let r = decode(idx as u64, n, k);
            coeff_a(res, (rx + res.dot(&r)) % n)
        })
        .collect()
}

/// Integer exponent `e` with `⟨y⟩^{-s} = ⟨y⟩^e` to `digits` digits, and those digits.
fn power_exponent(p: u64, s: &PadicExponent, precision: u32) -> Result<(u64, u32)> {
    let sv = s.value();
    let digits = (precision as i64).min(sv.abs_precision() + 1);
    if digits <= 0 {
        return Err(Error::PrecisionExhausted);
    }
    let digits = digits as u32;
    let m = pow_checked(p, digits - 1)?;
    if m == 1 {
        return Ok((0, digits));
    }
    let r = sv.residue(digits - 1)?;
    Ok(((m - r) % m, digits))
}

impl LSeriesConfig {
    fn psi_eval(&self, cone: &ConeContext, x: &FieldElement) -> Result<PsiEval> {
        match &self.psi {
            psi if psi.is_trivial() => Ok(PsiEval::Trivial),
            PsiCharacter::NormComposite { level_exp, inner } => {
                let modulus = pow_checked(self.p, *level_exp)?;
                Ok(PsiEval::Norm { modulus, exps: (0..modulus).map(|r| inner.exponent(r)).collect() })
            }
            PsiCharacter::Table { level_exp, table, .. } => {
                let modulus = pow_checked(self.p, *level_exp)?;
                let field = self.decomposition.field();
                let base = integral_residue(field, x, modulus)?;
                let steps = cone
                    .generators()
                    .iter()
                    .map(|v| integral_residue(field, v, modulus))
                    .collect::<Result<_>>()?;
                Ok(PsiEval::Table { modulus, base, steps, table: table.clone() })
            }
            PsiCharacter::Trivial => unreachable!(),
        }
    }

    /// Bins of one `(V, x)` box at level `n`.
    fn bins(&self, cone: &ConeContext, x: &FieldElement, n: u32, weight: Weight, filter: Filter, modulus: u64) -> Result<BoxSum> {
        let k = cone.degree();
        let len = self
            .q
            .checked_pow(n)
            .ok_or_else(|| Error::InstanceTooLarge(format!("q^{n} overflows")))?;
        let poly = norm_polynomial(self.decomposition.field(), x, cone.generators());
        let psi = self.psi_eval(cone, x)?;
        let spec = BoxSpec {
            poly: &poly,
            lo: vec![0; k],
            len,
            n_bins: self.modulus(),
            p: self.p,
            modulus,
            weight,
            filter,
            psi: &psi,
            psi_order: self.psi.order(),
        };
        run_box(&spec, self.exec)
    }

    /// `ψ(a_i)`; only the unit ideal is supported for nontrivial ψ.
    fn psi_on_ideal(&self, i: usize) -> Result<CycloValue> {
        let ideal = &self.decomposition.ideals()[i];
        if self.psi.is_trivial() {
            return Ok(CycloValue::one(1));
        }
        if ideal.norm.is_one() && self.decomposition.ideals().len() == 1 {
            return Ok(CycloValue::one(1));
        }
        Err(Error::PsiLevelUnsupported)
    }

    fn ideal_norm_power(&self, i: usize, s: &PadicExponent, digits: u32) -> Result<Padic> {
        let nm = Padic::from_rational(self.p, &self.decomposition.ideals()[i].norm, digits)?;
        if nm.valuation() != Some(0) {
            return Err(Error::NotCoprimeToP(self.p));
        }
        padic::power(&nm, s)
    }

    fn combine_padic(&self, bins: &BoxSum, coeffs: &[Padic], digits: u32) -> Result<Padic> {
        let emb = PadicEmbedding::new(self.p, digits)?;
        let m_psi = self.psi.order().max(1) as usize;
        let roots: Vec<Padic> = (0..m_psi as u32).map(|e| emb.root(m_psi as u32, e)).collect::<Result<_>>()?;
        let mut acc = Padic::zero(self.p, digits as i64);
        for (cls, c) in coeffs.iter().enumerate() {
            for (e, root) in roots.iter().enumerate() {
                let b = bins.bins[cls * m_psi + e];
                if b != 0 {
                    acc = acc.add(&c.mul(root).mul(&Padic::new(self.p, 0, b, digits)?));
                }
            }
        }
        Ok(acc)
    }

    /// `S_n` of the requested sum expression.
    pub fn truncate(&self, kind: &SumKind, s: &PadicExponent, n: u32) -> Result<TruncationReport> {
        let start = Instant::now();
        let mut report = match kind {
            SumKind::Zeta => self.zeta_sum(s, n, 1)?,
            SumKind::ZetaTwisted => self.zeta_sum(s, n, 0)?,
            SumKind::Chi => self.chi_sum(s, n, None)?,
            SumKind::Line { cone, ideal, x } => self.chi_sum(s, n, Some((*cone, *ideal, x)))?,
        };
        report.elapsed = start.elapsed();
        Ok(report)
    }

    /// `S_0, …, S_max` with distances filled in.
    pub fn truncations(&self, kind: &SumKind, s: &PadicExponent, max_level: u32) -> Result<Vec<TruncationReport>> {
        let mut out = (0..=max_level).map(|n| self.truncate(kind, s, n)).collect::<Result<Vec<_>>>()?;
        fill_distances(&mut out);
        Ok(out)
    }

    fn zeta_sum(&self, s: &PadicExponent, n: u32, omega_inv: u32) -> Result<TruncationReport> {
        if self.chi.is_some() {
            return Err(Error::InvalidQuery("zeta sum needs a zeta-mode configuration".into()));
        }
        let (e, digits) = power_exponent(self.p, s, self.precision)?;
        let modulus = pow_checked(self.p, digits)?;
        let emb = PadicEmbedding::new(self.p, digits)?;
        let mut total = Padic::zero(self.p, digits as i64);
        let (mut terms, mut units) = (0, 0);
        for i in 0..self.decomposition.ideals().len() {
            let nm = &self.decomposition.ideals()[i].norm;
            let nm_p = Padic::from_rational(self.p, nm, digits)?;
            let mut factor = emb.embed(&self.psi_on_ideal(i)?)?.mul(&self.ideal_norm_power(i, s, digits)?);
            if omega_inv == 1 {
                factor = factor.mul(&padic::teichmuller(&nm_p)?.inv()?);
            }
            let points = self.points(i)?;
            for (cone, xs) in self.decomposition.cones().iter().zip(&points) {
                let res = ConeResidues::new(cone, &self.rho)?;
                for x in xs {
                    let rx = self.rho.residue(x)?;
                    let bins = self.bins(cone, x, n, Weight::Power { e, omega_inv }, Filter::Units, modulus)?;
                    let coeffs: Vec<Padic> = zeta_coefficients(&res, rx)
                        .iter()
                        .map(|c| Padic::from_rational(self.p, c, digits))
                        .collect::<Result<_>>()?;
                    total = total.add(&factor.mul(&self.combine_padic(&bins, &coeffs, digits)?));
                    terms += bins.visited;
                    units += bins.contributing;
                }
            }
        }
        Ok(TruncationReport {
            level: n,
            p: self.p,
            precision: digits,
            value: Some(total),
            exact: None,
            distance: None,
            terms,
            unit_terms: units,
            elapsed: Duration::ZERO,
        })
    }

    fn chi_sum(&self, s: &PadicExponent, n: u32, line: Option<(usize, usize, &FieldElement)>) -> Result<TruncationReport> {
        let chi = self.require_chi()?;
        let exact_path = s.is_zero() && self.psi.is_trivial();
        let (e, digits) = power_exponent(self.p, s, self.precision)?;
        let modulus = pow_checked(self.p, digits)?;
        let emb = PadicEmbedding::new(self.p, digits)?;

        // (ideal factor, cone, x) triples
        let mut jobs: Vec<(usize, &ConeContext, FieldElement)> = Vec::new();
        match line {
            Some((c, i, x)) => {
                self.ideal_lattice(i)?;
                jobs.push((usize::MAX, self.cone(c)?, x.clone()));
            }
            None => {
                for i in 0..self.decomposition.ideals().len() {
                    for (cone, xs) in self.decomposition.cones().iter().zip(self.points(i)?) {
                        for x in xs {
                            jobs.push((i, cone, x));
                        }
                    }
                }
            }
        }

        let mut exact = CycloValue::zero(1);
        let mut total = Padic::zero(self.p, digits as i64);
        let (mut terms, mut units) = (0, 0);
        for (i, cone, x) in &jobs {
            let res = ConeResidues::new(cone, &self.rho)?;
            let rx = self.rho.residue(x)?;
            let coeffs = chi_coefficients(chi, &res, rx);
            let ideal_chi = if *i == usize::MAX { CycloValue::one(1) } else { chi.evaluate_ideal(*i)? };
            if exact_path {
                let bins = self.bins(cone, x, n, Weight::Count, Filter::Units, self.p)?;
                let mut part = CycloValue::zero(1);
                for (c, &b) in coeffs.iter().zip(&bins.bins) {
                    if b != 0 {
                        part = &part + &c.scale(&Rational::from_integer(b.into()));
                    }
                }
                exact = &exact + &(&ideal_chi * &part);
                terms += bins.visited;
                units += bins.contributing;
            } else {
                let factor = if *i == usize::MAX {
                    Padic::one(self.p, digits)?
                } else {
                    emb.embed(&(&ideal_chi * &self.psi_on_ideal(*i)?))?
                        .mul(&self.ideal_norm_power(*i, s, digits)?)
                };
                let bins = self.bins(cone, x, n, Weight::Power { e, omega_inv: 0 }, Filter::Units, modulus)?;
                let cp: Vec<Padic> = coeffs.iter().map(|c| emb.embed(c)).collect::<Result<_>>()?;
                total = total.add(&factor.mul(&self.combine_padic(&bins, &cp, digits)?));
                terms += bins.visited;
                units += bins.contributing;
            }
        }
        let (value, exact) = if exact_path {
            let v = match emb.embed(&exact) {
                Ok(v) => Some(v),
                Err(Error::EmbeddingUnavailable { .. }) => None,
                Err(err) => return Err(err),
            };
            (v, Some(exact))
        } else {
            (Some(total), None)
        };
        Ok(TruncationReport {
            level: n,
            p: self.p,
            precision: digits,
            value,
            exact,
            distance: None,
            terms,
            unit_terms: units,
            elapsed: Duration::ZERO,
        })
    }
}

/// `S_n` of the zeta sum expression.
pub fn sum_expr_zeta(cfg: &LSeriesConfig, s: &PadicExponent, n: u32) -> Result<TruncationReport> {
    cfg.truncate(&SumKind::Zeta, s, n)
}

/// `S_n` of the Dirichlet sum expression.
pub fn sum_expr_chi(cfg: &LSeriesConfig, s: &PadicExponent, n: u32) -> Result<TruncationReport> {
    cfg.truncate(&SumKind::Chi, s, n)
}

/// `S_n` of the single-cone sum for `L_{p,V,x}(s, χω_F)`.
pub fn l_px_sum(cfg: &LSeriesConfig, cone: usize, ideal: usize, x: &FieldElement, s: &PadicExponent, n: u32) -> Result<TruncationReport> {
    cfg.truncate(&SumKind::Line { cone, ideal, x: x.clone() }, s, n)
}

/// `L_{V,x}(0, χ) = (−1)^k N^{−k} Σ_{0≤d<N} χ(x + d·v) Π d_i`.
pub fn special_value_complex0(chi: &HeckeCharacter, cone: &ConeContext, x: &FieldElement) -> Result<CycloValue> {
    chi.require_nontrivial()?;
    let rho = chi.rho();
    let res = ConeResidues::new(cone, rho)?;
    let rx = rho.residue(x)?;
    let n = rho.modulus();
    let k = cone.degree();
    let mut acc = RootSum::new(chi.order());
    crate::measure::for_each_box(k, n, |d| {
        if let Some(e) = chi.residue_character().exponent((rx + res.dot(d)) % n) {
            acc.add(e, d.iter().map(|&di| di as i128).product());
        }
    });
    let scale = Rational::new(if k.is_multiple_of(2) { 1.into() } else { (-1).into() }, num_bigint::BigInt::from(n).pow(k as u32));
    Ok(acc.to_cyclo().scale(&scale))
}

/// `L_{p,V,x}(0, χω_F) = L_{V,x}(0, χ) − χ(p) L_{V,τ_p⁻¹x}(0, χ)` for inert `p`.
pub fn l_px_value0(cfg: &LSeriesConfig, cone: usize, ideal: usize, x: &FieldElement) -> Result<CycloValue> {
    let chi = cfg.require_chi()?;
    cfg.require_inert()?;
    cfg.check_assumption_op()?;
    let c = cfg.cone(cone)?;
    let lattice = cfg.ideal_lattice(ideal)?;
    let x_inv = c.tau_p_inv(lattice, x, cfg.p)?;
    let a = special_value_complex0(chi, c, x)?;
    let b = special_value_complex0(chi, c, &x_inv)?;
    let chi_p = chi.evaluate_int(cfg.p as i64)?;
    Ok(&a - &(&chi_p * &b))
}

/// `Σ_i χ(a_i) Σ_V Σ_x L_{p,V,x}(0, χω_F) = L_{F,p}(0, χω_F)`.
pub fn l_value0(cfg: &LSeriesConfig) -> Result<CycloValue> {
    let chi = cfg.require_chi()?;
    let mut acc = CycloValue::zero(1);
    for i in 0..cfg.decomposition.ideals().len() {
        for (c, xs) in cfg.points(i)?.iter().enumerate() {
            for x in xs {
                acc = &acc + &(&chi.evaluate_ideal(i)? * &l_px_value0(cfg, c, i, x)?);
            }
        }
    }
    Ok(acc)
}

/// `log_p Γ_{F,p,V}((x + d·v)/N)` for every `d` with `χ(x + d·v) ≠ 0`, with
/// the residue `ρ(x + d·v)` and the embedded character value.
struct GammaTerm {
    residue: u64,
    chi: Option<CycloValue>,
    log: Padic,
}

fn gamma_terms(cfg: &LSeriesConfig, cone: &ConeContext, x: &FieldElement, m: u32, only_units: bool) -> Result<Vec<GammaTerm>> {
    let n = cfg.modulus();
    let k = cone.degree();
    let res = ConeResidues::new(cone, &cfg.rho)?;
    let rx = cfg.rho.residue(x)?;
    let xv = cone.v_coords(x);
    let nr = Rational::from_integer(n.into());
    let mut ds = Vec::new();
    crate::measure::for_each_box(k, n, |d| ds.push(d.to_vec()));
    let mut out = Vec::new();
    for d in ds {
        let residue = (rx + res.dot(&d)) % n;
        let chi = match cfg.chi.as_ref() {
            Some(c) => c.residue_character().exponent(residue).map(|_| c.residue_character().value(residue)),
            None => None,
        };
        if only_units && chi.is_none() {
            continue;
        }
        let y: Vec<Rational> = xv
            .iter()
            .zip(&d)
            .map(|(a, &di)| (a + Rational::from_integer(di.into())) / &nr)
            .collect();
        let g = gamma_multiple(cone, cfg.p, &GammaQuery { y, precision: m, m_prime: None }, cfg.exec)?;
        out.push(GammaTerm { residue, chi, log: g.log });
    }
    Ok(out)
}

/// `L′_{p,V,x}(0, χω_F) = (−1)^{k−1} Σ_{0≤d<N} χ(x + d·v) log_p Γ_{F,p,V}((x + d·v)/N)
/// − k log_p(N) L_{p,V,x}(0, χω_F)`, to `m` digits.
pub fn derivative0(cfg: &LSeriesConfig, cone: usize, ideal: usize, x: &FieldElement, m: u32) -> Result<Padic> {
    let value0 = l_px_value0(cfg, cone, ideal, x)?;
    let c = cfg.cone(cone)?;
    let k = c.degree();
    let emb = PadicEmbedding::new(cfg.p, m + padic::GUARD_DIGITS)?;
    let mut acc = Padic::zero(cfg.p, m as i64);
    for t in gamma_terms(cfg, c, x, m, true)? {
        acc = acc.add(&emb.embed(t.chi.as_ref().expect("filtered"))?.mul(&t.log));
    }
    if k % 2 == 0 {
        acc = acc.neg();
    }
    let log_n = padic::iwasawa_log(&Padic::from_int(cfg.p, cfg.modulus() as i64, m + padic::GUARD_DIGITS)?)?;
    let tail = log_n.scale_int(-(k as i64)).mul(&emb.embed(&value0)?);
    Ok(acc.add(&tail).truncate(m as i64))
}

/// `L′_{F,p}(0, χω_F)` for inert `p` with `χ(p) = 1`, after checking that
/// `Σ_x L_{p,V,x}(0, χω_F)` vanishes for every cone and ideal class.
pub fn global_derivative0(cfg: &LSeriesConfig, m: u32) -> Result<Padic> {
    let chi = cfg.require_chi()?;
    let emb = PadicEmbedding::new(cfg.p, m + padic::GUARD_DIGITS)?;
    let mut acc = Padic::zero(cfg.p, m as i64);
    for i in 0..cfg.decomposition.ideals().len() {
        let chi_a = emb.embed(&chi.evaluate_ideal(i)?)?;
        for (c, xs) in cfg.points(i)?.iter().enumerate() {
            let mut vanishing = CycloValue::zero(1);
            for x in xs {
                vanishing = &vanishing + &l_px_value0(cfg, c, i, x)?;
            }
            if !vanishing.is_zero() {
                return Err(Error::IdentityFailed(format!(
                    "Σ_x L_(p,V,x)(0) = {vanishing} ≠ 0 for cone {c}, ideal class {i}"
                )));
            }
            let cone = cfg.cone(c)?;
            for x in xs {
                for t in gamma_terms(cfg, cone, x, m, true)? {
                    acc = acc.add(&chi_a.mul(&emb.embed(t.chi.as_ref().expect("filtered"))?).mul(&t.log));
                }
            }
        }
    }
    let k = cfg.decomposition.field().degree();
    if k.is_multiple_of(2) {
        acc = acc.neg();
    }
    Ok(acc.truncate(m as i64))
}

/// Right-hand side of the Brumer-Stark relation for every residue class `y mod N`:
/// `(−1)^k Σ_x Σ_{0≤d<N, x+d·v ≡ y} log_p Γ_{F,p,V}((x + d·v)/N)`.
pub fn brumer_stark_rhs_all(cfg: &LSeriesConfig, m: u32) -> Result<Vec<Padic>> {
    let n = cfg.modulus();
    let k = cfg.decomposition.field().degree();
    let mut out = vec![Padic::zero(cfg.p, m as i64); n as usize];
    let points = cfg.points(0)?;
    for (c, xs) in points.iter().enumerate() {
        let cone = cfg.cone(c)?;
        for x in xs {
            for t in gamma_terms(cfg, cone, x, m, false)? {
                let slot = &mut out[t.residue as usize];
                *slot = slot.add(&t.log);
            }
        }
    }
    if k % 2 == 1 {
        out.iter_mut().for_each(|v| *v = v.neg());
    }
    Ok(out.into_iter().map(|v| v.truncate(m as i64)).collect())
}

/// The Brumer-Stark right-hand side for the class `y mod N`.
pub fn brumer_stark_rhs(cfg: &LSeriesConfig, y: &FieldElement, m: u32) -> Result<Padic> {
    let r = cfg.rho.residue(y)?;
    Ok(brumer_stark_rhs_all(cfg, m)?[r as usize])
}
