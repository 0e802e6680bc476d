//! Verification suites run by `shintani verify`.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use shintani::arith::{CycloValue, Rational};
use shintani::characters::{PadicEmbedding, PsiCharacter};
use shintani::lseries::identities::{curious_identity, curious_sum, fg_grid, golden_roots, line_sum_congruence, zero_sum_identity, LineSumVariant};
use shintani::lseries::{self, cyclo_valuation, LSeriesConfig};
use shintani::measure::{MeasureKind, MeasureSpec, PeriodQuery};
use shintani::padic::{Padic, PadicExponent};
use shintani::Error;

use crate::manifest::{InstanceSpec, Kind, RunManifest, Suite};
use crate::report;
use crate::setup;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub instance: Option<String>,
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(suite: Suite, instance: Option<&str>, name: &str, pass: bool, detail: Value) -> Self {
        Check { suite: suite.name(), instance: instance.map(str::to_string), name: name.to_string(), pass, detail }
    }

    fn error(suite: Suite, instance: Option<&str>, name: &str, err: impl ToString) -> Self {
        Self::new(suite, instance, name, false, json!({ "error": err.to_string() }))
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<&'static str>,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
    /// Wall-clock milliseconds per suite; the only nondeterministic field.
    pub timings: BTreeMap<&'static str, u128>,
}

/// Runs every selected suite concurrently; checks are ordered by suite name.
pub fn run(manifest: &RunManifest) -> Report {
    let results: Vec<(Suite, Vec<Check>, u128)> = std::thread::scope(|scope| {
        let handles: Vec<_> = manifest
            .suites
            .iter()
            .map(|&suite| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let checks = run_suite(suite, manifest);
                    (suite, checks, start.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
    });
    let mut checks = Vec::new();
    let mut timings = BTreeMap::new();
    let mut sorted = results;
    sorted.sort_by_key(|r| r.0);
    for (suite, c, ms) in sorted {
        checks.extend(c);
        timings.insert(suite.name(), ms);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    Report {
        seed: manifest.seed,
        suites: manifest.suites.iter().map(|s| s.name()).collect(),
        passed,
        failed: checks.len() - passed,
        checks,
        timings,
    }
}

fn run_suite(suite: Suite, manifest: &RunManifest) -> Vec<Check> {
    let mut out = Vec::new();
    match suite {
        Suite::Fg => out.push(fg(manifest.max_q)),
        Suite::Identities => out.push(curious()),
        _ => {}
    }
    for (i, spec) in manifest.instances.iter().enumerate() {
        let label = spec.label();
        let inst = match setup::load(&spec.source) {
            Ok(inst) => inst,
            Err(e) => {
                out.push(Check::error(suite, Some(&label), "load", e));
                continue;
            }
        };
        let rng = ChaCha8Rng::seed_from_u64(manifest.seed.wrapping_add(i as u64));
        match suite {
            Suite::Periods => out.extend(periods(spec, &inst, rng)),
            Suite::Identities => out.extend(identities(spec, &inst)),
            Suite::Lvalue => out.extend(lvalue(spec, &inst)),
            Suite::Derivative => out.extend(derivative(spec, &inst)),
            Suite::Fg => {}
        }
    }
    out
}

fn fg(max_q: u64) -> Check {
    match fg_grid(max_q, &[3, 5, 7], &[1, 2, 3]) {
        Ok(r) => {
            let failures: Vec<String> = r.failures.iter().map(|f| format!("{f:?}")).collect();
            Check::new(
                Suite::Fg,
                None,
                "ferrero-greenberg-grid",
                failures.is_empty(),
                json!({ "max_q": max_q, "cases": r.cases, "failures": failures }),
            )
        }
        Err(e) => Check::error(Suite::Fg, None, "ferrero-greenberg-grid", e),
    }
}

fn curious() -> Check {
    let mut checked = Vec::new();
    let mut failures = Vec::new();
    for n in 2..=300u64 {
        match curious_identity(n) {
            Ok(true) => checked.push(n),
            Ok(false) => failures.push(n),
            Err(_) => {}
        }
    }
    let anchor = |n: u64| golden_roots(n).first().map(|&e| curious_sum(n, e).to_string());
    Check::new(
        Suite::Identities,
        None,
        "curious-identity",
        failures.is_empty() && !checked.is_empty(),
        json!({ "moduli": checked.len(), "failures": failures, "n5": anchor(5), "n11": anchor(11) }),
    )
}

fn periods(spec: &InstanceSpec, inst: &shintani::instances::Instance, mut rng: ChaCha8Rng) -> Vec<Check> {
    let label = inst.name.clone();
    let s = Suite::Periods;
    let chi = match setup::character(inst, &spec.character) {
        Ok(c) => c,
        Err(e) => return vec![Check::error(s, Some(&label), "periods", e)],
    };
    let dec = &inst.decomposition;
    let lattice = &dec.ideals()[0].inverse_lattice;
    let mut samples = 0usize;
    let mut oracle_skipped = 0usize;
    let mut oracle_failures = Vec::new();
    let mut additivity_failures = Vec::new();
    let mut strata_failures = Vec::new();
    let mut errors = Vec::new();
    for _ in 0..spec.samples {
        let c = rng.gen_range(0..dec.cones().len());
        let cone = &dec.cones()[c];
        let points = match cone.parallelotope_points(lattice) {
            Ok(p) => p,
            Err(e) => {
                errors.push(e.to_string());
                break;
            }
        };
        let x = points[rng.gen_range(0..points.len())].clone();
        let n = rng.gen_range(0..2u32);
        let pn = spec.p.pow(n);
        let l: Vec<u64> = (0..cone.degree()).map(|_| rng.gen_range(0..pn)).collect();
        let q = PeriodQuery::new(l, n);
        let kind = match &chi {
            Some(chi) => MeasureKind::Dirichlet(chi.clone()),
            None => MeasureKind::Zeta,
        };
        let measure = match MeasureSpec::new(cone.clone(), inst.rho.clone(), x.clone(), spec.p, kind) {
            Ok(m) => m,
            Err(e) => {
                errors.push(e.to_string());
                break;
            }
        };
        let period = |q: &PeriodQuery| -> shintani::Result<CycloValue> {
            match &chi {
                Some(_) => measure.period_chi(q),
                None => measure.period_zeta(q).map(|r| CycloValue::from_rational(r, 1)),
            }
        };
        let closed = match period(&q) {
            Ok(v) => v,
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        samples += 1;
        let tag = format!("cone {c}, x = {x}, l = {:?}, n = {n}", q.l);
        match measure.oracle_period(&q) {
            Ok(o) if o == closed => {}
            Ok(o) => oracle_failures.push(format!("{tag}: closed {closed} vs oracle {o}")),
            Err(Error::InstanceTooLarge(_)) => oracle_skipped += 1,
            Err(e) => errors.push(e.to_string()),
        }
        let kids = q
            .children(spec.p)
            .iter()
            .try_fold(CycloValue::zero(1), |acc, k| period(k).map(|v| &acc + &v));
        match kids {
            Ok(sum) if sum == closed => {}
            Ok(sum) => additivity_failures.push(format!("{tag}: children sum {sum}")),
            Err(e) => errors.push(e.to_string()),
        }
        if chi.is_some() {
            let a = cone.translate(&x, &q.l.iter().map(|&v| v as i64).collect::<Vec<_>>());
            let strata = (0..1u32 << cone.degree())
                .try_fold(CycloValue::zero(1), |acc, mask| measure.omega_s(&a, n, mask).map(|v| &acc + &v));
            match strata {
                Ok(sum) if sum == closed => {}
                Ok(sum) => strata_failures.push(format!("{tag}: strata sum {sum}")),
                Err(e) => errors.push(e.to_string()),
            }
        }
    }
    let mut out = vec![
        Check::new(
            s,
            Some(&label),
            "oracle-agreement",
            oracle_failures.is_empty() && errors.is_empty(),
            json!({ "samples": samples, "oracle_skipped": oracle_skipped, "failures": oracle_failures, "errors": errors }),
        ),
        Check::new(
            s,
            Some(&label),
            "additivity",
            additivity_failures.is_empty() && errors.is_empty(),
            json!({ "samples": samples, "failures": additivity_failures }),
        ),
    ];
    if chi.is_some() {
        out.push(Check::new(
            s,
            Some(&label),
            "omega-strata",
            strata_failures.is_empty() && errors.is_empty(),
            json!({ "samples": samples, "failures": strata_failures }),
        ));
    }
    out
}

fn identities(spec: &InstanceSpec, inst: &shintani::instances::Instance) -> Vec<Check> {
    let label = inst.name.clone();
    let s = Suite::Identities;
    let mut out = Vec::new();
    let field = inst.field();
    if field.degree() >= 2 {
        out.push(match zero_sum_identity(&inst.decomposition, &inst.rho) {
            Ok(v) => Check::new(s, Some(&label), "zero-sum", v == Rational::from_integer(0.into()), json!({ "value": v.to_string() })),
            Err(e) => Check::error(s, Some(&label), "zero-sum", e),
        });
    }
    // a = p + 2v: the last point of the period is a unit
    let p = spec.p;
    let v = inst.decomposition.cones()[0].generators().last().expect("nonempty cone").clone();
    let a = field.from_int(p as i64).add(&v.scale(&Rational::from_integer(2.into())));
    let mut detail = Vec::new();
    let mut pass = true;
    for sv in [0i64, 2] {
        let run = || -> shintani::Result<(bool, bool)> {
            let se = PadicExponent::from_int(p, sv, spec.precision)?;
            let psi = PsiCharacter::Trivial;
            let full = line_sum_congruence(field, &a, &v, &psi, &se, p, 2, LineSumVariant::Full)?;
            let short = line_sum_congruence(field, &a, &v, &psi, &se, p, 2, LineSumVariant::DropLast)?;
            Ok((full, short))
        };
        match run() {
            Ok((full, short)) => {
                pass &= full && !short;
                detail.push(json!({ "s": sv, "full_period": full, "dropped_point": short }));
            }
            Err(e) => {
                pass = false;
                detail.push(json!({ "s": sv, "error": e.to_string() }));
            }
        }
    }
    out.push(Check::new(s, Some(&label), "line-sum-congruence", pass, json!({ "a": a.to_string(), "v": v.to_string(), "cases": detail })));
    out
}

fn lvalue(spec: &InstanceSpec, inst: &shintani::instances::Instance) -> Vec<Check> {
    let label = inst.name.clone();
    let s = Suite::Lvalue;
    let run = || -> Result<Vec<Check>, String> {
        let chi = setup::character(inst, &spec.character)?;
        let has_chi = chi.is_some();
        let cfg = setup::config(inst, chi, spec.p, spec.precision)?;
        let s0 = PadicExponent::from_int(spec.p, 0, spec.precision).map_err(|e| e.to_string())?;
        let reports = cfg.truncations(&setup::sum_kind(spec.kind), &s0, spec.levels).map_err(|e| e.to_string())?;
        let rows: Vec<report::Truncation> = reports.iter().map(|r| report::Truncation::untimed(&label, r)).collect();
        let distances: Vec<Option<i64>> = reports.iter().skip(1).map(|r| r.distance).collect();
        let monotone = distances.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a <= b));
        let mut out = vec![Check::new(
            s,
            Some(&label),
            "distances-nondecreasing",
            monotone && distances.iter().all(Option::is_some),
            json!({ "kind": format!("{:?}", spec.kind), "truncations": rows }),
        )];
        if has_chi && spec.kind == Kind::Chi {
            if let Ok(closed) = lseries::l_value0(&cfg) {
                let last = reports.last().expect("level 0 is always present");
                let agree = agreement(&cfg, last, &closed)?;
                let need = last.distance.unwrap_or(0).min(spec.precision as i64);
                out.push(Check::new(
                    s,
                    Some(&label),
                    "closed-form",
                    agree >= need,
                    json!({ "closed_form": report::cyclo(&closed), "agreement_digits": agree, "required": need }),
                ));
            }
        }
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![Check::error(s, Some(&label), "truncations", e)])
}

/// Digits to which a truncation agrees with an exact value.
fn agreement(cfg: &LSeriesConfig, r: &lseries::TruncationReport, closed: &CycloValue) -> Result<i64, String> {
    let cap = cfg.precision() as i64;
    if let Some(exact) = &r.exact {
        return Ok(cyclo_valuation(&(exact - closed), cfg.p()).map_or(cap, |v| v.min(cap)));
    }
    let value = r.value.as_ref().ok_or("truncation has no p-adic value")?;
    let emb = cfg.embedding().map_err(|e| e.to_string())?;
    let target = emb.embed(closed).map_err(|e| e.to_string())?;
    Ok(value.distance(&target).min(cap))
}

fn derivative(spec: &InstanceSpec, inst: &shintani::instances::Instance) -> Vec<Check> {
    let label = inst.name.clone();
    let s = Suite::Derivative;
    let m = spec.digits;
    let run = || -> Result<Vec<Check>, String> {
        let chi = setup::character(inst, &spec.character)?.ok_or("the derivative suite needs a nontrivial character")?;
        let cfg = setup::config(inst, Some(chi.clone()), spec.p, spec.precision)?;
        let mut rows = Vec::new();
        let mut stable = true;
        for (c, xs) in cfg.points(0).map_err(|e| e.to_string())?.iter().enumerate() {
            for x in xs {
                let a = lseries::derivative0(&cfg, c, 0, x, m).map_err(|e| e.to_string())?;
                let b = lseries::derivative0(&cfg, c, 0, x, m + 1).map_err(|e| e.to_string())?;
                stable &= a.agrees_mod(&b, m as i64);
                rows.push(json!({ "cone": c, "x": x.to_string(), "value": report::padic(&a) }));
            }
        }
        let mut out = vec![Check::new(s, Some(&label), "line-derivative-stability", stable, json!({ "digits": m, "values": rows }))];
        match lseries::global_derivative0(&cfg, m) {
            Ok(g) => {
                let rhs = lseries::brumer_stark_rhs_all(&cfg, m).map_err(|e| e.to_string())?;
                let emb = PadicEmbedding::new(spec.p, m + 4).map_err(|e| e.to_string())?;
                let mut twisted = Padic::zero(spec.p, m as i64);
                for (y, v) in rhs.iter().enumerate() {
                    if chi.residue_character().exponent(y as u64).is_some() {
                        let w = emb.embed(&chi.residue_character().value(y as u64)).map_err(|e| e.to_string())?;
                        twisted = twisted.add(&w.mul(v));
                    }
                }
                out.push(Check::new(
                    s,
                    Some(&label),
                    "global-derivative-vs-gamma-sum",
                    twisted.agrees_mod(&g.neg(), m as i64),
                    json!({ "global": report::padic(&g), "twisted_rhs": report::padic(&twisted) }),
                ));
            }
            Err(Error::IdentityFailed(_)) => {}
            Err(e) => out.push(Check::error(s, Some(&label), "global-derivative", e)),
        }
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![Check::error(s, Some(&label), "derivative", e)])
}

