//! `shintani`: command-line driver for exact p-adic Hecke L-function sums.
//!
//! Every subcommand prints a JSON report. Exit status is 0 on success, 1 when
//! a check fails and 2 on invalid input. `SHINTANI_THREADS` sizes the worker
//! pool.

mod manifest;
mod report;
mod setup;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use shintani::arith::{parse_rational, CycloValue, Rational};
use shintani::field::FieldElement;
use shintani::lseries::identities::{curious_identity, curious_sum, fg_grid, golden_roots, zero_sum_identity};
use shintani::lseries::{self, GammaQuery};
use shintani::measure::{MeasureKind, MeasureSpec, PeriodQuery};
use shintani::padic::PadicExponent;
use shintani::par::Exec;

use manifest::{CharacterSel, Kind, RunManifest, Source, Suite};

const THREADS_VAR: &str = "SHINTANI_THREADS";

#[derive(Parser)]
#[command(name = "shintani", version, about = "Exact p-adic Hecke L-function sums over Shintani cones")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Shipped instance: sqrt5-n5, sqrt5-n11, sqrt2-n7 or rational-n<N>.
    #[arg(long, default_value = "sqrt5-n5", conflicts_with = "field")]
    instance: String,
    /// Field description file (key-value format).
    #[arg(long)]
    field: Option<PathBuf>,
}

impl InstanceArgs {
    fn source(&self) -> Source {
        match &self.field {
            Some(p) => Source::File(p.clone()),
            None => Source::Named(self.instance.clone()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a field, its cones and residue map; `--emit` prints the key-value form.
    Field {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        emit: bool,
    },
    /// Period of the zeta or Dirichlet measure on the cylinder `x + l·v + p^n L_V`.
    Period {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Level n.
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// Offsets l, space separated; defaults to zeros.
        #[arg(long)]
        l: Option<String>,
        /// Base point x in basis coordinates; defaults to 1.
        #[arg(long)]
        x: Option<String>,
        /// trivial (zeta measure), quadratic, or a character index.
        #[arg(long, default_value = "quadratic")]
        character: CharacterSel,
        #[arg(long, default_value_t = 0)]
        cone: usize,
        /// Also evaluate the Abel-limit oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Truncations S_0..S_levels of a sum expression with distances between levels.
    Lvalue {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, default_value = "quadratic")]
        character: CharacterSel,
        /// chi, zeta or zeta-twisted.
        #[arg(long, default_value = "chi")]
        kind: Kind,
        /// Integer value of the variable s.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        s: i64,
        /// Digits carried by p-adic terms.
        #[arg(long, default_value_t = 6)]
        precision: u32,
    },
    /// L'_{p,V,x}(0) for every base point, and the global derivative when the line values cancel.
    Derivative {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value = "quadratic")]
        character: CharacterSel,
        /// Digits of the result.
        #[arg(long, default_value_t = 3)]
        digits: u32,
    },
    /// Multiple p-adic Gamma value at a point given in cone coordinates.
    Gamma {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        cone: usize,
        /// Coordinates y_i, space separated rationals.
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 3)]
        precision: u32,
    },
    /// One of the combinatorial identities: fg, curious, zero-sum.
    Identity {
        name: String,
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 1024)]
        max_q: u64,
        #[arg(long, default_value_t = 300)]
        max_n: u64,
    },
    /// Run verification suites from a manifest and report every check.
    Verify {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Restrict to these suites (repeatable).
        #[arg(long)]
        suite: Vec<Suite>,
        #[arg(long)]
        max_q: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Outcome {
    Text(String),
    Ok(Value),
    Failed(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = shintani::par::set_threads(n) {
                    eprintln!("shintani: {THREADS_VAR}: {e}");
                }
            }
            _ => {
                eprintln!("shintani: {THREADS_VAR} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let mut out = cli.out.clone();
    let result = match cli.command {
        Command::Verify { manifest, suite, max_q, seed } => verify(manifest, suite, max_q, seed, &mut out),
        cmd => run(cmd),
    };
    let json = |v: Value| serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
    let (text, code) = match result {
        Ok(Outcome::Text(t)) => (t, 0),
        Ok(Outcome::Ok(v)) => (json(v), 0),
        Ok(Outcome::Failed(v)) => (json(v), 1),
        Err(e) => {
            eprintln!("shintani: {e}");
            return ExitCode::from(2);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("shintani: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

fn parse_list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, String> {
    s.split_whitespace()
        .map(|t| f(t).ok_or_else(|| format!("{what}: cannot parse `{t}`")))
        .collect()
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn run(cmd: Command) -> Result<Outcome, String> {
    match cmd {
        Command::Field { inst, emit } => {
            let instance = setup::load(&inst.source())?;
            if emit {
                return Ok(Outcome::Text(shintani::io::write_instance(&instance)));
            }
            field_summary(&instance).map(Outcome::Ok)
        }
        Command::Period { inst, p, level, l, x, character, cone, oracle } => {
            let instance = setup::load(&inst.source())?;
            let field = instance.field().clone();
            let k = field.degree();
            let c = instance
                .decomposition
                .cones()
                .get(cone)
                .ok_or_else(|| format!("no cone {cone}"))?
                .clone();
            let x = match x {
                Some(s) => FieldElement::new(parse_list(&s, "x", parse_rational)?),
                None => field.one(),
            };
            let l = match l {
                Some(s) => parse_list(&s, "l", |t| t.parse().ok())?,
                None => vec![0; k],
            };
            let chi = setup::character(&instance, &character)?;
            let kind = chi.clone().map_or(MeasureKind::Zeta, MeasureKind::Dirichlet);
            let spec = MeasureSpec::new(c, instance.rho.clone(), x.clone(), p, kind).map_err(err)?;
            let q = PeriodQuery::new(l.clone(), level);
            let start = Instant::now();
            let closed = match chi {
                Some(_) => spec.period_chi(&q).map_err(err)?,
                None => CycloValue::from_rational(spec.period_zeta(&q).map_err(err)?, 1),
            };
            let mut v = json!({
                "instance": instance.name,
                "p": p,
                "level": level,
                "l": l,
                "x": x.to_string(),
                "value": report::cyclo(&closed),
                "runtime_ms": start.elapsed().as_millis(),
            });
            if oracle {
                let o = spec.oracle_period(&q).map_err(err)?;
                let agree = o == closed;
                v["oracle"] = report::cyclo(&o);
                v["agrees"] = Value::Bool(agree);
                if !agree {
                    return Ok(Outcome::Failed(v));
                }
            }
            Ok(Outcome::Ok(v))
        }
        Command::Lvalue { inst, p, levels, character, kind, s, precision } => {
            let instance = setup::load(&inst.source())?;
            let chi = setup::character(&instance, &character)?;
            let cfg = setup::config(&instance, chi, p, precision)?;
            let se = PadicExponent::from_int(p, s, precision).map_err(err)?;
            let reports = cfg.truncations(&setup::sum_kind(kind), &se, levels).map_err(err)?;
            let rows: Vec<report::Truncation> = reports.iter().map(|r| report::Truncation::new(&instance.name, r)).collect();
            let mut v = json!({ "instance": instance.name, "p": p, "s": s, "truncations": rows });
            if kind == Kind::Chi && s == 0 {
                if let Ok(closed) = lseries::l_value0(&cfg) {
                    v["closed_form"] = report::cyclo(&closed);
                }
            }
            Ok(Outcome::Ok(v))
        }
        Command::Derivative { inst, p, character, digits } => {
            let instance = setup::load(&inst.source())?;
            let chi = setup::character(&instance, &character)?.ok_or("derivative needs a nontrivial character")?;
            let cfg = setup::config(&instance, Some(chi), p, digits + 3)?;
            let start = Instant::now();
            let mut rows = Vec::new();
            for (c, xs) in cfg.points(0).map_err(err)?.iter().enumerate() {
                for x in xs {
                    let d = lseries::derivative0(&cfg, c, 0, x, digits).map_err(err)?;
                    rows.push(json!({ "cone": c, "x": x.to_string(), "value": report::padic(&d) }));
                }
            }
            let global = match lseries::global_derivative0(&cfg, digits) {
                Ok(g) => json!({ "value": report::padic(&g) }),
                Err(e) => json!({ "unavailable": e.to_string() }),
            };
            Ok(Outcome::Ok(json!({
                "instance": instance.name,
                "p": p,
                "digits": digits,
                "line_derivatives": rows,
                "global": global,
                "runtime_ms": start.elapsed().as_millis(),
            })))
        }
        Command::Gamma { inst, p, cone, y, precision } => {
            let instance = setup::load(&inst.source())?;
            let c = instance.decomposition.cones().get(cone).ok_or_else(|| format!("no cone {cone}"))?;
            let y: Vec<Rational> = parse_list(&y, "y", parse_rational)?;
            let start = Instant::now();
            let g = lseries::gamma_multiple(c, p, &GammaQuery { y: y.clone(), precision, m_prime: None }, Exec::best())
                .map_err(err)?;
            Ok(Outcome::Ok(json!({
                "instance": instance.name,
                "p": p,
                "y": y.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "value": report::padic(&g.value),
                "log": report::padic(&g.log),
                "m_prime": g.m_prime,
                "runtime_ms": start.elapsed().as_millis(),
            })))
        }
        Command::Identity { name, inst, max_q, max_n } => identity(&name, &inst, max_q, max_n),
        Command::Verify { .. } => unreachable!("handled in main"),
    }
}

fn field_summary(inst: &shintani::instances::Instance) -> Result<Value, String> {
    let f = inst.field();
    let basis: Vec<Value> = (0..f.degree())
        .map(|i| {
            let b = f.basis(i);
            json!({
                "label": f.labels()[i],
                "norm": f.norm(&b).to_string(),
                "trace": f.trace(&b).to_string(),
                "totally_positive": f.is_totally_positive(&b),
            })
        })
        .collect();
    let lattice = &inst.decomposition.ideals()[0].inverse_lattice;
    let cones: Vec<Value> = inst
        .decomposition
        .cones()
        .iter()
        .map(|c| {
            let points = c.parallelotope_points(lattice).map_err(err)?;
            Ok(json!({
                "generators": c.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "parallelotope_points": points.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_, String>>()?;
    let characters = inst.characters().map_err(err)?;
    Ok(json!({
        "instance": inst.name,
        "degree": f.degree(),
        "basis": basis,
        "units": inst.decomposition.units().iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "cones": cones,
        "modulus": inst.rho.modulus(),
        "rho": inst.rho.images(),
        "character_orders": characters.iter().map(|c| c.order()).collect::<Vec<_>>(),
    }))
}

fn identity(name: &str, inst: &InstanceArgs, max_q: u64, max_n: u64) -> Result<Outcome, String> {
    let start = Instant::now();
    let (pass, mut v) = match name {
        "fg" => {
            let r = fg_grid(max_q, &[3, 5, 7], &[1, 2, 3]).map_err(err)?;
            let failures: Vec<String> = r.failures.iter().map(|f| format!("{f:?}")).collect();
            (failures.is_empty(), json!({ "max_q": max_q, "cases": r.cases, "failures": failures }))
        }
        "curious" => {
            let mut rows = Vec::new();
            let mut pass = true;
            for n in 2..=max_n {
                if let Ok(ok) = curious_identity(n) {
                    pass &= ok;
                    let values: Vec<String> = golden_roots(n).iter().map(|&e| curious_sum(n, e).to_string()).collect();
                    rows.push(json!({ "n": n, "holds": ok, "values": values }));
                }
            }
            (pass, json!({ "max_n": max_n, "moduli": rows }))
        }
        "zero-sum" => {
            let instance = setup::load(&inst.source())?;
            let v = zero_sum_identity(&instance.decomposition, &instance.rho).map_err(err)?;
            (v == Rational::from_integer(0.into()), json!({ "instance": instance.name, "value": v.to_string() }))
        }
        _ => return Err(format!("unknown identity `{name}` (expected fg, curious or zero-sum)")),
    };
    v["identity"] = Value::String(name.to_string());
    v["pass"] = Value::Bool(pass);
    v["runtime_ms"] = json!(start.elapsed().as_millis());
    Ok(if pass { Outcome::Ok(v) } else { Outcome::Failed(v) })
}

fn verify(
    path: Option<PathBuf>,
    suites: Vec<Suite>,
    max_q: Option<u64>,
    seed: Option<u64>,
    out: &mut Option<PathBuf>,
) -> Result<Outcome, String> {
    let mut m = match &path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let base = p.parent().unwrap_or(Path::new("."));
            RunManifest::parse(&text, base).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => RunManifest::default(),
    };
    if !suites.is_empty() {
        let mut s = suites;
        s.sort();
        s.dedup();
        m.suites = s;
    }
    if let Some(q) = max_q {
        m.max_q = q;
    }
    if let Some(s) = seed {
        m.seed = s;
    }
    if out.is_none() {
        out.clone_from(&m.output);
    }
    let report = suites::run(&m);
    let failed = report.failed > 0;
    let v = serde_json::to_value(&report).map_err(err)?;
    Ok(if failed { Outcome::Failed(v) } else { Outcome::Ok(v) })
}
