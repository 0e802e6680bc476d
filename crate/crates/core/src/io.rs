//! Plain-text key-value description of a field, its cone decomposition and a
//! residue map.
//!
//! ```text
//! # Q(√5) with N = (√5)
//! name = sqrt5-n5
//! basis = 1 eps
//! mul 1 1 = 1 0
//! mul 1 eps = 0 1
//! mul eps eps = -1 3
//! sqrt = -3 2
//! unit = 0 1
//! cone = 1 0 | 0 1
//! positive = eps
//! modulus = 5
//! rho = 1 4
//! ```
//!
//! Elements are coordinate vectors in the basis, entries are rationals
//! (`3/2`). `mul a b` must be given for every unordered pair of basis labels.
//! `cone` and `unit` may repeat; with no `cone` line a quadratic field gets
//! the single cone `{1, ε}` of its unit. `positive` lists basis labels or
//! elements that must be totally positive. `sqrt` (degree 2) fixes the
//! element sent to `+√D` by the first place; `integral` optionally gives a
//! Z-basis of the ring of integers as `|`-separated elements.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::One;

use crate::arith::{parse_rational, Rational};
use crate::cones::{decomposition_for_unit, ConeContext, Decomposition, IdealClassRep};
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldData, FieldElement, Places};
use crate::instances::Instance;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{body}`")))?;
        let key = key.split_whitespace().collect::<Vec<_>>().join(" ");
        if key.is_empty() {
            return Err(err(line, "missing key"));
        }
        out.push(Entry { line, key, value: value.trim().to_string() });
    }
    Ok(out)
}

fn parse_element(line: usize, s: &str, k: usize) -> Result<FieldElement> {
    let coords: Vec<Rational> = s
        .split_whitespace()
        .map(|t| parse_rational(t).ok_or_else(|| err(line, format!("`{t}` is not a rational number"))))
        .collect::<Result<_>>()?;
    if coords.len() != k {
        return Err(err(line, format!("expected {k} coordinates, got {}", coords.len())));
    }
    Ok(FieldElement::new(coords))
}

fn parse_elements(line: usize, s: &str, k: usize) -> Result<Vec<FieldElement>> {
    s.split('|').map(|part| parse_element(line, part, k)).collect()
}

fn parse_u64(line: usize, s: &str) -> Result<u64> {
    s.parse().map_err(|_| err(line, format!("`{s}` is not a nonnegative integer")))
}

fn single<'a>(items: &'a [Entry], key: &str) -> Result<Option<&'a Entry>> {
    let mut found = items.iter().filter(|e| e.key == key);
    let first = found.next();
    if let Some(dup) = found.next() {
        return Err(err(dup.line, format!("`{key}` given twice")));
    }
    Ok(first)
}

/// Parses a field description into a validated [`Instance`].
///
/// Every failure is reported as [`Error::Parse`] with the line of the
/// offending entry (line 0 for missing keys).
pub fn parse_instance(text: &str, default_name: &str) -> Result<Instance> {
    let items = entries(text)?;
    const KNOWN: &[&str] = &["name", "basis", "sqrt", "integral", "unit", "cone", "positive", "modulus", "rho"];
    for e in &items {
        if !KNOWN.contains(&e.key.as_str()) && !e.key.starts_with("mul ") {
            return Err(err(e.line, format!("unknown key `{}`", e.key)));
        }
    }

    let basis = single(&items, "basis")?.ok_or_else(|| err(0, "missing `basis`"))?;
    let labels: Vec<String> = basis.value.split_whitespace().map(str::to_string).collect();
    let k = labels.len();
    if k == 0 {
        return Err(err(basis.line, "empty basis"));
    }
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if index.len() != k {
        return Err(err(basis.line, "duplicate basis label"));
    }

    let mut table: Vec<Vec<Option<FieldElement>>> = vec![vec![None; k]; k];
    let mut table_lines = vec![vec![0usize; k]; k];
    for e in items.iter().filter(|e| e.key.starts_with("mul ")) {
        let pair: Vec<&str> = e.key[4..].split_whitespace().collect();
        let [a, b] = pair[..] else {
            return Err(err(e.line, "expected `mul <label> <label>`"));
        };
        let lookup = |l: &str| index.get(l).copied().ok_or_else(|| err(e.line, format!("unknown basis label `{l}`")));
        let (i, j) = (lookup(a)?, lookup(b)?);
        let (i, j) = (i.min(j), i.max(j));
        if table[i][j].is_some() {
            return Err(err(e.line, format!("product {a}·{b} given twice")));
        }
        table[i][j] = Some(parse_element(e.line, &e.value, k)?);
        table_lines[i][j] = e.line;
    }
    let mut full = vec![vec![FieldElement::zero(k); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = table[i][j]
                .clone()
                .ok_or_else(|| err(basis.line, format!("missing product {}·{}", labels[i], labels[j])))?;
            full[i][j] = v.clone();
            full[j][i] = v;
        }
    }
    let table_line = table_lines.iter().flatten().copied().max().unwrap_or(basis.line);
    let mut field = FieldData::new(labels.clone(), full).map_err(|e| err(table_line, e.to_string()))?;
    if let Some(e) = single(&items, "sqrt")? {
        let s = parse_element(e.line, &e.value, k)?;
        field = field.with_sqrt(s).map_err(|x| err(e.line, x.to_string()))?;
    }
    if let Some(e) = single(&items, "integral")? {
        let b = parse_elements(e.line, &e.value, k)?;
        field = field.with_integral_basis(b).map_err(|x| err(e.line, x.to_string()))?;
    }
    let field = Arc::new(field);

    for e in items.iter().filter(|e| e.key == "positive") {
        for part in e.value.split('|') {
            let part = part.trim();
            let elems: Vec<(String, FieldElement)> = if part.split_whitespace().count() == k
                && part.split_whitespace().all(|t| parse_rational(t).is_some())
            {
                vec![(part.to_string(), parse_element(e.line, part, k)?)]
            } else {
                part.split_whitespace()
                    .map(|l| {
                        let i = index.get(l).ok_or_else(|| err(e.line, format!("unknown basis label `{l}`")))?;
                        Ok((l.to_string(), field.basis(*i)))
                    })
                    .collect::<Result<_>>()?
            };
            for (label, a) in elems {
                if !field.is_totally_positive(&a) {
                    return Err(err(e.line, format!("`{label}` is not totally positive")));
                }
            }
        }
    }

    let units: Vec<(usize, FieldElement)> = items
        .iter()
        .filter(|e| e.key == "unit")
        .map(|e| Ok((e.line, parse_element(e.line, &e.value, k)?)))
        .collect::<Result<_>>()?;
    let cones: Vec<(usize, Vec<FieldElement>)> = items
        .iter()
        .filter(|e| e.key == "cone")
        .map(|e| Ok((e.line, parse_elements(e.line, &e.value, k)?)))
        .collect::<Result<_>>()?;
    let unit_line = units.first().map_or(0, |u| u.0);
    let decomposition = if cones.is_empty() {
        match k {
            1 => Decomposition::rational().map_err(|x| err(0, x.to_string()))?,
            2 => {
                let [(line, eps)] = &units[..] else {
                    return Err(err(unit_line, "a quadratic field without cones needs exactly one `unit`"));
                };
                decomposition_for_unit(field.clone(), eps.clone()).map_err(|x| err(*line, x.to_string()))?
            }
            _ => return Err(err(0, "degree >= 3 needs explicit `cone` lines")),
        }
    } else {
        let mut ctx = Vec::new();
        for (line, gens) in cones {
            if gens.len() != k {
                return Err(err(line, format!("a cone needs {k} generators")));
            }
            ctx.push(ConeContext::new(field.clone(), gens).map_err(|x| err(line, x.to_string()))?);
        }
        let ideal = IdealClassRep { inverse_lattice: field.integral_basis().to_vec(), norm: Rational::one() };
        let us = units.iter().map(|u| u.1.clone()).collect();
        Decomposition::new(field.clone(), ctx, us, vec![ideal]).map_err(|x| err(unit_line, x.to_string()))?
    };

    let modulus = single(&items, "modulus")?.ok_or_else(|| err(0, "missing `modulus`"))?;
    let n = parse_u64(modulus.line, &modulus.value)?;
    let rho_entry = single(&items, "rho")?.ok_or_else(|| err(0, "missing `rho`"))?;
    let images: Vec<u64> = rho_entry
        .value
        .split_whitespace()
        .map(|t| parse_u64(rho_entry.line, t))
        .collect::<Result<_>>()?;
    let rho = CNResidueMap::new(&field, n, images).map_err(|x| match x {
        Error::ResidueMapNotMultiplicative { modulus, i, j } => err(
            rho_entry.line,
            format!("residue map mod {modulus} is not multiplicative on basis pair ({}, {})", labels[i], labels[j]),
        ),
        other => err(rho_entry.line, other.to_string()),
    })?;

    let name = match single(&items, "name")? {
        Some(e) => e.value.clone(),
        None => default_name.to_string(),
    };
    Ok(Instance { name, decomposition, rho })
}

fn element(a: &FieldElement) -> String {
    a.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serializes an instance in the format read by [`parse_instance`].
pub fn write_instance(inst: &Instance) -> String {
    let field = inst.field();
    let labels = field.labels();
    let k = field.degree();
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", inst.name);
    let _ = writeln!(out, "basis = {}", labels.join(" "));
    for i in 0..k {
        for j in i..k {
            let _ = writeln!(out, "mul {} {} = {}", labels[i], labels[j], element(&field.table()[i][j]));
        }
    }
    if let Places::Quadratic { sqrt_d, .. } = field.places() {
        let _ = writeln!(out, "sqrt = {}", element(sqrt_d));
    }
    let integral: Vec<String> = field.integral_basis().iter().map(element).collect();
    let _ = writeln!(out, "integral = {}", integral.join(" | "));
    for u in inst.decomposition.units() {
        let _ = writeln!(out, "unit = {}", element(u));
    }
    for c in inst.decomposition.cones() {
        let gens: Vec<String> = c.generators().iter().map(element).collect();
        let _ = writeln!(out, "cone = {}", gens.join(" | "));
    }
    let _ = writeln!(out, "modulus = {}", inst.rho.modulus());
    let images: Vec<String> = inst.rho.images().iter().map(u64::to_string).collect();
    let _ = writeln!(out, "rho = {}", images.join(" "));
    out
}
