//! Run manifests for `shintani verify`.
//!
//! ```text
//! seed = 7
//! suites = periods identities lvalue derivative fg
//! max_q = 1024
//! output = report.json
//!
//! [instance]
//! source = sqrt5-n5        # shipped name; or `field = path/to/field.txt`
//! p = 3
//! levels = 2
//! character = quadratic    # trivial | quadratic | <index>
//! kind = chi               # chi | zeta | zeta-twisted
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Derivative,
    Fg,
    Identities,
    Lvalue,
    Periods,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Derivative, Suite::Fg, Suite::Identities, Suite::Lvalue, Suite::Periods];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Derivative => "derivative",
            Suite::Fg => "fg",
            Suite::Identities => "identities",
            Suite::Lvalue => "lvalue",
            Suite::Periods => "periods",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Named(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterSel {
    Trivial,
    Quadratic,
    Index(usize),
}

impl FromStr for CharacterSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trivial" => Ok(CharacterSel::Trivial),
            "quadratic" => Ok(CharacterSel::Quadratic),
            _ => s
                .parse()
                .map(CharacterSel::Index)
                .map_err(|_| format!("character must be `trivial`, `quadratic` or an index, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Chi,
    Zeta,
    ZetaTwisted,
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chi" => Ok(Kind::Chi),
            "zeta" => Ok(Kind::Zeta),
            "zeta-twisted" => Ok(Kind::ZetaTwisted),
            _ => Err(format!("kind must be `chi`, `zeta` or `zeta-twisted`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub source: Source,
    pub p: u64,
    pub levels: u32,
    pub character: CharacterSel,
    pub kind: Kind,
    /// Digits carried by p-adic terms.
    pub precision: u32,
    /// Random cylinders drawn by the periods suite.
    pub samples: usize,
    /// Digits for derivative values.
    pub digits: u32,
}

impl InstanceSpec {
    pub fn new(source: Source) -> Self {
        InstanceSpec {
            source,
            p: 3,
            levels: 2,
            character: CharacterSel::Quadratic,
            kind: Kind::Chi,
            precision: 6,
            samples: 20,
            digits: 3,
        }
    }

    pub fn label(&self) -> String {
        match &self.source {
            Source::Named(n) => n.clone(),
            Source::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub max_q: u64,
    pub output: Option<PathBuf>,
    pub instances: Vec<InstanceSpec>,
}

impl Default for RunManifest {
    fn default() -> Self {
        RunManifest { seed: 0, suites: Suite::ALL.to_vec(), max_q: 1024, output: None, instances: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestError {
    pub line: usize,
    pub column: usize,
    pub msg: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.msg)
    }
}

impl std::error::Error for ManifestError {}

fn parse_value<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("invalid value `{s}`"))
}

impl RunManifest {
    pub fn parse(text: &str, base: &Path) -> Result<Self, ManifestError> {
        let mut m = RunManifest::default();
        let mut current: Option<InstanceSpec> = None;
        let mut instance_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let indent = body.len() - body.trim_start().len();
            let body = body.trim();
            if body.is_empty() {
                continue;
            }
            let fail = |column: usize, msg: String| ManifestError { line, column, msg };
            if body == "[instance]" {
                if let Some(spec) = current.take() {
                    m.instances.push(spec);
                }
                current = Some(InstanceSpec::new(Source::Named(String::new())));
                instance_line = line;
                continue;
            }
            if body.starts_with('[') {
                return Err(fail(indent + 1, format!("unknown section `{body}`")));
            }
            let eq = body.find('=').ok_or_else(|| fail(indent + 1, "expected `key = value`".into()))?;
            let key = body[..eq].trim();
            let after = &body[eq + 1..];
            let value = after.trim();
            let column = indent + eq + 2 + (after.len() - after.trim_start().len());
            let wrap = |r: Result<(), String>| r.map_err(|msg| fail(column, msg));
            match current.as_mut() {
                None => match key {
                    "seed" => wrap(parse_value(value).map(|v| m.seed = v))?,
                    "max_q" => wrap(parse_value(value).map(|v| m.max_q = v))?,
                    "output" => m.output = Some(base.join(value)),
                    "suites" => {
                        let mut suites: Vec<Suite> = value
                            .split_whitespace()
                            .map(str::parse)
                            .collect::<Result<_, _>>()
                            .map_err(|msg| fail(column, msg))?;
                        suites.sort();
                        suites.dedup();
                        m.suites = suites;
                    }
                    _ => return Err(fail(indent + 1, format!("unknown key `{key}`"))),
                },
                Some(spec) => match key {
                    "source" => spec.source = Source::Named(value.to_string()),
                    "field" => spec.source = Source::File(base.join(value)),
                    "p" => wrap(parse_value(value).map(|v| spec.p = v))?,
                    "levels" => wrap(parse_value(value).map(|v| spec.levels = v))?,
                    "precision" => wrap(parse_value(value).map(|v| spec.precision = v))?,
                    "samples" => wrap(parse_value(value).map(|v| spec.samples = v))?,
                    "digits" => wrap(parse_value(value).map(|v| spec.digits = v))?,
                    "character" => wrap(value.parse().map(|v| spec.character = v))?,
                    "kind" => wrap(value.parse().map(|v| spec.kind = v))?,
                    _ => return Err(fail(indent + 1, format!("unknown key `{key}`"))),
                },
            }
        }
        if let Some(spec) = current.take() {
            m.instances.push(spec);
        }
        if m.instances.iter().any(|s| s.source == Source::Named(String::new())) {
            return Err(ManifestError { line: instance_line, column: 1, msg: "instance has no `source` or `field`".into() });
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_defaults() {
        let text = "seed = 9\nsuites = lvalue fg\n\n[instance]\nsource = sqrt5-n5\nlevels = 1\n[instance]\nfield = f.txt\nkind = zeta\ncharacter = trivial\n";
        let m = RunManifest::parse(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(m.seed, 9);
        assert_eq!(m.suites, vec![Suite::Fg, Suite::Lvalue]);
        assert_eq!(m.instances.len(), 2);
        assert_eq!(m.instances[0].levels, 1);
        assert_eq!(m.instances[1].source, Source::File(PathBuf::from("/tmp/x/f.txt")));
        assert_eq!(m.instances[1].kind, Kind::Zeta);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let e = RunManifest::parse("seed = 1\nmax_q =  abc\n", Path::new(".")).unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = RunManifest::parse("[instance]\n  colour = red\n", Path::new(".")).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = RunManifest::parse("suites = fg bogus\n", Path::new(".")).unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.msg.contains("bogus"));
        let e = RunManifest::parse("[instance]\np = 5\n", Path::new(".")).unwrap_err();
        assert_eq!(e.line, 1);
    }
}
