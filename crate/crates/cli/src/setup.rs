//! Instance loading and configuration shared by the subcommands and suites.

use std::path::Path;

use shintani::characters::HeckeCharacter;
use shintani::instances::{self, Instance};
use shintani::lseries::{LSeriesConfig, SumKind};
use shintani::par::Exec;

use crate::manifest::{CharacterSel, Kind, Source};

pub type Failure = String;

pub fn load(source: &Source) -> Result<Instance, Failure> {
    match source {
        Source::Named(name) => instances::by_name(name).map_err(|e| e.to_string()),
        Source::File(path) => load_file(path),
    }
}

pub fn load_file(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
    shintani::io::parse_instance(&text, stem).map_err(|e| format!("{}: {e}", path.display()))
}

/// `None` for the trivial character.
pub fn character(inst: &Instance, sel: &CharacterSel) -> Result<Option<HeckeCharacter>, Failure> {
    match sel {
        CharacterSel::Trivial => Ok(None),
        CharacterSel::Quadratic => inst.quadratic_character().map(Some).map_err(|e| e.to_string()),
        CharacterSel::Index(i) => {
            let chars = inst.characters().map_err(|e| e.to_string())?;
            let count = chars.len();
            let chi = chars
                .into_iter()
                .nth(*i)
                .ok_or_else(|| format!("character index {i} out of range ({count} characters)"))?;
            Ok((!chi.residue_character().is_trivial()).then_some(chi))
        }
    }
}

pub fn config(inst: &Instance, chi: Option<HeckeCharacter>, p: u64, precision: u32) -> Result<LSeriesConfig, Failure> {
    let cfg = match chi {
        Some(chi) => LSeriesConfig::dirichlet(inst.decomposition.clone(), chi, p, precision),
        None => LSeriesConfig::zeta(inst.decomposition.clone(), inst.rho.clone(), p, precision),
    };
    cfg.map(|c| c.with_exec(Exec::best())).map_err(|e| e.to_string())
}

pub fn sum_kind(kind: Kind) -> SumKind {
    match kind {
        Kind::Chi => SumKind::Chi,
        Kind::Zeta => SumKind::Zeta,
        Kind::ZetaTwisted => SumKind::ZetaTwisted,
    }
}
