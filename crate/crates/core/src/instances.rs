//! Ready-made fields, decompositions and characters used by tests, benches and the CLI.

use std::sync::Arc;

use crate::characters::{enumerate_characters, unit_images, HeckeCharacter};
use crate::cones::{build_quadratic_decomposition, decomposition_for_unit, Decomposition};
use crate::error::{Error, Result};
use crate::field::{CNResidueMap, FieldData, FieldElement};

/// `Q(√5)` on the basis `{1, ε}` with `ε = (3 + √5)/2`, `ε² = 3ε − 1`.
pub fn q_sqrt5() -> Arc<FieldData> {
    let e = FieldElement::from_ints;
    let table = vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[-1, 3])]];
    Arc::new(FieldData::new(vec!["1".into(), "eps".into()], table).expect("valid table"))
}

/// The single-cone decomposition `V = {1, ε}` of `Q(√5)`.
pub fn q_sqrt5_decomposition() -> Decomposition {
    let f = q_sqrt5();
    decomposition_for_unit(f.clone(), f.basis(1)).expect("ε is a totally positive unit")
}

/// A base field with its decomposition and a residue map modulo N.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub decomposition: Decomposition,
    pub rho: CNResidueMap,
}

impl Instance {
    pub fn field(&self) -> &Arc<FieldData> {
        self.decomposition.field()
    }

    /// Hecke characters of `Cl₊(N)`, trivial first.
    pub fn characters(&self) -> Result<Vec<HeckeCharacter>> {
        let images = unit_images(&self.rho, self.decomposition.units())?;
        Ok(enumerate_characters(&self.rho, &images))
    }

    /// The first character of order 2.
    pub fn quadratic_character(&self) -> Result<HeckeCharacter> {
        self.characters()?
            .into_iter()
            .find(|c| c.order() == 2)
            .ok_or_else(|| Error::InvalidCharacter(format!("{} has no quadratic character", self.name)))
    }
}

/// `Q(√5)`, `N = (√5)`: ρ(ε) = 4.
pub fn sqrt5_n5() -> Instance {
    let decomposition = q_sqrt5_decomposition();
    let rho = CNResidueMap::new(decomposition.field(), 5, vec![1, 4]).expect("valid map");
    Instance { name: "sqrt5-n5".into(), decomposition, rho }
}

/// `Q(√5)`, `N` the degree-one prime over 11 with ρ(ε) = 9.
pub fn sqrt5_n11() -> Instance {
    let decomposition = q_sqrt5_decomposition();
    let rho = CNResidueMap::new(decomposition.field(), 11, vec![1, 9]).expect("valid map");
    Instance { name: "sqrt5-n11".into(), decomposition, rho }
}

/// `Q(√2)` with `V = {1, 3 + 2√2}`, `N` over 7 with `√2 ↦ 3`.
pub fn sqrt2_n7() -> Instance {
    let decomposition = build_quadratic_decomposition(2).expect("Q(√2) has narrow class number 1");
    let rho = CNResidueMap::new(decomposition.field(), 7, vec![1, 3]).expect("valid map");
    Instance { name: "sqrt2-n7".into(), decomposition, rho }
}

/// `Q` with modulus `n`.
pub fn rational(n: u64) -> Result<Instance> {
    let decomposition = Decomposition::rational()?;
    let rho = CNResidueMap::new(decomposition.field(), n, vec![1])?;
    Ok(Instance { name: format!("rational-n{n}"), decomposition, rho })
}

/// Looks up a shipped instance by name.
pub fn by_name(name: &str) -> Result<Instance> {
    match name {
        "sqrt5-n5" => Ok(sqrt5_n5()),
        "sqrt5-n11" => Ok(sqrt5_n11()),
        "sqrt2-n7" => Ok(sqrt2_n7()),
        _ => {
            if let Some(n) = name.strip_prefix("rational-n").and_then(|s| s.parse().ok()) {
                rational(n)
            } else {
                Err(Error::InvalidQuery(format!("unknown instance {name}")))
            }
        }
    }
}

pub const INSTANCE_NAMES: &[&str] = &["sqrt5-n5", "sqrt5-n11", "sqrt2-n7", "rational-n5"];
