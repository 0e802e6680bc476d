use thiserror::Error;

/// Errors raised across the library.
///
/// Variants are grouped by the layer that raises them; callers that only care
/// about a single layer can match on the relevant subset and forward the rest.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // exact arithmetic
    #[error("rational function has a pole of order {0} at u = 1")]
    PoleAtOne(usize),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    // p-adic arithmetic
    #[error("{0} is not a unit modulo p")]
    NotAUnit(String),
    #[error("p = 2 is not supported")]
    EvenPrimeUnsupported,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic domain violation: {0}")]
    DomainViolation(String),
    #[error("guaranteed p-adic precision dropped to zero")]
    PrecisionExhausted,
    #[error("p^{digits} does not fit the machine residue type for p = {p}")]
    PrecisionTooLarge { p: u64, digits: u32 },

    // field model
    #[error("invalid field data: {0}")]
    InvalidField(String),
    #[error("residue map mod {modulus} is not multiplicative on basis pair ({i}, {j})")]
    ResidueMapNotMultiplicative { modulus: u64, i: usize, j: usize },
    #[error("invalid residue map: {0}")]
    InvalidResidueMap(String),
    #[error("element is not integral at modulus {0}")]
    NotIntegralAtModulus(u64),
    #[error("sign could not be certified at the working precision")]
    UndecidedAtPrecision,

    // cones
    #[error("the lattice a^-1 does not contain the cone lattice")]
    LatticeNotContained,
    #[error("narrow class number of Q(sqrt {0}) is not 1")]
    NarrowClassNumberNotOne(u64),
    #[error("no fundamental unit found for D = {0}")]
    UnitNotFound(u64),
    #[error("point lies in no cone of the decomposition")]
    NotInAnyCone,
    #[error("point lies in more than one cone translate")]
    NotUnique,
    #[error("p = {p} divides the index {index}")]
    PDividesIndex { p: u64, index: u64 },
    #[error("invalid cone: {0}")]
    InvalidCone(String),

    // characters
    #[error("element is not coprime to the modulus {0}")]
    NotCoprimeToModulus(u64),
    #[error("element is not coprime to p = {0}")]
    NotCoprimeToP(u64),
    #[error("character has trivial narrow modulus")]
    CharacterHasTrivialNarrowModulus,
    #[error("character index {index} out of range ({count} characters)")]
    CharacterIndex { index: usize, count: usize },
    #[error("no embedding of the {order}-th roots of unity into Q_{p}")]
    EmbeddingUnavailable { order: u32, p: u64 },
    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    // measures
    #[error("p^n is not congruent to 1 modulo N")]
    LevelNotOneModN,
    #[error("instance too large for the oracle: {0}")]
    InstanceTooLarge(String),
    #[error("invalid period query: {0}")]
    InvalidQuery(String),

    // L-series
    #[error("psi character of this kind is not supported here")]
    PsiLevelUnsupported,
    #[error("cone lattice is not a Z_p basis of O_p (p divides index {0})")]
    AssumptionOpViolated(u64),
    #[error("p = {0} is not inert")]
    PNotInert(u64),
    #[error("Gamma approximants did not stabilise at M' = {0}")]
    NotConverged(u32),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("X^2 - 3X + 1 has no root modulo {0}")]
    NoRootMod(u64),
    #[error("identity check failed: {0}")]
    IdentityFailed(String),

    // input files
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
