use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cable parameter {0} is not an odd prime")]
    CableNotOddPrime(u64),
    #[error("companion parameter {0} must be an odd positive integer")]
    CompanionNotOdd(u64),
    #[error("cable parameter {p} divides 2*{q}; the cable T(2,{q};2,{p}) is not a knot")]
    CableDividesCompanion { p: u64, q: u64 },
    #[error("family parameter {0} is not an odd prime")]
    FamilyNotOddPrime(u64),
    #[error("family parameters must be pairwise distinct (repeated {0})")]
    RepeatedPrime(u64),
    #[error("a knot needs at least one piece")]
    EmptyKnot,
    #[error("cannot parse knot term `{term}`: {reason}")]
    Parse { term: String, reason: String },
    #[error("character has {got} residues but the knot has {expected} pieces")]
    CharacterLength { expected: usize, got: usize },
    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("T(2,{0}) needs an odd parameter >= 3")]
    BadTorusParameter(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("root of unity of order {order} with gcd(order, 2*{q}) != 1")]
    GcdViolation { q: u64, order: u64 },
    #[error("eigenvalue sign of T(2,{q}) at exp(2 pi i {num}/{den}) could not be certified")]
    Precision { q: u64, num: u64, den: u64 },
    #[error("prime {0} does not occur among the cable parameters")]
    PrimeNotPresent(u64),
    #[error("vector length {got} does not match rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint i/o: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
