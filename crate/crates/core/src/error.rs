use thiserror::Error;

/// Errors raised by the arithmetic kernels, enumerators and closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("{x} is not a unit modulo {n}")]
    NonUnit { x: u64, n: u64 },

    #[error("{p} is not prime")]
    NotPrime { p: u64 },

    #[error("level {target} is not a multiple of level {level}")]
    NotMultiple { level: u64, target: u64 },

    #[error("cyclotomic level {level} exceeds the ceiling {ceiling}")]
    LevelCeiling { level: u64, ceiling: u64 },

    #[error("conductor {conductor} does not divide {m}, or {m} does not divide the modulus {n}")]
    ConductorNotDividing { conductor: u64, m: u64, n: u64 },

    #[error("enumeration needs {needed} candidates but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("formula guard: {0}")]
    FormulaGuard(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
