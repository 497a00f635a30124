use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no unique supporting functional at this point")]
    NonUniqueFunctional,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),
    #[error("lattice is rank-deficient ({rank} < {dim}); covering radius is infinite")]
    RankDeficient { rank: usize, dim: usize },
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("not a modulus: {0}")]
    NonModulus(String),
    #[error("direction oracle exhausted at target {target}")]
    OracleExhausted { target: usize },
    #[error("oracle output for target {target} is {distance} from sphere sample {sample:?}, below theta")]
    OracleCheckFailed { target: usize, sample: Vec<f64>, distance: f64 },
    #[error("separation violation: combination {coefficients:?} has norm {norm}")]
    SeparationViolation { coefficients: Vec<i64>, norm: f64 },
    #[error("coverage violation: target {target} is {distance} from the subgroup")]
    CoverageViolation { target: usize, distance: f64 },
    #[error("result has not been verified")]
    Unverified,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
