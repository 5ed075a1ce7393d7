use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("unknown scenario kind `{0}`")]
    UnknownScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator is not a density: inf d/dx H = {min_density} at (t={t}, x={x})")]
    NotADensity { min_density: f64, t: f64, x: f64 },

    #[error("hamiltonian slope invariant violated at node (i={i}, j={j}): {detail}")]
    SlopeViolation { i: usize, j: usize, detail: String },

    #[error("level {h} outside the realized range [{lo}, {hi}] at t={t}")]
    LevelOutOfRange { t: f64, h: f64, lo: f64, hi: f64 },

    #[error("flow invariant `{name}` violated at node (i={i}, j={j}): value {value}, bound {bound}")]
    FlowInvariant {
        name: &'static str,
        i: usize,
        j: usize,
        value: f64,
        bound: f64,
    },

    #[error("mollification radius {eps} rejected: {reason}")]
    BadRadius { eps: f64, reason: String },

    #[error("support violation: {0}")]
    Support(String),

    #[error("oracle precondition unmet: {0}")]
    OraclePrecondition(String),

    #[error("config error: {0}")]
    Config(String),
}
