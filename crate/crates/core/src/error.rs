use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {value} lies on the branch cut (-inf, 0]")]
    BranchCut { value: f64 },

    #[error("{what}: t = {t} outside [{lo}, {hi}]")]
    OutOfRange { what: &'static str, t: f64, lo: f64, hi: f64 },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("profile parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("step {step} too coarse for k = {k} (k * step must be <= 0.01)")]
    StepTooCoarse { k: f64, step: f64 },

    #[error("inclusion-exclusion integral I_{j} unsupported at u = {u}")]
    UnsupportedOrder { j: usize, u: f64 },

    #[error("no real saddle point: |u - k| < 2 sqrt(k) and W argument below -1/e (k = {k}, u = {u})")]
    Band { k: f64, u: f64 },

    #[error("no feasible cancellation point A in [sqrt(e), 2] for delta = {delta}")]
    Infeasible { delta: f64 },

    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
