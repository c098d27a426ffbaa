use prefrobust_lp::LpError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("Lipschitz modulus must be positive, got {0}")]
    Lipschitz(f64),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("normalizing prospect does not dominate {what}: entry ({t}, {n}) is {entry} but the normalizing prospect has {w0}")]
    Dominance {
        what: String,
        t: usize,
        n: usize,
        entry: f64,
        w0: f64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("decomposition does not match instance: {0}")]
    Mismatch(String),
    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid decision model: {0}")]
    Model(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
