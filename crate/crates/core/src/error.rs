use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violated an operation's precondition.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("side lengths {sides:?} do not bound a polygon (longest side must be shorter than the sum of the rest)")]
    Infeasible { sides: Vec<f64> },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("process exceeded its cap of {cap} rounds")]
    CapExceeded { cap: usize },

    #[error("could not construct a witness with exactly {m} {k}-gons among {n} pieces")]
    WitnessConstruction { k: usize, n: usize, m: u64 },

    #[error("unknown quantity `{0}`")]
    UnknownQuantity(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
