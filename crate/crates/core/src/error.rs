use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error(
        "series did not reach tolerance {tol:e} within {terms} terms (tail bound {tail_bound:e})"
    )]
    ToleranceUnreachable {
        terms: usize,
        tail_bound: f64,
        tol: f64,
    },

    #[error(
        "quadrature hit the {panels}-panel cap with error estimate {err_estimate:e} > {tol:e}"
    )]
    SubdivisionCap {
        panels: usize,
        err_estimate: f64,
        tol: f64,
    },

    #[error("no tail truncation point found for the {side} tail")]
    Truncation { side: &'static str },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{what}: discrepancy {discrepancy:e} exceeds {allowed:e}")]
    Consistency {
        what: &'static str,
        discrepancy: f64,
        allowed: f64,
    },

    #[error("no initial crossing of G_R found on [{lo}, {hi}]")]
    NoInitialCrossing { lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
