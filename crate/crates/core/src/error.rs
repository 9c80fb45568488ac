use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Multiplicative representation is undefined (zero or non-finite value).
    #[error("domain error{}: {msg}", fmt_at(.x))]
    Domain { x: Option<f64>, msg: String },

    #[error("tableau shape error: {0}")]
    Shape(String),

    #[error("step count error: (x_end - x0) / h = {ratio} is not a positive integer")]
    StepCount { ratio: f64 },

    /// Convergence order is undefined because the error sits at the rounding floor.
    #[error("degenerate convergence study: log error {log_error:e} at h = {h} is below 1e-14")]
    Degenerate { h: f64, log_error: f64 },

    #[error("solution hits 0+0i at x = {x} and no ordinary right-hand side is available")]
    UnrecoverableZero { x: f64 },

    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("configuration error: {0}")]
    Config(String),
}

fn fmt_at(x: &Option<f64>) -> String {
    match x {
        Some(x) => format!(" at x = {x}"),
        None => String::new(),
    }
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain { x: None, msg: msg.into() }
    }

    /// Attaches the abscissa to a domain error that has none yet.
    pub fn at(self, x: f64) -> Self {
        match self {
            Error::Domain { x: None, msg } => Error::Domain { x: Some(x), msg },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
