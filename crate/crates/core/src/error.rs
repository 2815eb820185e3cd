use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} {rule}")]
    Domain { field: String, rule: String },

    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("subsystem index {index} out of range 1..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("control gain g{index} = {value} fell below floor {floor} at t = {t}")]
    GainBelowFloor {
        index: usize,
        value: f64,
        floor: f64,
        t: f64,
    },

    #[error("non-finite value in `{signal}` at t = {t}")]
    NonFinite { signal: String, t: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("{0}")]
    Mismatch(String),

    #[error("empty metrics window [{0}, {1}]")]
    EmptyWindow(f64, f64),
}

impl Error {
    pub(crate) fn domain(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            rule: rule.into(),
        }
    }

    /// True for failures caused by the run itself rather than its inputs.
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::GainBelowFloor { .. })
    }
}
