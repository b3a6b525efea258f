use std::fmt;

use serde::Serialize;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical modules and the command-line front end.
///
/// Every variant maps to a stable identifier (see [`Error::code`]) that is
/// surfaced verbatim in run reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("index error in {op}: {detail}")]
    Index { op: &'static str, detail: String },

    #[error("overflow guard in {op}: {detail}")]
    OverflowGuard { op: &'static str, detail: String },

    #[error("quadrature did not converge in {op} (residual {residual:.3e})")]
    NonConvergence { op: &'static str, residual: f64 },

    #[error("division at zero in {op}: {detail}")]
    DivisionAtZero { op: &'static str, detail: String },

    #[error("divergence guard in {op}: {detail}")]
    Divergence { op: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error for key `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable identifier used in reports and by scripts consuming them.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "E_DOMAIN",
            Error::Index { .. } => "E_INDEX",
            Error::OverflowGuard { .. } => "E_OVERFLOW_GUARD",
            Error::NonConvergence { .. } => "E_NON_CONVERGENCE",
            Error::DivisionAtZero { .. } => "E_DIVISION_AT_ZERO",
            Error::Divergence { .. } => "E_DIVERGENCE",
            Error::InvalidInput(_) => "E_INVALID_INPUT",
            Error::Config { .. } => "E_CONFIG",
            Error::Parse { .. } => "E_PARSE",
            Error::Io { .. } => "E_IO",
        }
    }

    /// Usage-type errors map to exit code 2, numerical guards to 1.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Config { .. } | Error::Parse { .. } | Error::Io { .. }
        )
    }

    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_string(),
            source,
        }
    }
}

/// Non-fatal diagnostic attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    pub fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WarningCode {
    #[serde(rename = "W_TAIL_TRUNCATION")]
    TailTruncation,
    #[serde(rename = "W_AT_ORIGIN")]
    AtOrigin,
    #[serde(rename = "W_C1_VIOLATION")]
    C1Violation,
    #[serde(rename = "W_FLAG_OVERRIDES_CONFIG")]
    FlagOverridesConfig,
    #[serde(rename = "W_NOT_SUMMABLE")]
    NotSummable,
    #[serde(rename = "W_BOUND_NOT_APPLICABLE")]
    BoundNotApplicable,
    #[serde(rename = "W_POLLACZEK_OVERFLOW")]
    PollaczekOverflow,
    #[serde(rename = "W_LIMIT_AT_ZERO")]
    LimitAtZero,
    #[serde(rename = "W_IMAGINARY_RESIDUAL")]
    ImaginaryResidual,
    #[serde(rename = "W_HYPOTHESIS")]
    Hypothesis,
}

impl WarningCode {
    pub const ALL: [WarningCode; 10] = [
        WarningCode::TailTruncation,
        WarningCode::AtOrigin,
        WarningCode::C1Violation,
        WarningCode::FlagOverridesConfig,
        WarningCode::NotSummable,
        WarningCode::BoundNotApplicable,
        WarningCode::PollaczekOverflow,
        WarningCode::LimitAtZero,
        WarningCode::ImaginaryResidual,
        WarningCode::Hypothesis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::TailTruncation => "W_TAIL_TRUNCATION",
            WarningCode::AtOrigin => "W_AT_ORIGIN",
            WarningCode::C1Violation => "W_C1_VIOLATION",
            WarningCode::FlagOverridesConfig => "W_FLAG_OVERRIDES_CONFIG",
            WarningCode::NotSummable => "W_NOT_SUMMABLE",
            WarningCode::BoundNotApplicable => "W_BOUND_NOT_APPLICABLE",
            WarningCode::PollaczekOverflow => "W_POLLACZEK_OVERFLOW",
            WarningCode::LimitAtZero => "W_LIMIT_AT_ZERO",
            WarningCode::ImaginaryResidual => "W_IMAGINARY_RESIDUAL",
            WarningCode::Hypothesis => "W_HYPOTHESIS",
        }
    }
}
