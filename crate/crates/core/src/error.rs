use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("{function}: argument {name} = {value} is outside the domain")]
    Domain {
        function: &'static str,
        name: &'static str,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Effective density beyond the hard-core packing bound 1/(pi r0^2).
    #[error("effective density {lambda_eff} is unreachable with guard radius {r0} m (requires lambda*pi*r0^2 < 1)")]
    OutOfRange { lambda_eff: f64, r0: f64 },

    #[error("infeasible design target: {0}")]
    Infeasible(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit status for the command-line front end: 1 for bad input,
    /// 2 for infeasible targets, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Config(_) => 1,
            Error::Infeasible(_) | Error::OutOfRange { .. } => 2,
            Error::Numeric(_) => 3,
        }
    }

    pub(crate) fn domain(function: &'static str, name: &'static str, value: f64) -> Self {
        Error::Domain {
            function,
            name,
            value,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
