use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Variants are split so that callers (and the CLI exit codes) can tell a
/// malformed input apart from an exhausted compute budget.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is sampling-only; {0} needs an enumerable support")]
    NotEnumerable(&'static str),

    #[error("support has {atoms} atoms, over the enumeration cap of {cap}")]
    SupportTooLarge { atoms: u128, cap: u128 },

    #[error("certificate budget exceeded: {needed} atom visits needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("tail event too rare: {accepted} of {requested} acceptances after {draws} draws (budget {budget})")]
    TailTooRare {
        requested: u64,
        accepted: u64,
        draws: u64,
        budget: u64,
    },

    #[error("oracle returned {value} for variable {index}, outside [0, 1]")]
    OracleOutOfRange { index: usize, value: f64 },

    #[error("budget formula overflow: {0}")]
    BudgetOverflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}
