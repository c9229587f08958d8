use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported rule: {0}")]
    UnsupportedRule(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unresolved manipulator: voter {0} reached evaluation with a blank ballot")]
    UnresolvedManipulator(usize),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("budget exceeded: {states} states, budget {budget}")]
    Budget { states: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Malformed(msg.into()))
}
