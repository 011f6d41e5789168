use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resource cap `{cap_name}` exceeded: {needed} > {cap}")]
    Resource {
        cap_name: String,
        needed: u128,
        cap: u128,
    },

    #[error("capability error: {0}")]
    Capability(String),

    #[error("inconclusive: {0}; enlarge the window")]
    Inconclusive(String),

    #[error("search failure: {0}")]
    Search(String),

    #[error("order inconsistency: {0}")]
    Order(String),

    #[error("admissibility failure: {0}")]
    Admissibility(String),
}

pub type Result<T> = std::result::Result<T, Error>;
