use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("{what} exceeds budget: requested {requested}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// A radius-`radius` ball around `vertex` does not fit inside the arena.
    #[error(
        "insufficient margin: ball of radius {radius} around vertex {vertex} (depth {depth}) leaves the arena of radius {arena_radius}"
    )]
    InsufficientMargin {
        vertex: usize,
        depth: u32,
        radius: u32,
        arena_radius: u32,
    },

    #[error("operator has no vertices")]
    EmptyOperator,

    #[error("vertex {0} is not a member of the mask")]
    NotAMember(usize),

    #[error("member set is not connected ({reached} of {members} members reachable from the root)")]
    Disconnected { reached: usize, members: usize },

    #[error("eigensolver did not converge after {iterations} matrix-vector products (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for refusals caused by resource limits rather than bad input.
    pub fn is_resource_refusal(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::NoConvergence { .. } | Error::ThreadPool(_)
        )
    }
}
