use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A query left the domain of the object it was asked about
    /// (e.g. a box outside a coloring's bounding box).
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    /// The halfspace intersection is unbounded where a polytope was required.
    #[error("unbounded halfspace intersection")]
    Unbounded,
    /// An operation that needs a nonempty polytope received an empty one.
    #[error("empty polytope")]
    EmptyPolytope,
    /// An exhaustive enumeration would exceed the configured size guard.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    /// A combinatorial pattern does not match the instance it was built for.
    #[error("inconsistent pattern: {0}")]
    Pattern(String),
    /// A point handed to an evaluator lies outside the pattern's validity
    /// region.
    #[error("point outside pattern region")]
    OutsideRegion,
}

pub type Result<T> = std::result::Result<T, Error>;
