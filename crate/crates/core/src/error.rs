use thiserror::Error;

/// A scalar literal that is not of the form `p` or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scalar literal `{0}`")]
pub struct ParseScalarError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector {index} of the smaller family is not in the span of the larger one")]
    SubspaceNotContained { index: usize },
    #[error("iterated coproduct of order {order} depends on the bracketing")]
    BracketingMismatch { order: usize },
    #[error("operator {op} in degree {degree} does not descend to the realized space")]
    IllDefined { op: String, degree: usize },
    #[error("normalization map fails to conjugate {op} in degree {degree}")]
    ConjugationFailure { op: String, degree: usize },
    #[error("{what} fails in degree {degree}")]
    NotAComplex { what: String, degree: usize },
    #[error("{map} does not commute with {op} in degree {degree}")]
    ChainMapFailure { map: String, op: String, degree: usize },
    #[error("input cochain of degree {degree} is not a cocycle")]
    NotACocycle { degree: usize },
    #[error("explicit formula differs from the composed map in {} coordinates", .difference.len())]
    MismatchWithAw { difference: Vec<(usize, String)> },
    #[error("trace is not a twisted invariant trace: {}", .violations.join("; "))]
    NotInvariantTrace { violations: Vec<String> },
    #[error("bidegree (p={p}, q={q}) exceeds the supported range")]
    DegreeCapExceeded { p: usize, q: usize },
    #[error("invariant elements are not closed under the product")]
    NotClosed,
    #[error("coproduct does not descend to the relative quotient")]
    CoalgebraNotInduced,
    #[error("action does not descend to the relative quotient")]
    ActionNotDescended,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
