use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid field parameters: {0}")]
    FieldParams(String),
    #[error("modulus {0} is reducible")]
    ReducibleModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operand is not an element of this field: {0}")]
    MixedField(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector has no Krylov sequence")]
    ZeroVector,
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("incompatible space kind: {0}")]
    IncompatibleKind(String),
    #[error("restriction to the given subspace is degenerate")]
    DegenerateRestriction,
    #[error("linearly dependent input basis")]
    DependentBasis,
    #[error("not a similitude of the form")]
    NotSimilitude,
    #[error("multiplier {0} is not attainable for this space")]
    UnattainableMultiplier(String),
    #[error("enumeration of {candidates} candidates exceeds budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("semilinear map has the wrong twist for this tower")]
    WrongTwist,
    #[error("search for {0} failed")]
    SearchFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("survey failed at element {}: {}", .0.index, .0.reason)]
    SurveyFailed(Box<crate::verify::SurveyFailure>),
    /// An identity that the construction guarantees did not hold.
    #[error("internal invariant violated: {identity} ({detail})")]
    Invariant {
        identity: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn invariant(identity: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            identity,
            detail: detail.into(),
        }
    }
}
