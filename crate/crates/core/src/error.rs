use thiserror::Error;

use crate::kernel::{KernelError, ParseError};

/// Broad category of an error, used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input violates a documented precondition.
    Input,
    /// The input was fine but a verification surfaced a mathematical finding.
    Finding,
    /// Something the toolkit believes cannot happen.
    Internal,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("the polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial has constant or linear terms")]
    LowOrderTerms,
    #[error("polynomial is not quasihomogeneous: the weight system A*q = 1 is inconsistent")]
    NotQuasihomogeneous,
    #[error("weights are not unique: exponent matrix has rank {rank} < {nvars}")]
    NonUniqueWeights { rank: usize, nvars: usize },
    #[error("weight of `{var}` is {weight}, outside (0,1)")]
    WeightOutOfRange { var: String, weight: String },
    #[error("polynomial {0} is degenerate (infinite-dimensional Jacobian quotient)")]
    Degenerate(String),
    #[error("polynomial is not admissible: {0}")]
    Inadmissible(String),
    #[error("weights differ: {0} vs {1}")]
    WeightMismatch(String, String),
    #[error("variable count differs: {0} vs {1}")]
    VariableCountMismatch(usize, usize),
    #[error("invertible block {0} matches no fermat, loop or chain shape")]
    UnrecognizedAtomic(String),
    #[error("symmetry group is infinite (exponent matrix rank {rank} < {nvars})")]
    InfiniteGroup { rank: usize, nvars: usize },
    #[error("phase vector has {got} entries, expected {expected}")]
    PhaseLength { got: usize, expected: usize },
    #[error("{element} is not a symmetry: monomial {monomial} picks up phase {phase}")]
    NotASymmetry { element: String, monomial: String, phase: String },
    #[error("{0} is not in SL: phase sum is not an integer")]
    NotInSl(String),
    #[error("restriction of W to the fixed locus of {element} is degenerate: {poly}")]
    RestrictedDegenerate { element: String, poly: String },
    #[error("Hessian of {0} reduces to zero in its Milnor ring")]
    HessianZero(String),
    #[error("Hessian normal form {0} is not a single term")]
    HessianNotMonomial(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("gamma factor is not a polynomial: {0}")]
    GammaNotDivisible(String),
    #[error("pair is not well behaved: {0}")]
    NotWellBehaved(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("sector image mismatch: {0}")]
    SectorImageMismatch(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("constraint system is not solvable by the binomial solver: {0}")]
    NotBinomialSolvable(String),
    #[error("equivalence search inconclusive: {0}")]
    SearchInconclusive(String),
    #[error("variables overlap: {0}")]
    VariableOverlap(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Kernel(KernelError::Parse(e))
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Kernel(_)
            | ZeroPolynomial
            | LowOrderTerms
            | NotQuasihomogeneous
            | NonUniqueWeights { .. }
            | WeightOutOfRange { .. }
            | Degenerate(_)
            | Inadmissible(_)
            | WeightMismatch(..)
            | VariableCountMismatch(..)
            | PhaseLength { .. }
            | NotASymmetry { .. }
            | NotInSl(_)
            | DimensionMismatch(..)
            | BasisMismatch(_)
            | VariableOverlap(_)
            | Unsupported(_)
            | InfiniteGroup { .. } => ErrorClass::Input,
            RestrictedDegenerate { .. }
            | GammaNotDivisible(_)
            | NotWellBehaved(_)
            | PreconditionFailed(_)
            | SectorImageMismatch(_)
            | NotBinomialSolvable(_)
            | SearchInconclusive(_) => ErrorClass::Finding,
            UnrecognizedAtomic(_) | HessianZero(_) | HessianNotMonomial(_) | InvariantViolation(_) => {
                ErrorClass::Internal
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
