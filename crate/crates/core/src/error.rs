use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by construction and operation preconditions.
///
/// Mathematical outcomes (an empty martingale-measure set, a missing
/// witness) are encoded as values, not errors; an `Error` always means a
/// caller handed in something outside an operation's contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("probability weight must be strictly positive (outcome {0})")]
    NonPositiveProbability(usize),
    #[error("probabilities must sum to exactly 1, got {0}")]
    ProbabilitySumNotOne(String),
    #[error("filtration does not refine in time (partition at {0} is not refined by partition at {1})")]
    FiltrationNotRefining(usize, usize),
    #[error("invalid partition: {0}")]
    PartitionInvalid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("process is not adapted to the filtration")]
    NotAdapted,
    #[error("integrand is not predictable for the filtration")]
    NotPredictable,
    #[error("process is not a martingale")]
    NotMartingale,
    #[error("structure condition fails: drift moves on a block where the predictable variation is zero")]
    StructureConditionFails,
    #[error("jump condition violated: alpha * increment reaches 1")]
    JumpConditionViolated,
    #[error("measure is not equivalent to the base measure")]
    NotEquivalent,
    #[error("not a density: {0}")]
    NotADensity(String),
    #[error("the two filtrations are not independent under the measure")]
    FiltrationsNotIndependent,
    #[error("constraint system has no solution")]
    InfeasibleSystem,
    #[error("measure does not satisfy the polytope constraints")]
    NotInPolytope,
    #[error("no equivalent martingale measure exists")]
    NoEmm,
    #[error("sequence of partitions is not a filtration")]
    NotAFiltration,
    #[error("the second filtration does not contain the first at every time")]
    NotAnEnlargement,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}
