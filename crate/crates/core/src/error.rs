use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),

    #[error("vertex {0} is outside the graph")]
    VertexOutOfRange(usize),

    #[error("lumping map is not surjective: class {0} has no state")]
    NonSurjective(usize),

    #[error("lumping map covers {lumping} states but the graph has {graph}")]
    SizeMismatch { lumping: usize, graph: usize },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("the lumpable family is vacuous")]
    Vacuous,

    #[error("matrix is not lumpable (max block-sum violation {0:e})")]
    NotLumpable(f64),

    #[error("edge function is not positive on its support or has off-support mass")]
    NotPositive,

    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("edge functions have different supports")]
    SupportMismatch,

    #[error("weights sum to {0}, not 1")]
    WeightSum(f64),

    #[error("vector dimensions disagree ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("block ({0}, {1}) is not in the lumped graph")]
    BlockNotInLumpedGraph(usize, usize),

    #[error("block ({0}, {1}) is not a multi-row merging block")]
    NotMultiRowMerging(usize, usize),

    #[error("invalid eta pair: {0}")]
    InvalidEta(String),

    #[error("edge set is not contained in the larger edge set")]
    NotNested,

    #[error("{0} states exceeds the enumeration bound of {1}")]
    BoundExceeded(usize, usize),

    #[error("class sizes {sizes:?} do not sum to {states}")]
    ClassSizes { sizes: Vec<usize>, states: usize },

    #[error("removing the diagonal blocks leaves a vacuous family")]
    StripVacuous,

    #[error("parse error: {0}")]
    Parse(String),
}
