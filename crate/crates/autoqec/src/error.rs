use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("Hilbert dimension {dim} exceeds the dense cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("superoperator dimension {dim} is not a perfect square")]
    NotPerfectSquare { dim: usize },

    #[error("eigenvalue cluster not separated: {0}")]
    ClusterNotSeparated(String),

    #[error("matrix appears defective and no propagation fallback applies: {0}")]
    Defective(String),

    #[error("singular complement: {0}")]
    SingularComplement(String),

    #[error("codewords are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("state is not supported in the code space (residual {residual:.3e})")]
    NotInCodeSpace { residual: f64 },

    #[error("Knill-Laflamme condition not satisfied (residual {residual:.3e})")]
    KnillLaflammeFailed { residual: f64 },

    #[error("Gram-Schmidt kept-index pattern differs across codewords: mu=0 kept {expected:?}, mu={mu} kept {got:?}")]
    InconsistentDependency {
        mu: usize,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("overlap table is not mu-independent (max deviation {deviation:.3e})")]
    MuDependentOverlap { deviation: f64 },

    #[error("unknown builtin code `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid preventive target: {0}")]
    InvalidPhi(String),

    #[error("negative jump rate {0}")]
    NegativeRate(f64),

    #[error("steady state on S_0 is not unique (kernel dimension {0})")]
    NonUniqueSteadyState(usize),

    #[error("nothing to fit: {0}")]
    NothingToFit(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("linear algebra backend error: {0}")]
    Lapack(#[from] ndarray_linalg::error::LinalgError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
