use thiserror::Error;

/// Coarse classification used by the command line and the C ABI to pick
/// exit codes / status values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Bad invocation: malformed flags, box, tolerances.
    Usage,
    /// Unknown model/observable, malformed model file, semantic violations.
    Model,
    /// Quadrature, root finding, evaluation or eigensolver failure.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),

    #[error("sqrt of negative value {value} in `{expr}`")]
    NegativeSqrt { value: f64, expr: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("evaluation failed at state {state:?}: {source}")]
    AtState {
        state: Vec<i64>,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot differentiate `{0}`")]
    NotDifferentiable(String),

    #[error("constraint `{constraint}` is not affine in the action variables: {reason}")]
    NonAffine { constraint: String, reason: String },

    #[error("first-degree only: {0}")]
    Degree(String),

    #[error("profile must depend only on A{axis}: found `{symbol}`")]
    ProfileNotLocal { axis: usize, symbol: String },

    #[error("model error at {path}: {message}")]
    Model { path: String, message: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("half-integer spin lattice requires offset mode")]
    HalfIntegerSpin,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different state spaces")]
    MixedSpaces,

    #[error("operator is not Hermitian: max asymmetry {asymmetry:e} at entry ({row}, {col})")]
    NotHermitian {
        asymmetry: f64,
        row: usize,
        col: usize,
    },

    #[error("dimension {0} exceeds the dense eigensolver cap of {1}")]
    TooLarge(usize, usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("profile not quantizable on this lattice: axis {axis}, state {state:?} has beta = {beta:e}")]
    NotQuantizable {
        axis: usize,
        state: Vec<i64>,
        beta: f64,
    },

    #[error("inconsistent quantization on axis {axis}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    InconsistentQuantization {
        axis: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("energy {energy} outside the oscillation range ({min}, {max})")]
    EnergyOutOfRange { energy: f64, min: f64, max: f64 },

    #[error("root bracketing failed on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("root finder did not converge in {0} iterations")]
    RootNoConvergence(usize),

    #[error("quadrature did not converge: estimated error {estimate:e} after {levels} levels")]
    Quadrature { estimate: f64, levels: usize },

    #[error("action is not strictly increasing between E = {e0} and E = {e1}")]
    NotMonotone { e0: f64, e1: f64 },

    #[error("complete elliptic integral K diverges for k = {0}")]
    EllipticDomain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn category(&self) -> Category {
        use Error::*;
        match self {
            InvalidArgument(_) => Category::Usage,
            NegativeSqrt { .. }
            | Evaluation(_)
            | TooLarge(..)
            | EigenNoConvergence(_)
            | EnergyOutOfRange { .. }
            | Bracket { .. }
            | RootNoConvergence(_)
            | Quadrature { .. }
            | NotMonotone { .. }
            | EllipticDomain(_) => Category::Numerical,
            AtState { source, .. } => source.category(),
            _ => Category::Model,
        }
    }

    pub(crate) fn at_state(state: &[i64], source: Error) -> Error {
        Error::AtState {
            state: state.to_vec(),
            source: Box::new(source),
        }
    }

    pub(crate) fn model(path: impl Into<String>, message: impl Into<String>) -> Error {
        Error::Model {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
