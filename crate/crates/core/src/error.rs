use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("unsupported scheme/node_count combination: {scheme} with {node_count} node(s)")]
    Unsupported { scheme: String, node_count: usize },
    #[error("state {0} is not part of the space")]
    UnknownState(String),
    #[error("invalid fragment level: {0}")]
    InvalidLevel(String),
    #[error("invalid cavity mode: {0}")]
    InvalidMode(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("invalid pulse configuration: {0}")]
    Pulse(String),
    #[error("two-photon detuning {detuning:.3e} rad/us on {branch} exceeds tolerance {tolerance:.1e}")]
    RamanDetuning { branch: String, detuning: f64, tolerance: f64 },
    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),
    #[error("mode bookkeeping mismatch: {0}")]
    ModeMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error("density matrix dimension {got} does not match space dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("step size underflow at t = {t} us (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state encountered at t = {t} us")]
    NonFinite { t: f64 },
    #[error("invalid integration request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("operation requires scheme {expected}, got {got}")]
    WrongScheme { expected: String, got: String },
    #[error("zero total emission: symmetry undefined")]
    ZeroEmission,
    #[error("mode index {0} not present in the model")]
    UnknownMode(usize),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("dark state undefined: {0}")]
    DarkStateUndefined(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle requires a lossless model: {0}")]
    Dissipative(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("preset `{preset}` has insufficient parameters to run: {missing}")]
    InsufficientParameters { preset: String, missing: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl ScenarioError {
    /// Process exit code: 1 usage/parse, 2 validation, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(ConfigError::Parse { .. })
            | ScenarioError::Config(ConfigError::Io { .. })
            | ScenarioError::Config(ConfigError::UnknownPreset(_))
            | ScenarioError::Io(_) => 1,
            ScenarioError::Config(_)
            | ScenarioError::Model(_)
            | ScenarioError::Feasibility(_)
            | ScenarioError::Calibration(_) => 2,
            ScenarioError::Propagation(_)
            | ScenarioError::Observable(_)
            | ScenarioError::Json(_) => 3,
        }
    }
}
