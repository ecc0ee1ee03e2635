use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("basis index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: String, n: u32 },
    #[error("state is not normalizable: {0}")]
    NotNormalizable(String),
    #[error("dense representation requested for n={n} above the cap of {cap} qubits")]
    DenseCapExceeded { n: u32, cap: u32 },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid rate {name}={value}: {reason}")]
    InvalidRate {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unknown device profile '{0}'")]
    UnknownDevice(String),
    #[error("asymmetric readout rates unavailable for device '{0}'")]
    AsymmetricUnavailable(String),
    #[error("unknown architecture '{0}'")]
    UnknownArchitecture(String),
    #[error("circuit plan has no concrete gate list")]
    NoGateList,
    #[error("too few shots: {shots} total for {grid_points} grid points")]
    TooFewShots { shots: u64, grid_points: u64 },
    #[error("invalid budget query: {0}")]
    InvalidQuery(String),
    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty result table")]
    EmptyTable,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Stable snake_case tag for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroQubits => "zero_qubits",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::NotNormalizable(_) => "not_normalizable",
            Error::DenseCapExceeded { .. } => "dense_cap_exceeded",
            Error::NotPowerOfTwo(_) => "not_power_of_two",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidRate { .. } => "invalid_rate",
            Error::UnknownDevice(_) => "unknown_device",
            Error::AsymmetricUnavailable(_) => "asymmetric_unavailable",
            Error::UnknownArchitecture(_) => "unknown_architecture",
            Error::NoGateList => "no_gate_list",
            Error::TooFewShots { .. } => "too_few_shots",
            Error::InvalidQuery(_) => "invalid_query",
            Error::ClosedFormUnavailable(_) => "closed_form_unavailable",
            Error::Config(_) => "config",
            Error::EmptyTable => "empty_table",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Toml(_) => "toml",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
