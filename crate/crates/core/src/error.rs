use std::path::PathBuf;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("packing catalog has no entry for {0} points")]
    MissingPacking(usize),

    #[error("packing catalog line {line}: {msg}")]
    CatalogParse { line: usize, msg: String },

    #[error("invalid constellation: {0}")]
    Constellation(String),

    #[error("input ensemble of {size} vectors exceeds the cap of {cap}")]
    EnsembleTooLarge { size: u128, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("noise variance must be positive and finite, got {0}")]
    NoiseVariance(f64),

    #[error("exact engine supports at most {cap} receive antennas, got {m}")]
    ExactCapExceeded { m: usize, cap: usize },

    #[error("Monte-Carlo engines need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("failed to parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
