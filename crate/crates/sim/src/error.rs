use std::path::PathBuf;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] risnoma_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config file: {0}")]
    ConfigFile(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("unknown preset `{0}` (expected fig3..fig8)")]
    UnknownPreset(String),

    #[error("gamma fit: {0}")]
    Fit(&'static str),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}
