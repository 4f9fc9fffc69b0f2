use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HfvsError {
    #[error("non-physical state: density {density:e}, pressure {pressure:e}")]
    NonPhysicalState { density: f64, pressure: f64 },

    #[error("degenerate eigensystem: sound speed {sound_speed:e}")]
    DegenerateEigensystem { sound_speed: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step {step} rejected at t = {time:e} (dt = {dt:e}), cell {cell:?}: {source}")]
    StepRejected {
        step: usize,
        time: f64,
        dt: f64,
        cell: (usize, usize),
        #[source]
        source: Box<HfvsError>,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed reference file {path}: {message}")]
    MalformedReference { path: String, message: String },
}

impl From<std::io::Error> for HfvsError {
    fn from(e: std::io::Error) -> Self {
        HfvsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HfvsError>;
