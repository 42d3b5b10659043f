use thiserror::Error;

/// Errors produced anywhere in the certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inversion of zero")]
    InversionOfZero,

    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    #[error("precision exhausted at {cap} bits: {what}")]
    PrecisionExhausted { cap: u32, what: String },

    #[error("continued fraction depth {depth} insufficient: {what}")]
    DepthInsufficient { depth: usize, what: String },

    #[error("unexplained degenerate instance {index} in {family}")]
    UnexplainedDegenerate { family: String, index: String },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("proof does not close: {0}")]
    NonClosing(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed report: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
