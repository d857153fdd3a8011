use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] ultrapoly::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("`{0}` is neither a readable file nor a built-in dataset ({1})")]
    NoInput(String, String),

    #[error("format `{format}` is not available for `{command}`")]
    Format { command: &'static str, format: String },

    #[error("`{0}` is not a rational number")]
    BadNumber(String),

    #[error("candidate violates {0}")]
    Violated(String),

    /// Certificate and oracle disagree; the report is still written.
    #[error("internal disagreement: {0}")]
    Disagreement(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Disagreement(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
