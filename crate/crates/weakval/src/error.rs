use thiserror::Error;

/// Everything that can stop a scenario.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ValidationError: `{field}` {constraint}")]
    Validation { field: String, constraint: String },
    #[error(transparent)]
    Model(#[from] weakval_core::Error),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("CsvError: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn validation(field: &str, constraint: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.to_string(),
            constraint: constraint.into(),
        }
    }

    /// 2 for bad input, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => 2,
            CliError::Model(_) | CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Model(e) => e.kind(),
            CliError::Io(_) => "IoError",
            CliError::Csv(_) => "CsvError",
        }
    }

    /// Single-line diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        format!("weakval: error: {}", self.to_string().replace('\n', " "))
    }
}
