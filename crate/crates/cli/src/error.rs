use std::fmt;

/// CLI failure modes, mapped onto exit codes: configuration problems exit
/// with 1, numeric failures with 2.
#[derive(Debug)]
pub enum CliError {
    Config { field: String, message: String },
    Numeric { message: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError::Numeric {
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Numeric { .. } => 2,
        }
    }

    /// Map a library error raised while acting on config-derived values:
    /// input rejections point back at the config field, anything numeric
    /// keeps its own category.
    pub fn from_lib(field: &str, err: latsym::Error) -> Self {
        match err {
            latsym::Error::Input(msg) => CliError::config(field, msg),
            latsym::Error::Numeric(msg) => CliError::numeric(msg),
            other => CliError::numeric(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => {
                write!(f, "config error at `{field}`: {message}")
            }
            CliError::Numeric { message } => write!(f, "numeric error: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
