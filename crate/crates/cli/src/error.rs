use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Argument syntax, already rendered by clap.
    #[error("{0}")]
    Usage(String),

    /// `--help` or `--version` output.
    #[error("{0}")]
    Help(String),

    #[error("missing required parameter --{key} for `{subcommand}`")]
    MissingParameter { key: &'static str, subcommand: String },

    #[error("invalid --{key} `{value}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("unknown key `{key}` on line {line} of the config file")]
    UnknownKey { key: String, line: usize },

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("no subcommand given on the command line or in the config file")]
    NoSubcommand,

    #[error("config file names subcommand `{file}` but `{cli}` was requested")]
    SubcommandConflict { file: String, cli: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Lib(#[from] lamptree::Error),

    #[error("selftest: {failed} of {total} checks failed")]
    SelftestFailed { failed: usize, total: usize },
}

impl CliError {
    /// 2 for budget and resource refusals, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_resource_refusal() => 2,
            _ => 1,
        }
    }

    pub(crate) fn invalid(key: &str, value: &str, reason: impl Into<String>) -> Self {
        CliError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
