//! Library surface of the `starforge` CLI: domain-file parsing, query
//! dispatch, the corpus runner, and oracle cross-checks. The binary in
//! `main.rs` is a thin argument-parsing shell over these modules.

pub mod corpus;
pub mod domfile;
pub mod oraclecmd;
pub mod report;

/// Errors carrying the exit code the contract assigns them.
#[derive(Clone, Debug)]
pub enum CliError {
    /// Bad invocation, unknown query, or unknown ideal/prime name (exit 2).
    Usage(String),
    /// Domain-file schema violation (exit 2).
    Schema(String),
    /// Constructor tree fails to build, or a downstream computation aborts (exit 3).
    Build(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Build(m) => write!(f, "build error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    #[must_use]
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) => 2,
            CliError::Build(_) => 3,
        }
    }
}
