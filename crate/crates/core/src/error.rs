use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("`{field}` = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },

    /// The PU data queue is not stable at this arrival rate, so the
    /// quantities derived from `lambda_p / mu_p` are undefined.
    #[error("PU queue unstable: lambda_p = {lambda_p} is not below mu_p = {mu_p}")]
    UnstablePu { lambda_p: f64, mu_p: f64 },

    #[error("crossover undefined: p_pd_success is zero")]
    UndefinedCrossover,

    #[error("invalid configuration: {0}")]
    Config(String),

    /// `origin` says where the key came from, e.g. `line 3` or `--set`.
    #[error("unknown configuration key `{key}` ({origin})")]
    UnknownKey { key: String, origin: String },

    #[error("missing required key(s): {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("unknown experiment `{name}`; valid names: {}", .valid.join(", "))]
    UnknownExperiment { name: String, valid: Vec<String> },

    #[error("malformed boundary CSV: {0}")]
    Csv(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
