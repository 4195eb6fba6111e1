//! Scenario runner and acceptance harness for `brw-core`.

use std::path::{Path, PathBuf};

pub mod modelfile;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod verify;

pub use modelfile::{ConfigError, ModelDesc, Subject};
pub use run::{run, Outcome};
pub use scenario::{Scenario, Task};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] brw_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 for malformed input, 3 for numerically undecided questions, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(brw_core::Error::Undecided(_)) => 3,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let undecided: CliError = brw_core::Error::Undecided("sign".into()).into();
        assert_eq!(undecided.exit_code(), 3);
        let config: CliError = ConfigError::new(modelfile::Origin::Line(4), "bad").into();
        assert_eq!(config.exit_code(), 2);
        assert_eq!(config.to_string(), "line 4: bad");
        let other: CliError = brw_core::Error::SpanRequired.into();
        assert_eq!(other.exit_code(), 1);
    }
}
