use std::fmt;
use std::path::Path;

/// Failure of one CLI run, split by who is at fault; the split decides the
/// exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, missing or malformed files, invalid data. Exit code 1.
    User(String),
    /// Solver failure or a bug. Exit code 2.
    Internal(String),
}

impl CliError {
    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::User(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::User(m) | CliError::Internal(m) => m,
        };
        // Diagnostics are one line.
        f.write_str(&msg.replace('\n', " "))
    }
}

impl From<mapdist::Error> for CliError {
    fn from(e: mapdist::Error) -> Self {
        if e.is_user_error() {
            CliError::User(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_fault() {
        assert_eq!(CliError::from(mapdist::Error::InvalidInput("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(mapdist::Error::NotConverged(10)).exit_code(), 2);
        assert_eq!(CliError::user("a\nb").to_string(), "a b");
    }
}
