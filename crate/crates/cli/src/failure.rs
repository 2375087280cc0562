use thiserror::Error;

/// Command failure, carrying the process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("nonphysical input: {0}")]
    NonPhysical(String),
    #[error("divergent dynamics: {0}")]
    Divergent(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::NonPhysical(_) => 2,
            Failure::Divergent(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
}

impl From<gaussdyn::Error> for Failure {
    fn from(e: gaussdyn::Error) -> Self {
        use gaussdyn::Error as E;
        match e {
            E::NonPhysical { .. } | E::PhysicalityLost { .. } => {
                Failure::NonPhysical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
