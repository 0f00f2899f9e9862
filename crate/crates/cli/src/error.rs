use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] liouville_ep::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    kind: &'a str,
    exit_code: i32,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        use liouville_ep::Error as E;
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
            CliError::Core(e) => match e {
                E::InvalidParams(_) => "InvalidParams",
                E::NonResonantInput { .. } => "NonResonantInput",
                E::DegenerateDressing => "DegenerateDressing",
                E::ConvergenceFailure(_) => "ConvergenceFailure",
                E::ToleranceNotMet { .. } => "ToleranceNotMet",
                E::TailNotConverged { .. } => "TailNotConverged",
                E::InvalidGrid(_) => "InvalidGrid",
            },
        }
    }

    /// Single-line JSON record for the error stream.
    pub fn record(&self) -> String {
        let code = self.exit_code();
        let rec = ErrorRecord {
            error: if code == 2 { "validation" } else { "numeric" },
            kind: self.kind(),
            exit_code: code,
            message: self
                .to_string()
                .lines()
                .map(str::trim)
                .collect::<Vec<_>>()
                .join(" "),
        };
        serde_json::to_string(&rec).expect("record serialises")
    }
}
