use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("experiment `{experiment}`: {source}")]
    Numerical {
        experiment: String,
        #[source]
        source: berryphase::Error,
    },

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// 0 success, 2 config error, 3 numerical failure, 4 adiabaticity lost.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { source: berryphase::Error::AdiabaticityLost { .. }, .. } => 4,
            CliError::Numerical { .. } | CliError::Output(_) => 3,
        }
    }

    /// Loop-construction failures (bad CSV, open loop, unknown coordinate)
    /// are the user's input, not a numerical failure.
    pub(crate) fn from_core(experiment: &str, e: berryphase::Error) -> Self {
        use berryphase::Error as E;
        match e {
            E::Csv(_) | E::OpenLoop { .. } | E::UnknownCoordinate(_) | E::UnknownFamily(_) | E::InvalidLoop(_) => {
                CliError::Config(format!("experiment `{experiment}`: {e}"))
            }
            source => CliError::Numerical { experiment: experiment.to_string(), source },
        }
    }
}
