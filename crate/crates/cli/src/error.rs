use std::fmt;

/// Pipeline stage named in every failure message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Stats,
    Tda,
    Cluster,
    Eval,
    Sensitivity,
    Plot,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Stats => "stats",
            Stage::Tda => "tda",
            Stage::Cluster => "cluster",
            Stage::Eval => "eval",
            Stage::Sensitivity => "sensitivity",
            Stage::Plot => "plot",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub currency: Option<String>,
    pub message: String,
}

impl StageError {
    pub fn msg(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, currency: None, message: message.into() }
    }

    pub fn for_currency(stage: Stage, currency: &str, message: impl Into<String>) -> Self {
        Self { stage, currency: Some(currency.to_string()), message: message.into() }
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.currency {
            Some(c) => write!(f, "[{}] {c}: {}", self.stage, self.message),
            None => write!(f, "[{}] {}", self.stage, self.message),
        }
    }
}

impl std::error::Error for StageError {}

/// Attach a stage (and optionally a currency) to any displayable error.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
    fn at_currency(self, stage: Stage, currency: &str) -> Result<T, StageError>;
}

impl<T, E: fmt::Display> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError::msg(stage, e.to_string()))
    }

    fn at_currency(self, stage: Stage, currency: &str) -> Result<T, StageError> {
        self.map_err(|e| StageError::for_currency(stage, currency, e.to_string()))
    }
}
