use thiserror::Error;

pub type Result<T, E = FrechetError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrechetError {
    /// Inputs disagree with the space or configuration they are used with.
    #[error("configuration error: {0}")]
    Config(String),
    /// A single argument is malformed (wrong dimension, empty set, non-symmetric matrix, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative solver ran out of iterations; carries the last iterate flattened to reals.
    #[error("{solver} did not converge after {iterations} iterations (last objective {last_value})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        last_value: f64,
        last_iterate: Vec<f64>,
    },
    /// A failure inside a sequence of experiments, tagged with the sample size it occurred at.
    #[error("at n = {n}: {source}")]
    AtSample {
        n: usize,
        #[source]
        source: Box<FrechetError>,
    },
}

impl FrechetError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Self::Argument(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Self::Unsupported(msg.into())
    }

    pub fn at_sample(self, n: usize) -> Self {
        Self::AtSample {
            n,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through sample-size tags.
    pub fn root(&self) -> &FrechetError {
        match self {
            Self::AtSample { source, .. } => source.root(),
            other => other,
        }
    }
}
