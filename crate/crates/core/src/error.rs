use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label space: {0}")]
    LabelSpace(String),

    #[error("invalid tuple: {actor}-{action}")]
    InvalidTuple { actor: String, action: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("pairwise term is not a metric: {0}")]
    NotMetric(String),

    #[error("node {0} has no feasible label")]
    Infeasible(usize),

    #[error("search space of {labels}^{nodes} labelings exceeds the brute-force bound of 1e7")]
    SearchSpace { labels: usize, nodes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation: {0}")]
    Evaluation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
