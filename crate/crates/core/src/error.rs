use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scenario component violates one of its construction invariants.
    #[error("invalid scenario: {invariant}")]
    InvalidScenario { invariant: String },

    #[error("time {t} is outside the domain [{lower}, {upper}]")]
    OutOfDomain { t: f64, lower: f64, upper: f64 },

    #[error("agent index {index} out of range for {count} agents")]
    InvalidAgent { index: usize, count: usize },

    #[error("delay function violated its bound at t = {t}: {detail}")]
    DelayBound { t: f64, detail: String },

    #[error(
        "influence function returned {value} at probed arguments (declared sup bound K = {k})"
    )]
    InfluenceBound { value: f64, k: f64 },

    #[error("kernel integral h(t) = {value} is not positive at t = {t}")]
    NonPositiveKernel { t: f64, value: f64 },

    #[error("non-finite state or derivative at t = {t}")]
    NonFinite { t: f64 },

    #[error("certificate refused: {0}")]
    CertificateRefused(String),

    #[error("decay rate undefined: {0}")]
    RateUndefined(String),

    #[error("empirical measure error: {0}")]
    Measure(String),

    #[error("mean-field ladder member N = {agents} failed certification: {reason}")]
    LadderMember { agents: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(invariant: impl Into<String>) -> Self {
        Error::InvalidScenario {
            invariant: invariant.into(),
        }
    }
}
