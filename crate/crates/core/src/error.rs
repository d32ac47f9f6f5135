use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("per-resource fee must be positive, got s = {0}")]
    NonPositiveFee(f64),
    #[error("costs must be nonnegative, got {name} = {value}")]
    NegativeCost { name: &'static str, value: f64 },
    #[error("per-resource fee s = {s} is below the marginal investment cost gamma = {gamma}")]
    FeeBelowCost { s: f64, gamma: f64 },
    #[error("common valuation v* = {v_star} does not guarantee full coverage (need v* > c + 2 = {bound})")]
    ValuationTooLow { v_star: f64, bound: f64 },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("leader investment must be positive, got I_L = {0}")]
    ZeroLeaderInvestment(f64),
    #[error("follower reservation I_F = {follower} exceeds leader investment I_L = {leader}")]
    InvestmentOrderViolated { leader: f64, follower: f64 },
    #[error("singular denominator 9 s I_L^2 - 1 = {0} on the interior branch")]
    SingularDenominator(f64),
    #[error(
        "benchmark transport costs must be positive, got t_L = {t_leader}, t_F = {t_follower}"
    )]
    NonPositiveTransport { t_leader: f64, t_follower: f64 },
    #[error("invalid grid [{lo}, {hi}] with step {step}: {reason}")]
    InvalidGrid {
        lo: f64,
        hi: f64,
        step: f64,
        reason: &'static str,
    },
    #[error("best-response iteration did not reach a fixed point within {0} rounds")]
    NoConvergence(usize),
    #[error("agent at x = {position} has best utility {utility} < 0; raise v*")]
    CoverageViolated { position: f64, utility: f64 },
    #[error("agent count must be at least 10, got {0}")]
    TooFewAgents(usize),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("nothing to emit")]
    EmptyRows,
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GameError {
    /// True for errors caused by the caller's inputs rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, GameError::IoFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, GameError>;
