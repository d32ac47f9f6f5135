//! Market primitives: validated parameters, strategy profiles, transport
//! costs derived from investments, and the raw payoffs of both providers.
//!
//! The leader (infrastructure owner) invests `I_L` and leases `I_F <= I_L`
//! of it to the follower at a fee of `s` per squared unit. End users sit on
//! the unit interval with the leader at 0 and the follower at 1.

use serde::Serialize;

use crate::error::{GameError, Result};

/// Exogenous inputs of the game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams {
    /// Fee per squared leased resource unit.
    pub s: f64,
    /// Marginal cost of the leader's investment.
    pub gamma: f64,
    /// Marginal cost per end user.
    pub c: f64,
    /// Common valuation of a subscription. Cancels out of every closed form;
    /// only the discrete-agent oracle reads it.
    pub v_star: f64,
}

impl MarketParams {
    /// Valuation headroom above `c` used when callers do not pick `v_star`.
    pub const DEFAULT_VALUATION_MARGIN: f64 = 10.0;

    pub fn new(s: f64, gamma: f64, c: f64, v_star: f64) -> Result<Self> {
        validate_params(s, gamma, c, v_star)
    }

    /// Parameters with `v_star = c + 10`, comfortably inside full coverage.
    pub fn with_default_valuation(s: f64, gamma: f64, c: f64) -> Result<Self> {
        validate_params(s, gamma, c, c + Self::DEFAULT_VALUATION_MARGIN)
    }

    /// `sqrt(2 / (9 s))`: the smallest optimal leader investment, and the
    /// point where the follower stops reserving everything.
    pub fn boundary_investment(&self) -> f64 {
        boundary_investment(self.s)
    }
}

pub(crate) fn boundary_investment(s: f64) -> f64 {
    (2.0 / (9.0 * s)).sqrt()
}

pub fn validate_params(s: f64, gamma: f64, c: f64, v_star: f64) -> Result<MarketParams> {
    for (name, value) in [("s", s), ("gamma", gamma), ("c", c), ("v_star", v_star)] {
        if !value.is_finite() {
            return Err(GameError::NonFinite(name));
        }
    }
    if s <= 0.0 {
        return Err(GameError::NonPositiveFee(s));
    }
    if gamma < 0.0 {
        return Err(GameError::NegativeCost {
            name: "gamma",
            value: gamma,
        });
    }
    if c < 0.0 {
        return Err(GameError::NegativeCost {
            name: "c",
            value: c,
        });
    }
    if s < gamma {
        return Err(GameError::FeeBelowCost { s, gamma });
    }
    // Prices never leave [c, c + 1] at an interior equilibrium and transport
    // costs are at most 1, so v* > c + 2 keeps every end user subscribed.
    if v_star <= c + 2.0 {
        return Err(GameError::ValuationTooLow {
            v_star,
            bound: c + 2.0,
        });
    }
    Ok(MarketParams {
        s,
        gamma,
        c,
        v_star,
    })
}

/// Full strategy assignment: both investments and both end-user prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyProfile {
    #[serde(rename = "I_L")]
    pub leader_investment: f64,
    #[serde(rename = "I_F")]
    pub follower_investment: f64,
    #[serde(rename = "p_L")]
    pub leader_price: f64,
    #[serde(rename = "p_F")]
    pub follower_price: f64,
}

impl StrategyProfile {
    pub fn new(
        leader_investment: f64,
        follower_investment: f64,
        leader_price: f64,
        follower_price: f64,
    ) -> Result<Self> {
        check_investments(leader_investment, follower_investment)?;
        if !leader_price.is_finite() {
            return Err(GameError::NonFinite("p_L"));
        }
        if !follower_price.is_finite() {
            return Err(GameError::NonFinite("p_F"));
        }
        Ok(Self {
            leader_investment,
            follower_investment,
            leader_price,
            follower_price,
        })
    }

    pub fn transport_costs(&self) -> TransportCosts {
        TransportCosts::from_ratio(self.follower_investment / self.leader_investment)
    }
}

pub(crate) fn check_investments(leader: f64, follower: f64) -> Result<()> {
    if !leader.is_finite() {
        return Err(GameError::NonFinite("I_L"));
    }
    if !follower.is_finite() {
        return Err(GameError::NonFinite("I_F"));
    }
    if leader <= 0.0 {
        return Err(GameError::ZeroLeaderInvestment(leader));
    }
    if follower < 0.0 {
        return Err(GameError::NegativeCost {
            name: "I_F",
            value: follower,
        });
    }
    if follower > leader {
        return Err(GameError::InvestmentOrderViolated { leader, follower });
    }
    Ok(())
}

/// Reluctance of end users toward each provider, per unit of distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportCosts {
    #[serde(rename = "t_L")]
    pub leader: f64,
    #[serde(rename = "t_F")]
    pub follower: f64,
}

impl TransportCosts {
    fn from_ratio(ratio: f64) -> Self {
        Self {
            leader: ratio,
            follower: 1.0 - ratio,
        }
    }
}

/// `t_L = I_F / I_L`, `t_F = 1 - t_L`.
pub fn transport_costs(leader_investment: f64, follower_investment: f64) -> Result<TransportCosts> {
    check_investments(leader_investment, follower_investment)?;
    Ok(TransportCosts::from_ratio(
        follower_investment / leader_investment,
    ))
}

/// Location of the indifferent end user and the resulting market shares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketSplit {
    /// Unclamped indifference location.
    pub x_n: f64,
    #[serde(rename = "n_L")]
    pub leader_share: f64,
    #[serde(rename = "n_F")]
    pub follower_share: f64,
}

impl MarketSplit {
    /// Shares implied by an indifference point, clamped to `[0, 1]`.
    pub fn from_indifference(x_n: f64) -> Self {
        let leader_share = x_n.clamp(0.0, 1.0);
        Self {
            x_n,
            leader_share,
            follower_share: 1.0 - leader_share,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.x_n > 0.0 && self.x_n < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffPair {
    #[serde(rename = "pi_L")]
    pub leader: f64,
    #[serde(rename = "pi_F")]
    pub follower: f64,
}

/// `n_F (p_F - c) - s I_F^2`
pub fn payoff_follower(
    profile: &StrategyProfile,
    split: &MarketSplit,
    params: &MarketParams,
) -> f64 {
    split.follower_share * (profile.follower_price - params.c)
        - params.s * profile.follower_investment.powi(2)
}

/// `n_L (p_L - c) + s I_F^2 - gamma I_L^2`
pub fn payoff_leader(profile: &StrategyProfile, split: &MarketSplit, params: &MarketParams) -> f64 {
    split.leader_share * (profile.leader_price - params.c)
        + params.s * profile.follower_investment.powi(2)
        - params.gamma * profile.leader_investment.powi(2)
}

pub fn payoffs(
    profile: &StrategyProfile,
    split: &MarketSplit,
    params: &MarketParams,
) -> PayoffPair {
    PayoffPair {
        leader: payoff_leader(profile, split, params),
        follower: payoff_follower(profile, split, params),
    }
}
