//! No-investment benchmark: the same Hotelling price competition with
//! exogenous transport costs and no leasing.

use serde::Serialize;

use crate::error::{GameError, Result};
use crate::market::{MarketParams, PayoffPair};
use crate::solver::{solve_spne_with, SolverConfig};

/// Offset used in place of a zero transport cost.
pub const LIMIT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkParams {
    #[serde(rename = "t_L")]
    pub t_leader: f64,
    #[serde(rename = "t_F")]
    pub t_follower: f64,
    pub c: f64,
}

impl BenchmarkParams {
    pub fn new(t_leader: f64, t_follower: f64, c: f64) -> Result<Self> {
        for (name, v) in [("t_L", t_leader), ("t_F", t_follower), ("c", c)] {
            if !v.is_finite() {
                return Err(GameError::NonFinite(name));
            }
        }
        if t_leader <= 0.0 || t_follower <= 0.0 {
            return Err(GameError::NonPositiveTransport {
                t_leader,
                t_follower,
            });
        }
        if c < 0.0 {
            return Err(GameError::NegativeCost {
                name: "c",
                value: c,
            });
        }
        Ok(Self {
            t_leader,
            t_follower,
            c,
        })
    }

    /// Like [`BenchmarkParams::new`], but a zero cost is evaluated as the
    /// one-sided limit: it becomes [`LIMIT_EPSILON`] and the other cost gives
    /// up the same amount so their sum is preserved. The flag reports whether
    /// that substitution happened.
    pub fn limit(t_leader: f64, t_follower: f64, c: f64) -> Result<(Self, bool)> {
        let shift = |zero: f64, other: f64| -> (f64, f64) {
            if zero == 0.0 && other > 2.0 * LIMIT_EPSILON {
                (LIMIT_EPSILON, other - LIMIT_EPSILON)
            } else {
                (zero, other)
            }
        };
        let (tl, tf) = if t_leader == 0.0 {
            shift(t_leader, t_follower)
        } else {
            let (tf, tl) = shift(t_follower, t_leader);
            (tl, tf)
        };
        let is_limit = tl != t_leader || tf != t_follower;
        Ok((Self::new(tl, tf, c)?, is_limit))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkOutcome {
    #[serde(rename = "p_L")]
    pub leader_price: f64,
    #[serde(rename = "p_F")]
    pub follower_price: f64,
    #[serde(rename = "n_L")]
    pub leader_share: f64,
    #[serde(rename = "n_F")]
    pub follower_share: f64,
    #[serde(rename = "pi_L")]
    pub leader_payoff: f64,
    #[serde(rename = "pi_F")]
    pub follower_payoff: f64,
    /// `n^2`, the squared-share form of the payoffs. Equal to `n (p - c)`
    /// only when `t_L + t_F = 1`.
    pub squared_share_payoffs: PayoffPair,
}

impl BenchmarkOutcome {
    pub fn payoffs(&self) -> PayoffPair {
        PayoffPair {
            leader: self.leader_payoff,
            follower: self.follower_payoff,
        }
    }
}

pub fn benchmark_equilibrium(params: &BenchmarkParams) -> BenchmarkOutcome {
    let (tl, tf, c) = (params.t_leader, params.t_follower, params.c);
    let leader_price = c + (tl + 2.0 * tf) / 3.0;
    let follower_price = c + (2.0 * tl + tf) / 3.0;
    let total = 3.0 * (tl + tf);
    let leader_share = (2.0 * tf + tl) / total;
    let follower_share = (tf + 2.0 * tl) / total;
    BenchmarkOutcome {
        leader_price,
        follower_price,
        leader_share,
        follower_share,
        leader_payoff: leader_share * (leader_price - c),
        follower_payoff: follower_share * (follower_price - c),
        squared_share_payoffs: PayoffPair {
            leader: leader_share * leader_share,
            follower: follower_share * follower_share,
        },
    }
}

/// Leader payoff with investment and leasing minus its benchmark payoff.
/// Positive when investing pays.
pub fn incentive_gap(params: &MarketParams, bench: &BenchmarkParams) -> Result<f64> {
    incentive_gap_with(params, bench, &SolverConfig::default())
}

pub fn incentive_gap_with(
    params: &MarketParams,
    bench: &BenchmarkParams,
    config: &SolverConfig,
) -> Result<f64> {
    let spne = solve_spne_with(params, config)?;
    Ok(spne.payoffs.leader - benchmark_equilibrium(bench).leader_payoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_costs() {
        let out = benchmark_equilibrium(&BenchmarkParams::new(0.5, 0.5, 1.0).unwrap());
        assert_eq!(out.leader_price, 1.5);
        assert_eq!(out.follower_price, 1.5);
        assert_eq!(out.leader_share, 0.5);
        assert_eq!(out.leader_payoff, 0.25);
        assert_eq!(out.follower_payoff, 0.25);
    }

    #[test]
    fn leader_reluctance_limit() {
        let eps = 1e-9;
        let out = benchmark_equilibrium(&BenchmarkParams::new(1.0 - eps, eps, 1.0).unwrap());
        assert!((out.leader_share - 1.0 / 3.0).abs() < 1e-8);
        assert!((out.leader_payoff - 1.0 / 9.0).abs() < 1e-8);
    }

    #[test]
    fn asymmetric_costs() {
        let out = benchmark_equilibrium(&BenchmarkParams::new(0.2, 0.8, 0.0).unwrap());
        assert!((out.leader_price - 0.6).abs() < 1e-12);
        assert!((out.follower_price - 0.4).abs() < 1e-12);
        assert!((out.leader_share - 0.6).abs() < 1e-12);
        assert!((out.leader_payoff - 0.36).abs() < 1e-12);
        assert!((out.squared_share_payoffs.leader - 0.36).abs() < 1e-12);
    }

    #[test]
    fn squared_form_differs_off_simplex() {
        let out = benchmark_equilibrium(&BenchmarkParams::new(1.0, 1.0, 0.0).unwrap());
        // n = 1/2, p - c = 1
        assert_eq!(out.leader_payoff, 0.5);
        assert_eq!(out.squared_share_payoffs.leader, 0.25);
    }

    #[test]
    fn rejects_nonpositive_costs() {
        assert!(matches!(
            BenchmarkParams::new(0.0, 1.0, 1.0),
            Err(GameError::NonPositiveTransport { .. })
        ));
        assert!(matches!(
            BenchmarkParams::new(0.5, -0.5, 1.0),
            Err(GameError::NonPositiveTransport { .. })
        ));
    }

    #[test]
    fn limit_substitution() {
        let (p, lim) = BenchmarkParams::limit(0.0, 1.0, 1.0).unwrap();
        assert!(lim);
        assert_eq!(p.t_leader, LIMIT_EPSILON);
        assert_eq!(p.t_follower, 1.0 - LIMIT_EPSILON);
        let (p, lim) = BenchmarkParams::limit(1.0, 0.0, 1.0).unwrap();
        assert!(lim);
        assert_eq!(p.t_follower, LIMIT_EPSILON);
        let (_, lim) = BenchmarkParams::limit(0.5, 0.5, 1.0).unwrap();
        assert!(!lim);
        assert!(BenchmarkParams::limit(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn incentive_gap_examples() {
        let m = MarketParams::with_default_valuation(1.0, 0.1, 1.0).unwrap();
        let (b, _) = BenchmarkParams::limit(1.0, 0.0, 1.0).unwrap();
        let spne = crate::solver::solve_spne(&m).unwrap();
        let gap = incentive_gap(&m, &b).unwrap();
        assert!((gap - (spne.payoffs.leader - 1.0 / 9.0)).abs() < 1e-8);
        assert!(gap > 0.2);

        // s = 2 gamma sits in outcome B with pi_L = 2/9
        let m = MarketParams::with_default_valuation(0.2, 0.1, 1.0).unwrap();
        let b = BenchmarkParams::new(0.5, 0.5, 1.0).unwrap();
        assert!((incentive_gap(&m, &b).unwrap() - (2.0 / 9.0 - 0.25)).abs() < 1e-12);
    }
}
