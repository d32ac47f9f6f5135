//! Equilibrium solver for a leader-follower game between a network operator
//! that invests in infrastructure and a virtual operator that leases part of
//! it, competing for end users on a Hotelling line.
//!
//! [`solver::solve_spne`] runs backward induction over the four stages,
//! [`benchmark`] covers the no-investment comparison case and [`oracles`]
//! re-derives every closed form by brute force.

pub mod benchmark;
pub mod error;
pub mod market;
pub mod oracles;
pub mod solver;
pub mod sweep;

pub use benchmark::{benchmark_equilibrium, incentive_gap, BenchmarkOutcome, BenchmarkParams};
pub use error::{GameError, Result};
pub use market::{
    payoff_follower, payoff_leader, transport_costs, validate_params, MarketParams, MarketSplit,
    PayoffPair, StrategyProfile, TransportCosts,
};
pub use solver::{
    classify_regime, solve_spne, solve_spne_with, stage1_investment, stage1_objective,
    stage2_investment, stage3_prices, stage4_split, EquilibriumOutcome, LeaseRevenue, Regime,
    SolverConfig,
};
