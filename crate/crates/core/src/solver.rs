//! Backward induction through the four stages of the leasing game.
//!
//! Stage 4 splits the end users for given prices and investments, stage 3
//! fixes the interior price equilibrium, stage 2 is the follower's
//! reservation choice and stage 1 the leader's investment. Each stage is a
//! standalone function so the oracles can recompose them.

use std::fmt;

use serde::Serialize;

use crate::error::{GameError, Result};
use crate::market::{
    self, boundary_investment, check_investments, MarketParams, MarketSplit, PayoffPair,
    StrategyProfile,
};

/// Which equilibrium outcome the leader's investment lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// Leader invests strictly above `sqrt(2/(9s))`, follower reserves a fraction.
    #[serde(rename = "A")]
    OutcomeA,
    /// Leader invests exactly `sqrt(2/(9s))`, follower reserves everything.
    #[serde(rename = "B")]
    OutcomeB,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::OutcomeA => "A",
            Regime::OutcomeB => "B",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Form of the lease revenue term in the leader's stage-1 objective on the
/// interior branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaseRevenue {
    /// `s * I_F^2` with `I_F = I_L / (9 s I_L^2 - 1)` substituted; consistent
    /// with the payoff definitions.
    #[default]
    Quadratic,
    /// `s * I_L / (9 s I_L^2 - 1)`, i.e. `s * I_F`. Kept for comparison runs;
    /// discontinuous at the branch junction.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SolverConfig {
    pub lease_revenue: LeaseRevenue,
}

impl SolverConfig {
    pub fn linear_lease() -> Self {
        Self {
            lease_revenue: LeaseRevenue::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Boundary,
    InteriorRoot,
    /// End of the search interval, added only while the objective still rises there.
    SearchCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage1Candidate {
    #[serde(rename = "I_L")]
    pub investment: f64,
    pub payoff: f64,
    pub source: CandidateSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverWarning {
    /// The leader's objective was still increasing at the search cap.
    SearchCapHit,
}

impl SolverWarning {
    pub fn token(self) -> &'static str {
        match self {
            SolverWarning::SearchCapHit => "search_cap_hit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage1Solution {
    #[serde(rename = "I_L")]
    pub leader_investment: f64,
    pub regime: Regime,
    /// `|d pi_L / d I_L|` at the chosen interior point; 0 in regime B.
    pub foc_residual: f64,
    pub search_cap: f64,
    pub candidates: Vec<Stage1Candidate>,
    pub warnings: Vec<SolverWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumOutcome {
    pub regime: Regime,
    pub profile: StrategyProfile,
    pub split: MarketSplit,
    pub payoffs: PayoffPair,
    pub foc_residual: f64,
    pub lease_revenue: LeaseRevenue,
    pub candidates: Vec<Stage1Candidate>,
    pub warnings: Vec<SolverWarning>,
}

/// Stage 4: `x_n = (I_L - I_F)/I_L + p_F - p_L`, shares clamped to `[0, 1]`.
pub fn stage4_split(profile: &StrategyProfile) -> MarketSplit {
    let t = profile.transport_costs();
    // t_L + t_F = 1, so the general (t_F + p_F - p_L) / (t_L + t_F) reduces to this.
    MarketSplit::from_indifference(t.follower + profile.follower_price - profile.leader_price)
}

/// Interior price equilibrium of stage 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prices {
    #[serde(rename = "p_L")]
    pub leader: f64,
    #[serde(rename = "p_F")]
    pub follower: f64,
}

/// Stage 3: `p_L = c + (2 I_L - I_F)/(3 I_L)`, `p_F = c + (I_L + I_F)/(3 I_L)`.
pub fn stage3_prices(leader_investment: f64, follower_investment: f64, c: f64) -> Result<Prices> {
    check_investments(leader_investment, follower_investment)?;
    let denom = 3.0 * leader_investment;
    Ok(Prices {
        leader: c + (2.0 * leader_investment - follower_investment) / denom,
        follower: c + (leader_investment + follower_investment) / denom,
    })
}

/// Stage 2: the follower's optimal reservation given the leader's investment.
///
/// Above `sqrt(2/(9s))` the follower's problem is concave with an interior
/// optimum `I_L / (9 s I_L^2 - 1) < I_L`; at or below it the follower takes
/// everything (the junction itself resolves to `I_F = I_L`).
pub fn stage2_investment(leader_investment: f64, s: f64) -> f64 {
    if leader_investment > boundary_investment(s) {
        leader_investment / (9.0 * s * leader_investment * leader_investment - 1.0)
    } else {
        leader_investment
    }
}

fn interior_objective(leader_investment: f64, params: &MarketParams, lease: LeaseRevenue) -> f64 {
    let i = leader_investment;
    let ratio = 1.0 / (9.0 * params.s * i * i - 1.0);
    let share = (2.0 - ratio) / 3.0;
    let revenue = match lease {
        LeaseRevenue::Quadratic => params.s * (i * ratio).powi(2),
        LeaseRevenue::Linear => params.s * i * ratio,
    };
    share * share + revenue - params.gamma * i * i
}

/// The leader's payoff as a function of `I_L` once stages 2-4 play out.
pub fn stage1_objective(
    leader_investment: f64,
    params: &MarketParams,
    lease: LeaseRevenue,
) -> Result<f64> {
    let i = leader_investment;
    if !i.is_finite() {
        return Err(GameError::NonFinite("I_L"));
    }
    if i <= 0.0 {
        return Err(GameError::ZeroLeaderInvestment(i));
    }
    if i <= params.boundary_investment() {
        // I_F = I_L: the leader keeps a third of the market at margin 1/3.
        return Ok(1.0 / 9.0 + (params.s - params.gamma) * i * i);
    }
    let denom = 9.0 * params.s * i * i - 1.0;
    if denom <= 0.0 {
        return Err(GameError::SingularDenominator(denom));
    }
    Ok(interior_objective(i, params, lease))
}

const SCAN_POINTS: usize = 2000;
const BISECTION_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;

/// Upper end of the stage-1 search interval.
pub fn search_cap(params: &MarketParams) -> f64 {
    10.0 * params
        .boundary_investment()
        .max(1.0 / params.gamma.max(1e-6).sqrt())
}

fn interior_derivative(i: f64, params: &MarketParams, lease: LeaseRevenue) -> f64 {
    // The interior formula stays smooth slightly below the junction
    // (9 s I^2 - 1 > 0 down to 1/(3 sqrt s)), so the stencil never has to
    // straddle the kink.
    let h = (1e-6 * i).max(1e-6);
    (interior_objective(i + h, params, lease) - interior_objective(i - h, params, lease))
        / (2.0 * h)
}

fn bisect_root(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo < BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Stage 1: the leader's investment.
///
/// The candidate set is the junction `sqrt(2/(9s))` plus every stationary
/// point of the interior branch found by a log-spaced derivative scan with
/// bisection refinement. The winner is the candidate with the highest
/// payoff; payoffs within `1e-12` of the junction resolve to the junction.
pub fn stage1_investment(params: &MarketParams, config: &SolverConfig) -> Stage1Solution {
    let lease = config.lease_revenue;
    let boundary = params.boundary_investment();
    let cap = search_cap(params);
    let deriv = |i: f64| interior_derivative(i, params, lease);
    let objective =
        |i: f64| stage1_objective(i, params, lease).expect("candidates lie in the valid domain");

    let mut candidates = vec![Stage1Candidate {
        investment: boundary,
        payoff: objective(boundary),
        source: CandidateSource::Boundary,
    }];
    let mut warnings = Vec::new();

    let lo = boundary * (1.0 + 1e-9);
    let log_lo = lo.ln();
    let log_step = (cap.ln() - log_lo) / (SCAN_POINTS - 1) as f64;
    let mut prev_x = lo;
    let mut prev_d = deriv(lo);
    for k in 1..SCAN_POINTS {
        let x = if k == SCAN_POINTS - 1 {
            cap
        } else {
            (log_lo + log_step * k as f64).exp()
        };
        let d = deriv(x);
        let root = if d == 0.0 {
            Some(x)
        } else if prev_d != 0.0 && (prev_d > 0.0) != (d > 0.0) {
            Some(bisect_root(prev_x, x, deriv))
        } else {
            None
        };
        if let Some(root) = root {
            candidates.push(Stage1Candidate {
                investment: root,
                payoff: objective(root),
                source: CandidateSource::InteriorRoot,
            });
        }
        prev_x = x;
        prev_d = d;
    }
    if prev_d > 0.0 {
        warnings.push(SolverWarning::SearchCapHit);
        candidates.push(Stage1Candidate {
            investment: cap,
            payoff: objective(cap),
            source: CandidateSource::SearchCap,
        });
    }

    let mut best = candidates[0];
    for cand in &candidates[1..] {
        if cand.payoff > best.payoff + TIE_TOL {
            best = *cand;
        }
    }
    let (regime, foc_residual) = match best.source {
        CandidateSource::Boundary => (Regime::OutcomeB, 0.0),
        _ => (Regime::OutcomeA, deriv(best.investment).abs()),
    };

    Stage1Solution {
        leader_investment: best.investment,
        regime,
        foc_residual,
        search_cap: cap,
        candidates,
        warnings,
    }
}

/// Runs stages 2-4 for a fixed leader investment.
pub fn continuation(
    leader_investment: f64,
    params: &MarketParams,
) -> Result<(StrategyProfile, MarketSplit, PayoffPair)> {
    let follower_investment = stage2_investment(leader_investment, params.s);
    let prices = stage3_prices(leader_investment, follower_investment, params.c)?;
    let profile = StrategyProfile::new(
        leader_investment,
        follower_investment,
        prices.leader,
        prices.follower,
    )?;
    let split = stage4_split(&profile);
    let payoffs = market::payoffs(&profile, &split, params);
    Ok((profile, split, payoffs))
}

pub fn solve_spne(params: &MarketParams) -> Result<EquilibriumOutcome> {
    solve_spne_with(params, &SolverConfig::default())
}

pub fn solve_spne_with(params: &MarketParams, config: &SolverConfig) -> Result<EquilibriumOutcome> {
    let stage1 = stage1_investment(params, config);
    let (profile, split, payoffs) = continuation(stage1.leader_investment, params)?;
    Ok(EquilibriumOutcome {
        regime: stage1.regime,
        profile,
        split,
        payoffs,
        foc_residual: stage1.foc_residual,
        lease_revenue: config.lease_revenue,
        candidates: stage1.candidates,
        warnings: stage1.warnings,
    })
}

pub fn classify_regime(params: &MarketParams) -> Regime {
    stage1_investment(params, &SolverConfig::default()).regime
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn params(s: f64, gamma: f64, c: f64) -> MarketParams {
        MarketParams::with_default_valuation(s, gamma, c).unwrap()
    }

    fn profile(i_l: f64, i_f: f64, p_l: f64, p_f: f64) -> StrategyProfile {
        StrategyProfile::new(i_l, i_f, p_l, p_f).unwrap()
    }

    // Brute-force maximiser of the leader's composed payoff, used to freeze
    // stage-1 expectations. Independent of the derivative scan.
    fn grid_argmax(p: &MarketParams, step: f64) -> (f64, f64) {
        let cap = search_cap(p);
        let mut best = (0.0, f64::NEG_INFINITY);
        let mut k = 1;
        loop {
            let i = k as f64 * step;
            if i > cap {
                break;
            }
            let (_, _, pay) = continuation(i, p).unwrap();
            if pay.leader > best.1 {
                best = (i, pay.leader);
            }
            k += 1;
        }
        best
    }

    #[test]
    fn stage4_examples() {
        let split = stage4_split(&profile(1.0, 1.0, 1.0 + 1.0 / 3.0, 1.0 + 2.0 / 3.0));
        assert!((split.x_n - 1.0 / 3.0).abs() < TOL);
        assert!((split.leader_share - 1.0 / 3.0).abs() < TOL);

        let split = stage4_split(&profile(1.0, 0.5, 2.0, 2.0));
        assert_eq!(split.leader_share, 0.5);

        let split = stage4_split(&profile(1.0, 0.0, 1.0, 1.5));
        assert_eq!(split.x_n, 1.5);
        assert_eq!(split.leader_share, 1.0);
        assert_eq!(split.follower_share, 0.0);
    }

    #[test]
    fn stage3_examples() {
        let p = stage3_prices(1.0, 1.0, 1.0).unwrap();
        assert!((p.leader - 4.0 / 3.0).abs() < TOL);
        assert!((p.follower - 5.0 / 3.0).abs() < TOL);

        let p = stage3_prices(1.0, 0.5, 0.0).unwrap();
        assert!((p.leader - 0.5).abs() < TOL);
        assert!((p.follower - 0.5).abs() < TOL);

        let p = stage3_prices(1.0, 0.0, 0.0).unwrap();
        assert!((p.leader - 2.0 / 3.0).abs() < TOL);
        assert!((p.follower - 1.0 / 3.0).abs() < TOL);

        assert!(matches!(
            stage3_prices(1.0, 2.0, 0.0),
            Err(GameError::InvestmentOrderViolated { .. })
        ));
    }

    #[test]
    fn stage2_examples() {
        assert!((stage2_investment(1.0, 1.0) - 0.125).abs() < TOL);
        let b = (2.0f64 / 9.0).sqrt();
        assert_eq!(stage2_investment(b, 1.0), b);
        assert_eq!(stage2_investment(0.3, 1.0), 0.3);
    }

    #[test]
    fn stage2_matches_follower_grid() {
        // exhaustive search of ((I_L + I_F)/(3 I_L))^2 - s I_F^2 on [0, 1]
        let (i_l, s) = (1.0, 1.0);
        let step = 1e-5;
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..=100_000 {
            let i_f = k as f64 * step;
            let v = ((i_l + i_f) / (3.0 * i_l)).powi(2) - s * i_f * i_f;
            if v > best.1 {
                best = (i_f, v);
            }
        }
        assert!((stage2_investment(i_l, s) - best.0).abs() <= step);
    }

    #[test]
    fn stage1_objective_examples() {
        let p = params(1.0, 0.1, 1.0);
        let b = p.boundary_investment();
        let at_junction = stage1_objective(b, &p, LeaseRevenue::Quadratic).unwrap();
        assert!((at_junction - (1.0 / 9.0 + 0.9 * 2.0 / 9.0)).abs() < TOL);
        // branch agreement: the interior formula evaluated at the junction
        assert!((interior_objective(b, &p, LeaseRevenue::Quadratic) - at_junction).abs() < TOL);

        let p0 = params(1.0, 0.0, 1.0);
        let v = stage1_objective(1.0, &p0, LeaseRevenue::Quadratic).unwrap();
        // (1/9)(2 - 1/8)^2 + (1/8)^2
        let expected = (2.0f64 - 0.125).powi(2) / 9.0 + 0.125 * 0.125;
        assert!((v - expected).abs() < TOL);
        assert!((v - 0.40625).abs() < TOL);
        let (_, _, pay) = continuation(1.0, &p0).unwrap();
        assert!((pay.leader - v).abs() < TOL);

        assert!(stage1_objective(1e4, &p, LeaseRevenue::Quadratic).unwrap() < -1e6);
        assert!(matches!(
            stage1_objective(0.0, &p, LeaseRevenue::Quadratic),
            Err(GameError::ZeroLeaderInvestment(_))
        ));
    }

    #[test]
    fn linear_lease_term_is_discontinuous_at_junction() {
        let p = params(1.0, 0.1, 1.0);
        let b = p.boundary_investment();
        let left = stage1_objective(b, &p, LeaseRevenue::Linear).unwrap();
        let right = stage1_objective(b * (1.0 + 1e-12), &p, LeaseRevenue::Linear).unwrap();
        // s*I_L vs s*I_L^2 at 9 s I_L^2 - 1 = 1
        assert!((right - left - (b - b * b)).abs() < 1e-9);
    }

    #[test]
    fn stage1_matches_grid_oracle() {
        // Expected regimes frozen from grid_argmax at step 1e-4.
        for &(s, gamma, regime) in &[
            (1.0, 0.1, Regime::OutcomeA),
            (0.12, 0.1, Regime::OutcomeB),
            (0.5, 0.2, Regime::OutcomeB),
            (0.5, 0.15, Regime::OutcomeB),
            (0.9, 0.05, Regime::OutcomeA),
        ] {
            let p = params(s, gamma, 1.0);
            let sol = stage1_investment(&p, &SolverConfig::default());
            assert_eq!(sol.regime, regime, "s = {s}, gamma = {gamma}");
            let best = sol
                .candidates
                .iter()
                .map(|c| c.payoff)
                .fold(f64::NEG_INFINITY, f64::max);
            let (arg, val) = grid_argmax(&p, 1e-4);
            assert!(val <= best + 1e-6, "grid beat solver at s = {s}");
            assert!(best - val < 1e-4, "solver payoff unreachable at s = {s}");
            assert!((arg - sol.leader_investment).abs() < 2e-3);
        }
    }

    #[test]
    fn stage1_interior_point_at_unit_fee() {
        // grid oracle: argmax 0.7902, payoff 0.320261
        let p = params(1.0, 0.1, 1.0);
        let sol = stage1_investment(&p, &SolverConfig::default());
        assert_eq!(sol.regime, Regime::OutcomeA);
        assert!((sol.leader_investment - 0.79016).abs() < 1e-4);
        assert!(sol.foc_residual < 1e-6);
        let boundary = sol.candidates[0];
        assert_eq!(boundary.source, CandidateSource::Boundary);
        assert!((boundary.payoff - (1.0 / 3.0 - 0.2 / 9.0)).abs() < TOL);
    }

    #[test]
    fn equal_fee_and_cost_invests() {
        let p = params(0.1, 0.1, 1.0);
        let sol = stage1_investment(&p, &SolverConfig::default());
        assert_eq!(sol.regime, Regime::OutcomeB);
        assert!((sol.leader_investment - (2.0f64 / 0.9).sqrt()).abs() < TOL);
    }

    #[test]
    fn zero_investment_cost_hits_cap() {
        let p = params(0.5, 0.0, 1.0);
        let sol = stage1_investment(&p, &SolverConfig::default());
        assert_eq!(sol.warnings, vec![SolverWarning::SearchCapHit]);
        assert_eq!(sol.regime, Regime::OutcomeA);
        assert_eq!(sol.leader_investment, search_cap(&p));

        // the linear lease term has a finite optimum at gamma = 0
        let sol = stage1_investment(&p, &SolverConfig::linear_lease());
        assert!(sol.warnings.is_empty());
        assert_eq!(sol.regime, Regime::OutcomeA);
        assert!((sol.leader_investment - 1.5416).abs() < 1e-3);
    }

    #[test]
    fn regime_b_closed_forms() {
        let p = params(0.5, 0.1, 1.0);
        let out = solve_spne(&p).unwrap();
        assert_eq!(out.regime, Regime::OutcomeB);
        let b = (2.0 / (9.0 * 0.5f64)).sqrt();
        assert!((out.profile.leader_investment - b).abs() < TOL);
        assert_eq!(
            out.profile.follower_investment,
            out.profile.leader_investment
        );
        assert!((out.profile.leader_price - (1.0 + 1.0 / 3.0)).abs() < TOL);
        assert!((out.profile.follower_price - (1.0 + 2.0 / 3.0)).abs() < TOL);
        assert!((out.split.leader_share - 1.0 / 3.0).abs() < TOL);
        assert!((out.split.follower_share - 2.0 / 3.0).abs() < TOL);
        assert!((out.payoffs.follower - 2.0 / 9.0).abs() < TOL);
        assert!((out.payoffs.leader - (1.0 / 3.0 - 2.0 * 0.1 / (9.0 * 0.5))).abs() < TOL);
        assert_eq!(out.foc_residual, 0.0);
    }

    #[test]
    fn regime_a_matches_outcome_formulas() {
        let p = params(0.95, 0.1, 1.0);
        let out = solve_spne(&p).unwrap();
        assert_eq!(out.regime, Regime::OutcomeA);
        let i = out.profile.leader_investment;
        let r = 1.0 / (9.0 * p.s * i * i - 1.0);
        assert!((out.profile.follower_investment - i * r).abs() < TOL);
        assert!((out.profile.follower_price - (1.0 + (1.0 + r) / 3.0)).abs() < TOL);
        assert!((out.profile.leader_price - (1.0 + (2.0 - r) / 3.0)).abs() < TOL);
        assert!((out.split.leader_share - (2.0 - r) / 3.0).abs() < TOL);
        assert!(out.split.is_interior());
    }

    #[test]
    fn equal_payoffs_at_twice_cost() {
        for gamma in [0.02, 0.05, 0.1, 0.2] {
            let out = solve_spne(&params(2.0 * gamma, gamma, 1.0)).unwrap();
            assert_eq!(out.regime, Regime::OutcomeB);
            assert!((out.payoffs.leader - out.payoffs.follower).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(&params(1.0, 0.1, 1.0)), Regime::OutcomeA);
        assert_eq!(classify_regime(&params(0.12, 0.1, 1.0)), Regime::OutcomeB);
        assert_eq!(classify_regime(&params(0.5, 0.15, 1.0)), Regime::OutcomeB);
    }

    #[test]
    fn stage2_continuity_at_junction() {
        let s = 0.7;
        let b = boundary_investment(s);
        let mut last = f64::INFINITY;
        for k in 1..10 {
            let eps = 10f64.powi(-k);
            let gap = (stage2_investment(b * (1.0 + eps), s) - b * (1.0 + eps)).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-7);
    }
}
