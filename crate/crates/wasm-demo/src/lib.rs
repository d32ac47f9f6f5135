//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string; errors surface as JavaScript exceptions carrying the message.

use serde_json::json;
use wasm_bindgen::prelude::*;

use lease_game::benchmark::BenchmarkParams;
use lease_game::solver::search_cap;
use lease_game::sweep::{run_sweep, s_grid, SweepSpec};
use lease_game::{
    benchmark_equilibrium, solve_spne_with, stage1_objective, MarketParams, SolverConfig,
};

const CURVE_POINTS: usize = 400;

fn config(literal: bool) -> SolverConfig {
    if literal {
        SolverConfig::linear_lease()
    } else {
        SolverConfig::default()
    }
}

fn solve_json(s: f64, gamma: f64, c: f64, literal: bool) -> Result<String, String> {
    let params = MarketParams::with_default_valuation(s, gamma, c).map_err(|e| e.to_string())?;
    let cfg = config(literal);
    let outcome = solve_spne_with(&params, &cfg).map_err(|e| e.to_string())?;
    // objective on a linear grid up to a little past the chosen investment
    let cap = search_cap(&params);
    let top = (3.0 * outcome.profile.leader_investment)
        .max(2.0 * params.boundary_investment())
        .min(cap);
    let curve: Vec<[f64; 2]> = (1..=CURVE_POINTS)
        .map(|k| top * k as f64 / CURVE_POINTS as f64)
        .filter_map(|i| {
            stage1_objective(i, &params, cfg.lease_revenue)
                .ok()
                .map(|v| [i, v])
        })
        .collect();
    let value = json!({
        "outcome": outcome,
        "boundary": params.boundary_investment(),
        "objective": curve,
    });
    Ok(value.to_string())
}

fn sweep_json(
    gamma: f64,
    c: f64,
    lo: f64,
    hi: f64,
    step: f64,
    literal: bool,
) -> Result<String, String> {
    let fees = s_grid(lo, hi, step).map_err(|e| e.to_string())?;
    let fees: Vec<f64> = fees.into_iter().filter(|&s| s >= gamma).collect();
    let spec = SweepSpec::new(fees, gamma, c)
        .map_err(|e| e.to_string())?
        .with_config(config(literal));
    serde_json::to_string(&run_sweep(&spec)).map_err(|e| e.to_string())
}

fn benchmark_json(t_l: f64, t_f: f64, c: f64, s: f64, gamma: f64) -> Result<String, String> {
    let (bench, limit) = BenchmarkParams::limit(t_l, t_f, c).map_err(|e| e.to_string())?;
    let out = benchmark_equilibrium(&bench);
    let params = MarketParams::with_default_valuation(s, gamma, c).map_err(|e| e.to_string())?;
    let spne = solve_spne_with(&params, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let value = json!({
        "params": bench,
        "limit": limit,
        "benchmark": out,
        "spne_leader_payoff": spne.payoffs.leader,
        "incentive_gap": spne.payoffs.leader - out.leader_payoff,
    });
    Ok(value.to_string())
}

/// Equilibrium at one parameter point plus the leader's stage-1 objective curve.
#[wasm_bindgen]
pub fn solve(s: f64, gamma: f64, c: f64, literal: bool) -> Result<String, JsError> {
    solve_json(s, gamma, c, literal).map_err(|e| JsError::new(&e))
}

/// Fee sweep over `lo..=hi`; fees below `gamma` are skipped.
#[wasm_bindgen]
pub fn sweep(
    gamma: f64,
    c: f64,
    lo: f64,
    hi: f64,
    step: f64,
    literal: bool,
) -> Result<String, JsError> {
    sweep_json(gamma, c, lo, hi, step, literal).map_err(|e| JsError::new(&e))
}

/// No-investment benchmark at `(t_L, t_F)` next to the equilibrium leader payoff at `(s, gamma)`.
#[wasm_bindgen]
pub fn benchmark(t_l: f64, t_f: f64, c: f64, s: f64, gamma: f64) -> Result<String, JsError> {
    benchmark_json(t_l, t_f, c, s, gamma).map_err(|e| JsError::new(&e))
}
