//! Parameter sweeps over the per-resource fee and tabular output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::benchmark::{benchmark_equilibrium, BenchmarkParams};
use crate::error::{GameError, Result};
use crate::market::{boundary_investment, MarketParams};
use crate::solver::{solve_spne_with, LeaseRevenue, Regime, SolverConfig};

/// Default fee grid: 0.1 to 1.0 in steps of 0.01.
pub const DEFAULT_S_RANGE: (f64, f64, f64) = (0.1, 1.0, 0.01);

/// The three reluctance scenarios compared against the leasing game:
/// symmetric, end users reluctant toward the follower only, and toward the
/// leader only.
pub const DEFAULT_SCENARIOS: [(f64, f64); 3] = [(0.5, 0.5), (0.0, 1.0), (1.0, 0.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub s_values: Vec<f64>,
    pub gamma: f64,
    pub c: f64,
    /// `(t_L, t_F)` pairs; zeros are evaluated as one-sided limits.
    pub benchmark_scenarios: Vec<(f64, f64)>,
    pub config: SolverConfig,
}

impl SweepSpec {
    pub fn new(s_values: Vec<f64>, gamma: f64, c: f64) -> Result<Self> {
        if s_values.is_empty() {
            return Err(GameError::InvalidSweep("no fee values".into()));
        }
        if s_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GameError::InvalidSweep(
                "fee values must be strictly increasing".into(),
            ));
        }
        if let Some(&s) = s_values
            .iter()
            .find(|&&s| s.is_nan() || s <= 0.0 || s < gamma)
        {
            return Err(GameError::InvalidSweep(format!(
                "fee {s} must be positive and at least gamma = {gamma}"
            )));
        }
        Ok(Self {
            s_values,
            gamma,
            c,
            benchmark_scenarios: DEFAULT_SCENARIOS.to_vec(),
            config: SolverConfig::default(),
        })
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_scenarios(mut self, scenarios: Vec<(f64, f64)>) -> Self {
        self.benchmark_scenarios = scenarios;
        self
    }
}

/// Inclusive arithmetic grid `lo, lo + step, ..., hi`, values rounded to 12
/// decimals so that e.g. `0.1 + 71 * 0.01` prints as `0.81`.
pub fn s_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(GameError::InvalidSweep(format!(
            "bad range {lo}:{hi}:{step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Parses `lo:hi:step`.
pub fn parse_s_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || GameError::InvalidSweep(format!("expected lo:hi:step, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    s_grid(nums[0], nums[1], nums[2])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub gamma: f64,
    pub c: f64,
    pub regime: Option<Regime>,
    #[serde(rename = "I_L")]
    pub leader_investment: f64,
    #[serde(rename = "I_F")]
    pub follower_investment: f64,
    pub sqrt_2_over_9s: f64,
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
    #[serde(rename = "t_L")]
    pub t_leader: f64,
    #[serde(rename = "t_F")]
    pub t_follower: f64,
    pub foc_residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Indices `i` where `rows[i].regime` differs from `rows[i - 1].regime`.
    pub transitions: Vec<usize>,
}

fn solve_row(s: f64, spec: &SweepSpec) -> SweepRow {
    let mut row = SweepRow {
        s,
        gamma: spec.gamma,
        c: spec.c,
        regime: None,
        leader_investment: f64::NAN,
        follower_investment: f64::NAN,
        sqrt_2_over_9s: boundary_investment(s),
        leader_price: f64::NAN,
        follower_price: f64::NAN,
        leader_share: f64::NAN,
        follower_share: f64::NAN,
        leader_payoff: f64::NAN,
        follower_payoff: f64::NAN,
        t_leader: f64::NAN,
        t_follower: f64::NAN,
        foc_residual: f64::NAN,
        warnings: Vec::new(),
    };
    if spec.config.lease_revenue == LeaseRevenue::Linear {
        row.warnings.push("paper_literal_foc".into());
    }
    let outcome = MarketParams::with_default_valuation(s, spec.gamma, spec.c)
        .and_then(|p| solve_spne_with(&p, &spec.config));
    match outcome {
        Ok(out) => {
            let t = out.profile.transport_costs();
            row.regime = Some(out.regime);
            row.leader_investment = out.profile.leader_investment;
            row.follower_investment = out.profile.follower_investment;
            row.leader_price = out.profile.leader_price;
            row.follower_price = out.profile.follower_price;
            row.leader_share = out.split.leader_share;
            row.follower_share = out.split.follower_share;
            row.leader_payoff = out.payoffs.leader;
            row.follower_payoff = out.payoffs.follower;
            row.t_leader = t.leader;
            row.t_follower = t.follower;
            row.foc_residual = out.foc_residual;
            row.warnings
                .extend(out.warnings.iter().map(|w| w.token().to_string()));
        }
        Err(e) => row.warnings.push(format!("error: {e}")),
    }
    row
}

#[cfg(feature = "parallel")]
fn solve_rows(spec: &SweepSpec) -> Vec<SweepRow> {
    use rayon::prelude::*;
    spec.s_values
        .par_iter()
        .map(|&s| solve_row(s, spec))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn solve_rows(spec: &SweepSpec) -> Vec<SweepRow> {
    spec.s_values.iter().map(|&s| solve_row(s, spec)).collect()
}

/// One equilibrium per fee value, in input order. Failures land in the
/// row's warnings instead of aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepReport {
    let mut rows = solve_rows(spec);
    let transitions: Vec<usize> = (1..rows.len())
        .filter(|&i| rows[i].regime != rows[i - 1].regime)
        .collect();
    if transitions.len() > 1 {
        for &i in &transitions {
            rows[i].warnings.push("repeated_regime_transition".into());
        }
    }
    SweepReport { rows, transitions }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub scenario: usize,
    #[serde(rename = "t_L")]
    pub t_leader: f64,
    #[serde(rename = "t_F")]
    pub t_follower: f64,
    pub limit: bool,
    pub s: f64,
    pub gamma: f64,
    pub c: f64,
    #[serde(rename = "p_L_B")]
    pub leader_price: f64,
    #[serde(rename = "p_F_B")]
    pub follower_price: f64,
    #[serde(rename = "n_L_B")]
    pub leader_share: f64,
    #[serde(rename = "n_F_B")]
    pub follower_share: f64,
    #[serde(rename = "pi_L_B")]
    pub leader_payoff: f64,
    #[serde(rename = "pi_F_B")]
    pub follower_payoff: f64,
    #[serde(rename = "pi_L_B_squared")]
    pub leader_payoff_squared: f64,
    #[serde(rename = "pi_L_spne")]
    pub spne_leader_payoff: f64,
    pub incentive_gap: f64,
    pub warnings: Vec<String>,
}

/// Benchmark equilibrium for every scenario joined against the leasing
/// game's leader payoff at every fee value. Rows are scenario-major.
pub fn run_benchmark_sweep(spec: &SweepSpec) -> Result<Vec<BenchmarkRow>> {
    let spne = run_sweep(spec);
    let mut rows = Vec::with_capacity(spec.benchmark_scenarios.len() * spne.rows.len());
    for (k, &(tl, tf)) in spec.benchmark_scenarios.iter().enumerate() {
        let (bench, limit) = BenchmarkParams::limit(tl, tf, spec.c)?;
        let out = benchmark_equilibrium(&bench);
        for r in &spne.rows {
            rows.push(BenchmarkRow {
                scenario: k + 1,
                t_leader: bench.t_leader,
                t_follower: bench.t_follower,
                limit,
                s: r.s,
                gamma: r.gamma,
                c: r.c,
                leader_price: out.leader_price,
                follower_price: out.follower_price,
                leader_share: out.leader_share,
                follower_share: out.follower_share,
                leader_payoff: out.leader_payoff,
                follower_payoff: out.follower_payoff,
                leader_payoff_squared: out.squared_share_payoffs.leader,
                spne_leader_payoff: r.leader_payoff,
                incentive_gap: r.leader_payoff - out.leader_payoff,
                warnings: r.warnings.clone(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

/// A flat record with a fixed column order.
pub trait TableRow {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    List(Vec<String>),
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float literal");
    format!("{rounded}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig12(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::List(items) => items.join(";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            // serde_json maps non-finite floats to null
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(t) => json!(t),
            Cell::List(items) => json!(items),
        }
    }
}

pub const SWEEP_HEADER: [&str; 17] = [
    "s",
    "gamma",
    "c",
    "regime",
    "I_L",
    "I_F",
    "sqrt_2_over_9s",
    "p_L",
    "p_F",
    "n_L",
    "n_F",
    "pi_L",
    "pi_F",
    "t_L",
    "t_F",
    "foc_residual",
    "warnings",
];

impl TableRow for SweepRow {
    fn header() -> &'static [&'static str] {
        &SWEEP_HEADER
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.s),
            Cell::Num(self.gamma),
            Cell::Num(self.c),
            Cell::Text(
                self.regime
                    .map(|r| r.label().to_string())
                    .unwrap_or_default(),
            ),
            Cell::Num(self.leader_investment),
            Cell::Num(self.follower_investment),
            Cell::Num(self.sqrt_2_over_9s),
            Cell::Num(self.leader_price),
            Cell::Num(self.follower_price),
            Cell::Num(self.leader_share),
            Cell::Num(self.follower_share),
            Cell::Num(self.leader_payoff),
            Cell::Num(self.follower_payoff),
            Cell::Num(self.t_leader),
            Cell::Num(self.t_follower),
            Cell::Num(self.foc_residual),
            Cell::List(self.warnings.clone()),
        ]
    }
}

pub const BENCHMARK_HEADER: [&str; 17] = [
    "scenario",
    "t_L",
    "t_F",
    "limit",
    "s",
    "gamma",
    "c",
    "p_L_B",
    "p_F_B",
    "n_L_B",
    "n_F_B",
    "pi_L_B",
    "pi_F_B",
    "pi_L_B_squared",
    "pi_L_spne",
    "incentive_gap",
    "warnings",
];

impl TableRow for BenchmarkRow {
    fn header() -> &'static [&'static str] {
        &BENCHMARK_HEADER
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.scenario),
            Cell::Num(self.t_leader),
            Cell::Num(self.t_follower),
            Cell::Bool(self.limit),
            Cell::Num(self.s),
            Cell::Num(self.gamma),
            Cell::Num(self.c),
            Cell::Num(self.leader_price),
            Cell::Num(self.follower_price),
            Cell::Num(self.leader_share),
            Cell::Num(self.follower_share),
            Cell::Num(self.leader_payoff),
            Cell::Num(self.follower_payoff),
            Cell::Num(self.leader_payoff_squared),
            Cell::Num(self.spne_leader_payoff),
            Cell::Num(self.incentive_gap),
            Cell::List(self.warnings.clone()),
        ]
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes rows to any sink.
pub fn write_rows<R: TableRow, W: Write>(rows: &[R], format: Format, mut out: W) -> io::Result<()> {
    let header = R::header();
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for row in rows {
                let line: Vec<String> = row.cells().iter().map(|c| csv_escape(&c.csv())).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        Format::JsonLines => {
            for row in rows {
                let mut obj = serde_json::Map::new();
                for (key, cell) in header.iter().zip(row.cells()) {
                    obj.insert((*key).to_string(), cell.json());
                }
                writeln!(out, "{}", Value::Object(obj))?;
            }
        }
    }
    out.flush()
}

/// Writes rows to `destination`, or standard output when it is `None`.
/// Refuses to emit (and creates no file) when `rows` is empty.
pub fn emit<R: TableRow>(rows: &[R], format: Format, destination: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(GameError::EmptyRows);
    }
    match destination {
        Some(path) => {
            let io_err = |source| GameError::IoFailure {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            write_rows(rows, format, BufWriter::new(file)).map_err(io_err)
        }
        None => {
            write_rows(rows, format, io::stdout().lock()).map_err(|source| GameError::IoFailure {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
