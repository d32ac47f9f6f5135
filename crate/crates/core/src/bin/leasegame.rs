use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lease_game::oracles::suites::{self, Suite};
use lease_game::oracles::OracleReport;
use lease_game::sweep::{
    self, emit, run_benchmark_sweep, run_sweep, s_grid, Format, SweepSpec, DEFAULT_S_RANGE,
};
use lease_game::{solve_spne_with, GameError, MarketParams, SolverConfig};

#[derive(Parser)]
#[command(
    name = "leasegame",
    version,
    about = "Equilibria of the infrastructure leasing game"
)]
struct Cli {
    /// Seed for the random cases drawn by `verify`; solving is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one parameter point and print the equilibrium as JSON.
    Solve {
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// Equilibria along a grid of fees (investment, price and payoff curves).
    Sweep {
        #[command(flatten)]
        fees: FeeArgs,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// No-investment benchmark joined against the leader's equilibrium payoff.
    Benchmark {
        /// Leader transport cost; with --tf replaces the three default scenarios.
        #[arg(long, requires = "tf")]
        tl: Option<f64>,
        /// Follower transport cost.
        #[arg(long, requires = "tl")]
        tf: Option<f64>,
        #[command(flatten)]
        fees: FeeArgs,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the brute-force oracle suites; emits one JSON report per line.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Random cases per suite.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MarketArgs {
    /// Marginal investment cost of the leader.
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Marginal cost per end user.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Use the linear s*I_L/(9 s I_L^2 - 1) lease term in the leader's objective.
    #[arg(long)]
    paper_literal_foc: bool,
}

impl MarketArgs {
    fn config(&self) -> SolverConfig {
        if self.paper_literal_foc {
            SolverConfig::linear_lease()
        } else {
            SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct FeeArgs {
    /// Single fee value.
    #[arg(long, conflicts_with = "s_range")]
    s: Option<f64>,
    /// Fee grid lo:hi:step. Defaults to 0.1:1.0:0.01, dropping fees below gamma.
    #[arg(long)]
    s_range: Option<String>,
}

impl FeeArgs {
    fn values(&self, gamma: f64) -> Result<Vec<f64>, GameError> {
        match (self.s, &self.s_range) {
            (Some(s), _) => Ok(vec![s]),
            (None, Some(range)) => sweep::parse_s_range(range),
            (None, None) => {
                let (lo, hi, step) = DEFAULT_S_RANGE;
                Ok(s_grid(lo, hi, step)?
                    .into_iter()
                    .filter(|&s| s >= gamma)
                    .collect())
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::JsonLines => Format::JsonLines,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Pricing,
    Follower,
    Leader,
    Agents,
}

enum Failure {
    Game(GameError),
    Verification(usize),
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure::Game(e)
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> GameError + '_ {
    move |source| GameError::IoFailure {
        path: path.to_path_buf(),
        source,
    }
}

fn write_reports(reports: &[OracleReport], out: Option<&Path>) -> Result<(), GameError> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(io_failure(path))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let label = out.unwrap_or(Path::new("<stdout>"));
    for r in reports {
        let line = serde_json::to_string(r).expect("reports serialize");
        writeln!(sink, "{line}").map_err(io_failure(label))?;
    }
    sink.flush().map_err(io_failure(label))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { s, market } => {
            let params = MarketParams::with_default_valuation(s, market.gamma, market.c)?;
            let outcome = solve_spne_with(&params, &market.config())?;
            let text = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
            writeln!(io::stdout().lock(), "{text}").map_err(io_failure(Path::new("<stdout>")))?;
        }
        Command::Sweep {
            fees,
            market,
            output,
        } => {
            let spec = SweepSpec::new(fees.values(market.gamma)?, market.gamma, market.c)?
                .with_config(market.config());
            let report = run_sweep(&spec);
            match report.transitions.as_slice() {
                [] => eprintln!("no regime transition"),
                [i] => eprintln!("regime transition at s = {}", report.rows[*i].s),
                many => eprintln!("warning: {} regime transitions", many.len()),
            }
            emit(&report.rows, output.format(), output.out.as_deref())?;
        }
        Command::Benchmark {
            tl,
            tf,
            fees,
            market,
            output,
        } => {
            let mut spec = SweepSpec::new(fees.values(market.gamma)?, market.gamma, market.c)?
                .with_config(market.config());
            if let (Some(tl), Some(tf)) = (tl, tf) {
                spec = spec.with_scenarios(vec![(tl, tf)]);
            }
            let rows = run_benchmark_sweep(&spec)?;
            emit(&rows, output.format(), output.out.as_deref())?;
        }
        Command::Verify {
            suite,
            samples,
            out,
        } => {
            let selected: Vec<Suite> = match suite {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::Pricing => vec![Suite::Pricing],
                SuiteArg::Follower => vec![Suite::Follower],
                SuiteArg::Leader => vec![Suite::Leader],
                SuiteArg::Agents => vec![Suite::Agents],
            };
            let mut reports = Vec::new();
            for s in selected {
                reports.extend(suites::run(s, samples, cli.seed)?);
            }
            write_reports(&reports, out.as_deref())?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            eprintln!("{} reports, {} failed", reports.len(), failed);
            if failed > 0 {
                return Err(Failure::Verification(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved for I/O here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Game(e)) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Verification(n)) => {
            eprintln!("verification failed: {n} oracle reports out of tolerance");
            ExitCode::from(3)
        }
    }
}
