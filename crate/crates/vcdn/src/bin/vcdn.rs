use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vcdn::cli::{self, CliError, RunConfig, ScenarioSource, SolverChoice};
use vcdn::ghtree::gomory_hu;
use vcdn::hpac::MigrationMode;
use vcdn::model::{gen_erdos_renyi_with, gen_three_tier_with, GenParams};

#[derive(Parser)]
#[command(name = "vcdn", about = "Virtual CDN placement and migration solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario sweep and write a CSV of cost metrics.
    Run(RunArgs),
    /// Summarize a CSV produced by `run`.
    Report {
        /// CSV file to summarize.
        file: PathBuf,
    },
    /// Generate a scenario and print it as JSON.
    Gen(SourceArgs),
    /// Build the cut tree of a scenario's symmetrized topology and print
    /// its edges as `a b capacity` lines.
    Tree(SourceArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Scenario JSON file (mutually exclusive with --generator).
    #[arg(long, conflicts_with_all = ["generator", "n", "m", "seed"])]
    scenario: Option<PathBuf>,
    /// Built-in topology generator.
    #[arg(long, value_enum)]
    generator: Option<Generator>,
    /// Node-count parameter (access nodes for three-tier, nodes for er).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Undirected edge count (er generator only).
    #[arg(long)]
    m: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of vCDNs to generate.
    #[arg(long, default_value_t = 10)]
    vcdns: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Solver(s) to run.
    #[arg(long, value_enum, default_value_t = Solver::Both)]
    solver: Solver,
    /// Sweep over the vCDN count: `A..B` (inclusive) or a single count.
    #[arg(long, default_value = "3..11")]
    sweep: String,
    /// Time budget in seconds for the exact solver.
    #[arg(long, default_value_t = 60)]
    budget: u64,
    /// Output CSV path.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Relocation policy for the heuristic.
    #[arg(long, value_enum, default_value_t = Mode::Replicate)]
    mode: Mode,
    /// Write 0 in the runtime_ms column for reproducible output.
    #[arg(long)]
    omit_runtime: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    ThreeTier,
    Er,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Opac,
    Hpac,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Move,
    Replicate,
}

const CAP_RANGE: (u32, u32) = (50, 150);

fn source_of(args: &SourceArgs) -> Result<ScenarioSource, CliError> {
    match (&args.scenario, args.generator) {
        (Some(path), None) => Ok(ScenarioSource::File(path.clone())),
        (None, Some(Generator::ThreeTier)) => Ok(ScenarioSource::ThreeTier {
            n: args.n,
            seed: args.seed,
            cap_range: CAP_RANGE,
        }),
        (None, Some(Generator::Er)) => {
            let m = args.m.ok_or_else(|| {
                CliError::Usage("--m is required with --generator er".into())
            })?;
            Ok(ScenarioSource::ErdosRenyi { n: args.n, m, seed: args.seed, cap_range: CAP_RANGE })
        }
        (None, None) => Err(CliError::Usage(
            "either --scenario or --generator is required".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with rejects this"),
    }
}

fn load_scenario(args: &SourceArgs) -> Result<vcdn::Scenario, CliError> {
    let params = GenParams { n_vcdns: args.vcdns, ..GenParams::default() };
    match source_of(args)? {
        ScenarioSource::File(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|source| CliError::Io { path, source })?;
            Ok(vcdn::Scenario::parse(&text)?)
        }
        ScenarioSource::ThreeTier { n, seed, cap_range } => {
            let aggregate = n.div_ceil(2).max(1);
            let core = (n / 4).max(1);
            Ok(gen_three_tier_with(n, aggregate, core, seed, cap_range, &params)?)
        }
        ScenarioSource::ErdosRenyi { n, m, seed, cap_range } => {
            Ok(gen_erdos_renyi_with(n, m, seed, cap_range, &params)?)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = RunConfig {
                source: source_of(&args.source)?,
                solver: match args.solver {
                    Solver::Opac => SolverChoice::Opac,
                    Solver::Hpac => SolverChoice::Hpac,
                    Solver::Both => SolverChoice::Both,
                },
                sweep: cli::parse_sweep(&args.sweep)?,
                budget_secs: args.budget,
                out: args.out,
                mode: match args.mode {
                    Mode::Move => MigrationMode::Move,
                    Mode::Replicate => MigrationMode::Replicate,
                },
                omit_runtime: args.omit_runtime,
            };
            cli::run(&config)
        }
        Command::Report { file } => {
            let text = cli::report(&file)?;
            print!("{text}");
            Ok(cli::EXIT_OK)
        }
        Command::Gen(args) => {
            let scenario = load_scenario(&args)?;
            println!("{}", scenario.to_json());
            Ok(cli::EXIT_OK)
        }
        Command::Tree(args) => {
            let scenario = load_scenario(&args)?;
            let graph = vcdn::hpac::symmetrized_flow_graph(&scenario);
            let tree = gomory_hu(&graph).map_err(|e| CliError::Hpac(e.to_string()))?;
            print!("{}", tree.to_edge_list());
            Ok(cli::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(cli::EXIT_USAGE as u8),
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err @ CliError::Usage(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::EXIT_USAGE as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
