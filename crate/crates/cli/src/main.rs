//! `unires`: divergences between density operators and their unitarily
//! residual counterparts, randomized verification campaigns, and
//! non-Hermitian dynamics with speed-limit reports.
//!
//! Results go to stdout as JSON (or a table with `--pretty`). Exit status is
//! 0 when every requested check passes, 1 when a check fails, and 2 for
//! usage or input errors.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unires::dynamics::{summarize, write_csv, Scenario};
use unires::verify::{run_suite, Suite, SuiteConfig};
use unires::{DensityOperator, DivergenceKind};

use crate::report::{DivergenceRecord, Output};

/// Everything random flows from one seed; this is the default.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "unires", version, about)]
struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence d, closed-form residual d~ and the gap d - d~ between two
    /// operator files.
    Divergence(DivergenceArgs),
    /// Run a randomized property suite.
    Verify(VerifyArgs),
    /// Integrate a scenario, export the trajectory and report the bounds.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    BuresAngle,
    TraceDistance,
    PetzRenyi,
    RelativeEntropy,
}

#[derive(Args, Debug)]
struct KindSelection {
    /// Divergence kinds; all four when omitted.
    #[arg(long = "kind", value_enum, value_delimiter = ',')]
    kinds: Vec<KindArg>,

    /// Order of the Petz-Renyi divergence.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
}

impl KindSelection {
    fn resolve(&self) -> Result<Vec<DivergenceKind>, String> {
        let picked = if self.kinds.is_empty() {
            vec![
                KindArg::BuresAngle,
                KindArg::TraceDistance,
                KindArg::PetzRenyi,
                KindArg::RelativeEntropy,
            ]
        } else {
            self.kinds.clone()
        };
        picked
            .into_iter()
            .map(|k| match k {
                KindArg::BuresAngle => Ok(DivergenceKind::BuresAngle),
                KindArg::TraceDistance => Ok(DivergenceKind::TraceDistance),
                KindArg::PetzRenyi => {
                    DivergenceKind::petz_renyi(self.alpha).map_err(|e| e.to_string())
                }
                KindArg::RelativeEntropy => Ok(DivergenceKind::RelativeEntropy),
            })
            .collect()
    }
}

#[derive(Args, Debug)]
struct DivergenceArgs {
    /// First operator, `{"dim": n, "re": [[..]], "im": [[..]]}`.
    a: PathBuf,
    /// Second operator.
    b: PathBuf,
    #[command(flatten)]
    kinds: KindSelection,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of isomorphism, metric-axioms, monotonicity, convexity, oracle,
    /// inequalities.
    suite: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Comma-separated dimensions, cycled through by trial.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[command(flatten)]
    kinds: KindSelection,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Trajectory CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario's step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the scenario's end time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Seed for the sampled sub-interval checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_state(path: &Path) -> Result<DensityOperator, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn divergence(args: &DivergenceArgs) -> Result<Output, String> {
    let rho = load_state(&args.a)?;
    let sigma = load_state(&args.b)?;
    if rho.dim() != sigma.dim() {
        return Err(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        ));
    }
    let records = args
        .kinds
        .resolve()?
        .into_iter()
        .map(|kind| {
            let d = kind.evaluate(&rho, &sigma).map_err(|e| e.to_string())?;
            let residual = kind.residual_of(&rho, &sigma).map_err(|e| e.to_string())?;
            Ok(DivergenceRecord::new(kind, d, residual))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Output::Divergence {
        dim: rho.dim(),
        results: records,
    })
}

fn verify(args: &VerifyArgs) -> Result<Output, String> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: unires::Error| e.to_string())?;
    let config = SuiteConfig::new(args.trials as usize, args.dims.clone(), args.seed)
        .with_kinds(args.kinds.resolve()?);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs as usize);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let report = pool
        .install(|| run_suite(suite, &config))
        .map_err(|e| e.to_string())?;
    Ok(Output::Verify(report))
}

fn simulate(args: &SimulateArgs) -> Result<Output, String> {
    let text = read(&args.scenario)?;
    let mut scenario =
        Scenario::from_json(&text).map_err(|e| format!("{}: {e}", args.scenario.display()))?;
    if let Some(steps) = args.steps {
        scenario.steps = steps;
    }
    if let Some(t_end) = args.t_end {
        scenario.t_end = t_end;
    }
    let (gen, traj) = scenario.run().map_err(|e| e.to_string())?;
    if let Some(out) = &args.out {
        let file =
            fs::File::create(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
        write_csv(&traj, std::io::BufWriter::new(file)).map_err(|e| e.to_string())?;
    }
    let summary = summarize(&traj, &gen, args.seed).map_err(|e| e.to_string())?;
    Ok(Output::Simulate(Box::new(summary)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Divergence(args) => divergence(args),
        Command::Verify(args) => verify(args),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(output) => {
            output.print(cli.pretty);
            if output.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
