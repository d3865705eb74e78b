use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tipping::model::Param;
use tipping_cli::run::{self, Command, Request, RunError, DEFAULT_SEED};
use tipping_cli::scenario::{load_scenario, Grid, Scenario};

/// Two-restaurant tipping model: simulations, equilibria, wage policy and
/// sensitivity analysis.
#[derive(Debug, Parser)]
#[command(name = "tipping", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario file (`key = value` lines); defaults to the baseline.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sample count for sensitivity runs.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Grid as `lo:hi:steps`.
    #[arg(long, global = true)]
    grid: Option<Grid>,
    /// Figure id for `reproduce-figure`.
    #[arg(long, global = true)]
    figure: Option<String>,
    /// Parameter for `sweep`: m, r, rDW or rCW.
    #[arg(long, global = true)]
    param: Option<Param>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Integrate the dynamics from the scenario's initial state.
    Simulate,
    /// Fixed point, stability and nullclines.
    Equilibrium,
    /// Optimal wages under both tip policies at the rival's tip rate.
    Optimize,
    /// Optimized profit curves and the critical tip rate.
    Threshold,
    /// Critical tip rate across one parameter.
    Sweep,
    /// Latin hypercube PRCC analysis.
    Sensitivity,
    /// Regenerate the data behind one figure.
    ReproduceFigure,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Equilibrium => Command::Equilibrium,
            Cmd::Optimize => Command::Optimize,
            Cmd::Threshold => Command::Threshold,
            Cmd::Sweep => Command::Sweep,
            Cmd::Sensitivity => Command::Sensitivity,
            Cmd::ReproduceFigure => Command::ReproduceFigure,
        }
    }
}

fn request(cli: Cli) -> Result<Request, RunError> {
    let mut scenario = match &cli.scenario {
        Some(path) => load_scenario(path)?,
        None => Scenario::default(),
    };
    scenario.n = cli.n.or(scenario.n);
    scenario.grid = cli.grid.or(scenario.grid);
    scenario.figure = cli.figure.or(scenario.figure);
    scenario.sweep = cli.param.or(scenario.sweep);
    let out = cli.out.or(scenario.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok(Request {
        command: cli.command.into(),
        seed: cli.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED),
        scenario,
        scenario_path: cli.scenario,
        out,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match request(cli).and_then(|req| run::run(&req)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let detail = e.to_string().replace('\n', " ");
            eprintln!("error category={}: {detail}", e.category());
            ExitCode::FAILURE
        }
    }
}
