//! `prodgame`: reproducible experiments on product two-action games.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
//! or parse errors.

mod commands;
mod output;
mod tuple;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prodgame::candidates::Method;
use prodgame::solver::SolverConfig;
use serde::Serialize;

use output::OutputArgs;

#[derive(Parser)]
#[command(
    name = "prodgame",
    version,
    about = "Equilibria of product two-action games"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Candidate and equilibrium counts for m = 1..=M.
    Table {
        /// Largest player count (at most 20).
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a product game and write it as a game file.
    Construct {
        #[command(flatten)]
        tuple: TupleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every equilibrium candidate with its verdict.
    Candidates {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count equilibria per face class with the exact engine.
    Classify {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Fail unless the counts are those of a maximal game.
        #[arg(long)]
        expect_maximal: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve any two-action game by support enumeration and Newton.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        expect_maximal: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Perturb a product game and track its equilibria.
    Deform {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Max-norm radius within which a perturbed equilibrium counts as tracked.
        #[arg(long, default_value_t = 0.05)]
        track_radius: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the face-class bounds on random generic games.
    Scan {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Fresh games drawn for one trial after an even equilibrium count.
        #[arg(long, default_value_t = 3)]
        max_regenerations: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
struct TupleArgs {
    #[arg(long)]
    m: usize,
    /// Sign vector as a bit string; all zeros by default.
    #[arg(long)]
    v: Option<String>,
    /// `delta`, `id`, or m permutations separated by ';' (image lists or cycles).
    #[arg(long, default_value = "delta")]
    sigma: String,
}

#[derive(Debug, Clone, Args, Serialize)]
struct GameArgs {
    /// Game file; when omitted the game is built from --m, --v and --sigma.
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    m: Option<usize>,
    #[arg(long, requires = "m")]
    v: Option<String>,
    #[arg(long, requires = "m")]
    sigma: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct SolverArgs {
    /// Newton starts per support; default 50·2^k for k free players.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    residual_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    dedup_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    margin_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            starts: self.starts,
            residual_tol: self.residual_tol,
            dedup_tol: self.dedup_tol,
            margin_tol: self.margin_tol,
            max_iterations: self.max_iterations,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Increment,
    Sign,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Increment => Method::Increment,
            MethodArg::Sign => Method::Sign,
            MethodArg::Both => Method::Both,
        }
    }
}

pub enum Status {
    Pass,
    CheckFailed,
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Table { m, output } => commands::table(m, &output),
        Command::Construct { tuple, out } => commands::construct(&tuple, out.as_deref()),
        Command::Candidates {
            game,
            method,
            output,
        } => commands::candidates(&game, method.into(), &output),
        Command::Classify {
            game,
            method,
            expect_maximal,
            output,
        } => commands::classify_cmd(&game, method.into(), expect_maximal, &output),
        Command::Solve {
            game,
            solver,
            expect_maximal,
            output,
        } => commands::solve(&game, &solver.config(), expect_maximal, &output),
        Command::Deform {
            game,
            solver,
            epsilon,
            trials,
            track_radius,
            output,
        } => commands::deform(
            &game,
            &solver.config(),
            epsilon,
            trials,
            track_radius,
            &output,
        ),
        Command::Scan {
            m,
            trials,
            max_regenerations,
            solver,
            output,
        } => commands::scan(m, trials, max_regenerations, &solver.config(), &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
