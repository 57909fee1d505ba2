use std::path::PathBuf;
use std::process::ExitCode;

use amalgam_cli::{load_path, run, Command, Options};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Invariants of C*-algebras of amalgamated free products")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest group order accepted from a document.
    #[arg(long, default_value_t = amalgam_core::DEFAULT_MAX_ORDER, global = true)]
    max_order: usize,
    /// Largest number of words enumerated in a ball.
    #[arg(long, global = true)]
    ball_budget: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Sub {
    /// A_Γ, K-groups, ideal lattice and simplicity.
    Invariants(Common),
    /// Inverse temperature, step measure, boundary measure and checks.
    Kms {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gauge: Gauge,
        /// Run the Perron check even when A_Γ is reducible.
        #[arg(long)]
        force_perron: bool,
    },
    /// Random-walk frequencies against ν.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gauge: Gauge,
        /// Number of walks.
        #[arg(long)]
        trials: Option<usize>,
        /// Steps per walk.
        #[arg(long)]
        horizon: Option<usize>,
        /// Walk k uses the stream seed + k.
        #[arg(long)]
        seed: Option<u64>,
        /// Also estimate hitting probabilities for every generator.
        #[arg(long)]
        martin: bool,
    },
    /// Fock relations and hyperbolicity.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Truncation length L.
        #[arg(long)]
        length: Option<usize>,
        /// Ball radius for δ.
        #[arg(long)]
        radius: Option<usize>,
        /// Append the free group Cuntz–Krieger example.
        #[arg(long)]
        free_group_example: bool,
    },
    /// Truncated Bass–Serre tree.
    Tree {
        #[command(flatten)]
        common: Common,
        /// Tree radius.
        #[arg(long)]
        radius: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Spec document (TOML).
    spec: PathBuf,
}

#[derive(Args)]
struct Gauge {
    /// Comma-separated weights ω_i.
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<f64>>,
    /// Largest cylinder depth for the stationarity check.
    #[arg(long)]
    max_depth: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut options = Options { ball_budget: cli.ball_budget, ..Options::default() };
    let gauge = |o: &mut Options, g: Gauge| {
        o.omega = g.omega;
        o.max_depth = g.max_depth;
    };
    let (command, common) = match cli.command {
        Sub::Invariants(c) => (Command::Invariants, c),
        Sub::Kms { common, gauge: g, force_perron } => {
            gauge(&mut options, g);
            options.force_perron = force_perron;
            (Command::Kms, common)
        }
        Sub::Simulate { common, gauge: g, trials, horizon, seed, martin } => {
            gauge(&mut options, g);
            options.trials = trials;
            options.horizon = horizon;
            options.seed = seed;
            options.martin = martin;
            (Command::Simulate, common)
        }
        Sub::Verify { common, length, radius, free_group_example } => {
            options.length = length;
            options.radius = radius;
            options.free_group_example = free_group_example;
            (Command::Verify, common)
        }
        Sub::Tree { common, radius } => {
            options.radius = radius;
            (Command::Tree, common)
        }
    };
    let outcome = load_path(&common.spec, cli.max_order).and_then(|doc| run(command, &doc, &options));
    match outcome {
        Ok(outcome) => {
            match cli.format {
                Format::Text => print!("{}", outcome.text),
                Format::Machine => print!("{}", outcome.report.to_machine()),
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("amalgam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
