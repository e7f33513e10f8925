//! `deltaconf`: recognize distance-hereditary graphs and draw them
//! Δ-confluently.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltaconf::{ExtensionWeights, Theme};

#[derive(Parser, Debug)]
#[command(
    name = "deltaconf",
    version,
    about = "Δ-confluent drawings of distance-hereditary graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print an elimination sequence, or refuse a graph that is not distance-hereditary
    Recognize {
        /// Edge-list file, `-` for standard input
        #[arg(default_value = "-")]
        input: String,
    },
    /// Draw a graph as SVG
    Draw(DrawArgs),
    /// Generate a random distance-hereditary graph
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pendant, true-twin and false-twin probabilities [default: uniform]
        #[arg(long)]
        weights: Option<ExtensionWeights>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a largest distance-hereditary induced subgraph with at least k vertices
    Maxsub {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        k: usize,
    },
    /// Validate tree, layout, polyline or SVG files
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Smoothness margin below 90 degrees for SVG files
        #[arg(long, default_value_t = 5.0)]
        tolerance: f64,
    },
    /// Print the underlying tree of a graph
    Tree {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LayoutKind {
    Ortho,
    Hex,
    Radial,
}

#[derive(Args, Debug)]
struct DrawArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = LayoutKind::Hex)]
    layout: LayoutKind,
    /// SVG destination; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the ortho or hex layout in its text form
    #[arg(long)]
    layout_out: Option<PathBuf>,
    #[arg(long)]
    labels: bool,
    #[arg(long, default_value_t = 24.0)]
    cell_size: f64,
    #[arg(long, default_value_t = 6.0)]
    junction_radius: f64,
    /// Shrink ratio per level for the radial layout
    #[arg(long, default_value_t = deltaconf::radial::DEFAULT_RATIO)]
    ratio: f64,
    #[arg(long, default_value = "light")]
    theme: Theme,
    /// Greedy bend reduction on the hex layout
    #[arg(long)]
    reduce_bends: bool,
}

/// A failed command: message for standard error and the exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_IO: u8 = 1;
pub const EXIT_NOT_DH: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;
pub const EXIT_GUARD: u8 = 4;
pub const EXIT_INVALID: u8 = 5;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_IO)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Recognize { input } => commands::recognize(&input),
        Command::Draw(args) => commands::draw(&args),
        Command::Gen {
            n,
            seed,
            weights,
            out,
        } => commands::gen(n, seed, weights.unwrap_or_default(), out.as_deref()),
        Command::Maxsub { input, k } => commands::maxsub(&input, k),
        Command::Check { files, tolerance } => commands::check(&files, tolerance),
        Command::Tree { input, out } => commands::tree(&input, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
