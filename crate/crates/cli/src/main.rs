use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mwss_cli::{cmd_bench, cmd_decompose, cmd_gen, cmd_oracle, cmd_solve, parse, Failure, BENCH_HEADER};
use mwss_core::WeightedGraph;

#[derive(Parser)]
#[command(name = "mwss", version, about = "Maximum weight stable set in claw-free graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file.
    Solve {
        input: PathBuf,
        /// Run every structure check and compare with brute force on small inputs.
        #[arg(long)]
        certify: bool,
        /// Print the lifting ledgers after the report.
        #[arg(long)]
        ledger: bool,
    },
    /// Write a generated claw-free instance.
    Gen {
        #[arg(long, default_value = "line")]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        w_max: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Brute-force weight.
    Oracle { input: PathBuf },
    /// Show the components of the final basic graphs.
    Decompose {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Time the pipeline on generated instances, CSV on stdout.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "200,400,800")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "line")]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        certify: bool,
    },
}

fn load(path: &PathBuf) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Solve { input, certify, ledger } => {
            let g = load(&input)?;
            print!("{}", cmd_solve(&g, certify)?.render(ledger));
        }
        Cmd::Gen { model, n, seed, w_max, output } => {
            let model = mwss_cli::commands::parse_model(&model)?;
            let text = cmd_gen(model, n, seed, w_max);
            match output {
                Some(p) => fs::write(&p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
        }
        Cmd::Oracle { input } => println!("{}", cmd_oracle(&load(&input)?)?),
        Cmd::Decompose { input, dot } => print!("{}", cmd_decompose(&load(&input)?, dot)?),
        Cmd::Bench { sizes, model, seed, certify } => {
            let model = mwss_cli::commands::parse_model(&model)?;
            println!("{BENCH_HEADER}");
            for row in cmd_bench(&sizes, model, seed, certify)? {
                println!("{}", row.csv());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
