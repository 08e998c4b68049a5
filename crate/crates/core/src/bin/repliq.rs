use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use repliq::cli::{
    run_analyze, run_simulate, AnalyzeRequest, FlavorChoice, OutputFormat, SimulateRequest,
    SEED_ENV_VAR,
};
use repliq::{parse_dependency, SelectionRule};

#[derive(Parser)]
#[command(name = "repliq", version, about = "Directional replicability r-values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute r-values and replicability claims from a p-value table.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        /// Features examined in the primary study (default: rows in the input).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.8)]
        l00: f64,
        #[arg(long, default_value_t = 0.5)]
        c2: f64,
        /// indep | mstar | threshold
        #[arg(long, default_value = "indep")]
        dep: String,
        #[arg(long)]
        t: Option<f64>,
        /// fdr | fwer | both
        #[arg(long, default_value = "both")]
        flavor: FlavorChoice,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        /// provided | threshold:<c> | bh:<q> | bonf:<a> | topk:<k>
        #[arg(long, default_value = "provided")]
        select: SelectionRule,
    },
    /// Run a Monte Carlo scenario file.
    Simulate {
        #[arg(long, alias = "scenario")]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
    },
}

fn run(cli: Cli) -> repliq::Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            output,
            format,
            m,
            l00,
            c2,
            dep,
            t,
            flavor,
            level,
            select,
        } => {
            let req = AnalyzeRequest {
                output: output.clone(),
                format,
                m,
                l00,
                c2,
                dependency: parse_dependency(&dep, t)?,
                flavor,
                level,
                selection: select,
                ..AnalyzeRequest::new(input)
            };
            let out = run_analyze(&req)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            if output.is_none() {
                print!("{}", out.rendered);
            }
        }
        Command::Simulate {
            input,
            output,
            format,
            seed,
            reps,
        } => {
            let req = SimulateRequest {
                output: output.clone(),
                format,
                seed,
                reps,
                env_seed: std::env::var(SEED_ENV_VAR).ok(),
                ..SimulateRequest::new(input)
            };
            let out = run_simulate(&req)?;
            for w in &out.result.warnings {
                eprintln!("warning: {w}");
            }
            if output.is_none() {
                print!("{}", out.rendered);
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
            ExitCode::FAILURE
        }
    }
}
