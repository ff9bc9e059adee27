use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridrisk::io::{run_pipeline_file, Format, RunOptions, Stage};
use gridrisk::{fixture, Error, ErrorKind};

#[derive(Parser)]
#[command(name = "gridrisk", version, about = "Critical and systemic risk indicators from a Granger-causality network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the configured critical risk indicators.
    Cri {
        #[command(subcommand)]
        verb: CriVerb,
    },
    /// Fit the VAR, build the network, or report systemic indicators.
    Sri {
        #[command(subcommand)]
        verb: SriVerb,
    },
    /// Run the configured pipeline through `--stage` (default: report).
    Export(RunArgs),
    /// Write the synthetic 8-CRI panel and its config.
    Fixture {
        #[arg(long, default_value = "fixture")]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 600)]
        months: usize,
    },
}

#[derive(Subcommand)]
enum CriVerb {
    Compute(RunArgs),
}

#[derive(Subcommand)]
enum SriVerb {
    Fit(RunArgs),
    Network(RunArgs),
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats (repeatable); overrides the config.
    #[arg(long, value_parser = parse_format)]
    format: Vec<Format>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lag: Option<usize>,
    /// Last stage to run: cri, fit, network or report.
    #[arg(long, value_parser = parse_stage)]
    stage: Option<Stage>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(args: RunArgs, default_stage: Stage) -> gridrisk::Result<()> {
    let options = RunOptions {
        stage: args.stage.unwrap_or(default_stage),
        alpha: args.alpha,
        lag: args.lag,
        formats: (!args.format.is_empty()).then_some(args.format),
        out_dir: args.out,
        generated_at: None,
    };
    let run = run_pipeline_file(&args.config, &options)?;
    for f in &run.files {
        println!("{}", run.out_dir.join(&f.name).display());
    }
    if let Some(report) = &run.report {
        println!(
            "dgc {} ({} of {} ordered pairs significant at alpha {})",
            report.dgc,
            report.significant_edges,
            report.d * (report.d - 1),
            report.alpha
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cri { verb: CriVerb::Compute(a) } => run(a, Stage::Cri),
        Command::Sri { verb: SriVerb::Fit(a) } => run(a, Stage::Fit),
        Command::Sri { verb: SriVerb::Network(a) } => run(a, Stage::Network),
        Command::Sri { verb: SriVerb::Report(a) } => run(a, Stage::Report),
        Command::Export(a) => run(a, Stage::Report),
        Command::Fixture { out, seed, months } => fixture::write_synthetic_fixture(&out, months, seed).map(|config| {
            println!("{}", config.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numerical => 4,
            })
        }
    }
}
