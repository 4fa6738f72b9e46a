use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use linkcensus::census::{CensusKind, Objective, SearchOptions};
use linkcensus::graph::parse_parts;
use linkcensus_cli::commands::{self, Family, Source};
use linkcensus_cli::service::{self, Session};

#[derive(Parser)]
#[command(name = "linkcensus", version, about = "Count links and knots in drawings of complete partite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Comma-separated part sizes, e.g. `4,4,1`.
#[derive(Clone, Debug)]
struct Parts(Vec<usize>);

fn parts_arg(s: &str) -> Result<Parts, linkcensus::Error> {
    parse_parts(s).map(Parts)
}

#[derive(Subcommand)]
enum Command {
    /// Build a diagram and write it as a diagram file.
    Gen {
        #[arg(long, value_parser = parts_arg)]
        parts: Parts,
        /// fan, weave or random
        #[arg(long, default_value = "fan")]
        layout: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Census a diagram file.
    Count {
        file: PathBuf,
        #[arg(long, default_value = "both")]
        kind: CensusKind,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Census a diagram and compare it against the reference tables.
    Verify {
        #[arg(long, value_parser = parts_arg)]
        parts: Parts,
        /// fan, weave, random or a diagram file
        #[arg(long, default_value = "fan")]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "both")]
        kind: CensusKind,
    },
    /// Run seeded property trials.
    RandomAudit {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Flip crossings to reduce the number of links or knots.
    Search {
        file: PathBuf,
        #[arg(long, default_value = "links")]
        objective: Objective,
        #[arg(long, default_value_t = 1000)]
        budget: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        plateau: u64,
        #[arg(long)]
        anneal: bool,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        /// also try small vertex moves
        #[arg(long)]
        jitter: bool,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Serve the editor backend over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// saved after every change; loaded at start if present
        #[arg(long, default_value = "linkcensus-session.json")]
        workfile: PathBuf,
        /// diagram to start from, replacing the working file
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn emit(output: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => commands::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen { parts: Parts(parts), layout, seed, output } => {
            let source = Source::parse(&layout);
            if matches!(source, Source::File(_)) {
                anyhow::bail!(linkcensus::Error::UnsupportedFamily(layout));
            }
            let d = commands::build(&parts, &source, seed)?;
            emit(output.as_ref(), &d.to_json())?;
        }
        Command::Count { file, kind, output } => {
            let report = commands::count(&commands::load(&file)?, kind)?;
            emit(output.as_ref(), &report.to_json())?;
        }
        Command::Verify { parts: Parts(parts), input, seed, kind } => {
            let d = commands::build(&parts, &Source::parse(&input), seed)?;
            let verdicts = commands::verify(&parts, &d, kind)?;
            for v in &verdicts {
                println!("{}", commands::verdict_line(v));
            }
            if verdicts.iter().any(|v| v.is_failure()) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::RandomAudit { family, trials, seed } => {
            let r = commands::random_audit(family, trials, seed);
            print!("{}", commands::canonical(&r));
            if r.failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Search { file, objective, budget, seed, plateau, anneal, temperature, jitter, output, trace } => {
            let opts = SearchOptions { objective, budget, seed, plateau, anneal, temperature, jitter };
            let r = commands::search(&commands::load(&file)?, &opts)?;
            commands::write(&output, &r.best.to_json())?;
            if let Some(t) = trace {
                commands::write(&t, &commands::trace_text(&r))?;
            }
            print!("{}", commands::canonical(&commands::search_summary(&r, &opts)));
        }
        Command::Serve { port, workfile, input } => {
            if let Some(i) = input {
                let d = commands::load(&i)?;
                commands::write(&workfile, &d.to_json())?;
            }
            let session = Session::open(workfile)?;
            tokio::runtime::Runtime::new()?.block_on(service::serve(port, session))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", commands::diagnostic(&e));
            ExitCode::FAILURE
        }
    }
}
