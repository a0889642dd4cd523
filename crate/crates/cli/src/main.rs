//! `labp`: maximum fractional matching, half-integral and bipartite vertex
//! covers, and Bethe analysis from an edge-list file.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use labp::bp::LabpConfig;
use labp::Graph;

#[derive(Parser)]
#[command(name = "labp", version, about = "Loopy annealing belief propagation solvers")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for message rounds (default: available cores).
    #[arg(long, global = true, env = "LABP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Edge-list file; `-` or absent reads stdin.
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact fractional matching number with a half-integral cover.
    NuStar(Input),
    /// Minimum half-integral cover, or an exact cover with --bipartite.
    Cover {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        bipartite: bool,
    },
    /// Finite-z fractional matching x(z).
    Match {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_rounds: usize,
        /// Run the ladder z = 10^0 .. 10^8 instead of a single z.
        #[arg(long)]
        anneal: bool,
    },
    /// Bethe free entropy at x(z), optionally with the loop series.
    Bethe {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        #[arg(long)]
        loops: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_rounds: usize,
    },
    /// Brute-force ground truth within size caps.
    Oracle(Input),
}

fn read_graph(input: &Input) -> Result<Graph, String> {
    let parsed = match input.graph.as_deref() {
        None => Graph::parse_edge_list(io::stdin().lock()),
        Some(p) if p.as_os_str() == "-" => Graph::parse_edge_list(io::stdin().lock()),
        Some(p) => {
            let file = File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Graph::parse_edge_list(BufReader::new(file))
        }
    };
    parsed.map_err(|e| format!("parse error: {e}"))
}

fn run(cli: &Cli) -> Result<report::Report, String> {
    let err = |e: labp::Error| e.to_string();
    match &cli.command {
        Command::NuStar(input) => commands::nu_star(&read_graph(input)?).map_err(err),
        Command::Cover { input, bipartite } => commands::cover(&read_graph(input)?, *bipartite).map_err(err),
        Command::Match { input, z, tol, max_rounds, anneal } => {
            let args = commands::MatchArgs { z: *z, tol: *tol, max_rounds: *max_rounds, anneal: *anneal };
            commands::matching(&read_graph(input)?, &args).map_err(err)
        }
        Command::Bethe { input, z, loops, tol, max_rounds } => {
            let cfg = LabpConfig { tol: *tol, max_rounds: *max_rounds };
            commands::bethe(&read_graph(input)?, *z, *loops, &cfg).map_err(err)
        }
        Command::Oracle(input) => Ok(commands::oracle(&read_graph(input)?)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = if cli.json {
        serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n"
    } else {
        report.to_text()
    };
    if io::stdout().write_all(text.as_bytes()).is_err() {
        return ExitCode::from(1);
    }
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    if report.certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
