use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use joinconv::bench::{
    generate_clique, run_algorithm, run_benchmark_with, theoretical_ops_table, Algorithm,
    BenchConfig, DEFAULT_MAX_CARDINALITY,
};
use joinconv::costmodel::QueryInstance;
use joinconv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "joinconv",
    version,
    about = "Join ordering via fast subset convolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random clique query.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_CARDINALITY)]
        max_card: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize a query file with one algorithm.
    Optimize {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        input: PathBuf,
        /// Prune sets whose cardinality exceeds this (dpsub algorithms only).
        #[arg(long)]
        cap: Option<u64>,
        /// Result file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time algorithms over generated cliques and write a CSV.
    Bench {
        /// Comma-separated algorithm names.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        algos: Vec<Algorithm>,
        /// Inclusive size range, `lo..hi` or a single size.
        #[arg(long, value_parser = parse_sizes)]
        sizes: (usize, usize),
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_CARDINALITY)]
        max_card: u64,
    },
    /// Print exact versus approximation operation counts.
    OpsTable {
        #[arg(long)]
        n: u32,
        /// Comma-separated positive epsilons.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_epsilon)]
        eps: Vec<f64>,
    },
}

fn parse_sizes(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|v| (v, v)),
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_internal() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            n,
            seed,
            max_card,
            out,
        } => generate_clique(n, seed, max_card)?.save(&out),
        Command::Optimize {
            algo,
            input,
            cap,
            out,
        } => {
            let q = QueryInstance::load(&input)?;
            let outcome = run_algorithm(&q, algo, cap)?;
            joinconv::bench::check_outcome(&q, &outcome).map_err(|detail| {
                Error::OracleDisagreement {
                    seed: 0,
                    n: q.n(),
                    rep: 0,
                    detail,
                }
            })?;
            let text = serde_json::to_string_pretty(&outcome.to_json(q.names()))?;
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Bench {
            algos,
            sizes,
            reps,
            seed,
            csv,
            max_card,
        } => {
            let cfg = BenchConfig {
                algorithms: algos,
                sizes: sizes.0..=sizes.1,
                repetitions: reps,
                seed,
                max_cardinality: max_card,
                output: Some(csv),
            };
            let report = run_benchmark_with(&cfg, |r| {
                eprintln!(
                    "n={:<2} rep={} {:<10} cost={} {:.3} ms",
                    r.n,
                    r.rep,
                    r.outcome.algorithm.name(),
                    r.outcome.cost_cell(),
                    r.outcome.elapsed_ns as f64 / 1e6
                );
            })?;
            println!(
                "{:>3}  {:<10} {:>14} {:>14}",
                "n", "algorithm", "mean_ms", "median_ms"
            );
            for s in report.summary() {
                println!(
                    "{:>3}  {:<10} {:>14.3} {:>14.3}",
                    s.n,
                    s.algorithm.name(),
                    s.mean_ns / 1e6,
                    s.median_ns / 1e6
                );
            }
            Ok(())
        }
        Command::OpsTable { n, eps } => {
            println!(
                "{:>4} {:>10} {:>26} {:>26}  approx<exact",
                "n", "eps", "exact 3^n", "approx 2^(3n/2)/sqrt(eps)"
            );
            for row in theoretical_ops_table(n, &eps) {
                println!(
                    "{:>4} {:>10e} {:>26} {:>26.6e}  {}",
                    row.n, row.epsilon, row.exact_ops, row.approx_ops, row.approx_below_exact
                );
            }
            Ok(())
        }
    }
}
