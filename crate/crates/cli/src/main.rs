use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use entconc::protocol::BatchConfig;
use entconc_cli::{batch, dataset::write_json_value, eof, eof_default_grid, fig2, fig3, oracle_check, prob};
use entconc_cli::{Dataset, Result, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "entconc", version, about = "Datasets for tripartite entanglement concentration")]
struct Cli {
    /// Seed for stochastic commands.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entanglement gap of the test state against n.
    Fig2 {
        #[arg(long, default_value_t = 0.8)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        n_max: usize,
        /// Spacing of the n grid; step * p must be an integer.
        #[arg(long, default_value_t = 5)]
        step: usize,
    },
    /// Fitted gap slope for each p.
    Fig3 {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        p_list: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        n_max: usize,
    },
    /// Closed forms against dense state vectors (always JSON).
    OracleCheck {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Seeded runs of the batching procedure.
    Batch {
        /// Copies per batch.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 100_000)]
        max_batches: usize,
    },
    /// Entanglement-of-formation ledger over a p grid.
    Eof {
        /// Defaults to 0, 0.01, ..., 1.
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<f64>>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(d: &Dataset, cli: &Cli) -> Result<()> {
    let mut w = sink(&cli.out)?;
    match cli.format {
        Format::Csv => d.write_csv(&mut w)?,
        Format::Json => d.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Fig2 { p, n_max, step } => emit(&fig2(prob(*p)?, *n_max, *step)?, cli)?,
        Command::Fig3 { p_list, n_max } => {
            let ps = p_list.iter().map(|&p| prob(p)).collect::<Result<Vec<_>>>()?;
            let (d, warnings) = fig3(&ps, *n_max)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            emit(&d, cli)?;
        }
        Command::OracleCheck { n_max } => {
            let check = oracle_check(*n_max)?;
            let mut w = sink(&cli.out)?;
            write_json_value(&check.report, &mut w)?;
            w.flush()?;
            if !check.passed() {
                for (n, k, why) in &check.failures {
                    eprintln!("check failed at n={n} k={k}: {why}");
                }
                if !check.n2_locc_passed {
                    eprintln!("check failed: n=2 local circuit");
                }
                return Ok(1);
            }
        }
        Command::Batch {
            n,
            p,
            epsilon,
            trials,
            max_batches,
        } => {
            let cfg = BatchConfig {
                n: *n,
                p: prob(*p)?,
                epsilon: *epsilon,
                max_batches: *max_batches,
                seed: cli.seed,
            };
            emit(&batch(&cfg, *trials)?, cli)?;
        }
        Command::Eof { p_list } => {
            let grid = match p_list {
                Some(ps) => ps.iter().map(|&p| prob(p)).collect::<Result<Vec<_>>>()?,
                None => eof_default_grid(),
            };
            emit(&eof(&grid)?, cli)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
