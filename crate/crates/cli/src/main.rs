//! `omega`: tables, charts and matrices for distinguished integers.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for domain errors or when a scan
//! finds counterexamples.

mod commands;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use commands::{Report, View};

#[derive(Debug, Parser)]
#[command(name = "omega", version, about = "Distinguished integers and the fixed points of phi_{s,t}")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for sharded scans (default: all cores)
    #[arg(long, global = true, env = "OMEGA_JOBS")]
    jobs: Option<usize>,

    /// Accepted for reproducible invocations; every command is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mark the distinguished integers in [LO, HI], twelve per row
    Table {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        lo: u64,
        hi: u64,
    },
    /// Both distinguishedness witnesses for one r
    Analyze {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        r: u64,
    },
    /// Change-of-basis matrix between the psi and F families for a distinguished r
    Basis {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        r: u64,
        #[arg(long, value_enum, ignore_case = true, default_value_t = View::Mprime)]
        view: View,
    },
    /// Which multiples p_1^e_1 ... p_n^e_n k are distinguished, over the primes of g
    Chart {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        k: u64,
        /// Exponent bound, one per prime of g or a single bound for all
        #[arg(long, value_delimiter = ',', default_value = "6")]
        max_exp: Vec<u32>,
    },
    /// Growth of ord_{p^l}(s) with l
    Profile {
        s: i64,
        p: u64,
        #[arg(long, default_value_t = 8)]
        max_ell: u32,
    },
    /// Check the progressions b r + g_bar s r m through every distinguished r <= LIMIT
    Progressions {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        #[arg(long, default_value_t = 200)]
        limit: u64,
        /// Number of terms per progression, starting at m = 0
        #[arg(long, default_value_t = 21)]
        terms: usize,
        /// Offsets b, coprime to g_bar s
        #[arg(long = "b", value_delimiter = ',', default_value = "1")]
        offsets: Vec<u64>,
    },
    /// Compare M' with scaled affine orbits for every distinguished r <= LIMIT
    ScanConjecture {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        #[arg(long, default_value_t = 50)]
        limit: u64,
    },
    /// Check that r = 10, 14 mod 24 are (3,1)-distinguished up to LIMIT
    #[command(name = "check-10-14")]
    Check1014 {
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
    },
    /// Check that (s,t)-distinguished integers are (s,gcd(t,s-1))- and (s,t')-distinguished
    Descent {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        #[arg(allow_negative_numbers = true)]
        t_prime: i64,
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
    },
    /// Steps mu for which ALPHA + mu m stays distinguished
    ModuliScan {
        s: i64,
        #[arg(allow_negative_numbers = true)]
        t: i64,
        #[arg(long)]
        alpha: u64,
        #[arg(long, default_value_t = 100)]
        max_mu: u64,
        #[arg(long, default_value_t = 20)]
        terms: u64,
    },
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    command: &'a str,
    params: &'a BTreeMap<String, Value>,
    result: &'a Value,
    counterexamples: &'a [Value],
    version: &'a str,
}

enum Failure {
    Usage(String),
    Core(omega_core::Error),
}

impl From<omega_core::Error> for Failure {
    fn from(e: omega_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Table { .. } => "table",
        Command::Analyze { .. } => "analyze",
        Command::Basis { .. } => "basis",
        Command::Chart { .. } => "chart",
        Command::Profile { .. } => "profile",
        Command::Progressions { .. } => "progressions",
        Command::ScanConjecture { .. } => "scan-conjecture",
        Command::Check1014 { .. } => "check-10-14",
        Command::Descent { .. } => "descent",
        Command::ModuliScan { .. } => "moduli-scan",
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let jobs = cli.jobs;
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let report = match cli.command {
        Command::Table { s, t, lo, hi } => {
            if lo == 0 || lo > hi {
                return Err(Failure::Usage(format!("need 1 <= LO <= HI, got LO = {lo}, HI = {hi}")));
            }
            commands::table(s, t, lo, hi, jobs)?
        }
        Command::Analyze { s, t, r } => commands::analyze(s, t, r)?,
        Command::Basis { s, t, r, view } => commands::basis(s, t, r, view)?,
        Command::Chart { s, t, k, ref max_exp } => commands::chart(s, t, k, max_exp)?,
        Command::Profile { s, p, max_ell } => commands::profile(s, p, max_ell)?,
        Command::Progressions { s, t, limit, terms, ref offsets } => {
            commands::progressions(s, t, limit, terms, offsets, jobs)?
        }
        Command::ScanConjecture { s, t, limit } => commands::scan_conjecture(s, t, limit, jobs)?,
        Command::Check1014 { limit } => commands::check_10_14(limit, jobs)?,
        Command::Descent { s, t, t_prime, limit } => commands::descent(s, t, t_prime, limit, jobs)?,
        Command::ModuliScan { s, t, alpha, max_mu, terms } => commands::moduli_scan(s, t, alpha, max_mu, terms)?,
    };
    Ok(report)
}

fn render(cli: &Cli, report: &Report) -> String {
    match cli.format {
        Format::Text => report.text.clone(),
        Format::Csv => report.csv.clone(),
        Format::Json => {
            let envelope = ReportEnvelope {
                command: command_name(&cli.command),
                params: &report.params,
                result: &report.result,
                counterexamples: &report.counterexamples,
                version: env!("CARGO_PKG_VERSION"),
            };
            let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            s.push('\n');
            s
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(seed) = cli.seed {
        log::debug!("--seed {seed} ignored; output does not depend on randomness");
    }

    let report = match run(&cli) {
        Ok(report) => report,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let output = render(&cli, &report);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, output.as_bytes()),
        None => std::io::stdout().lock().write_all(output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if !report.counterexamples.is_empty() {
        eprintln!("{} counterexample(s) found", report.counterexamples.len());
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
