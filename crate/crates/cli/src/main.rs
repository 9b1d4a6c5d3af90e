use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use blowupcalc_cli::{
    generate_corpus, run_corpus, run_job, Command as Job, JobOptions, JobResult, JobSpec,
    MAX_ITERATIONS_ENV,
};
use clap::{Parser, Subcommand};

/// Exact decision procedures for blow-ups of CP² and bundles over S².
///
/// Each subcommand takes its JSON payload as an argument, `@path` to read it
/// from a file, or `-` for stdin. Exit codes: 0 computed, 1 internal or I/O
/// failure, 2 invalid input, 3 degenerate input.
#[derive(Parser)]
#[command(name = "blowupcalc", version)]
struct Cli {
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cap on Cremona moves during reduction.
    #[arg(long, global = true, env = MAX_ITERATIONS_ENV)]
    max_iterations: Option<usize>,
    /// Degree bound for exceptional-class and decomposition searches.
    #[arg(long, global = true)]
    d_max: Option<u32>,
    /// Largest number of summands tried by `fibersum`.
    #[arg(long, global = true)]
    m_max: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cremona-reduce a shape {"mu", "eps"}.
    Reduce { input: String },
    /// Enumerate exceptional classes {"k", "d_max"?}.
    Exceptional { input: String },
    /// Volume polynomial of a single blow-up or of a tower.
    Volume { input: String },
    /// Test a volume polynomial for smooth triviality.
    Trivial { input: String },
    /// Nodal splittings of an exceptional class.
    Decompose { input: String },
    /// Stability of the minimal exceptional class.
    Stability { input: String },
    /// Certify the rank lower bound k(r+k).
    CertifyRank { input: String },
    /// Decide whether a tower is a fiber sum of symplectic towers.
    Fibersum { input: String },
    /// Size constraints on iterated blow-ups.
    SizeCheck { input: String },
    /// Run a JSONL file of jobs.
    Corpus { path: PathBuf },
    /// Write a reproducible random corpus.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn read_payload(arg: &str) -> io::Result<String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
    } else {
        Ok(arg.to_string())
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> io::Result<u8> {
    let defaults = JobOptions {
        d_max: cli.d_max,
        m_max: cli.m_max,
        max_iterations: cli.max_iterations,
    };
    let mut out = open_output(&cli.output)?;
    let (command, payload) = match cli.command {
        Cmd::Corpus { path } => {
            let file = BufReader::new(File::open(&path)?);
            run_corpus(file, &mut out, defaults)?;
            out.flush()?;
            return Ok(0);
        }
        Cmd::GenCorpus { seed, count } => {
            for job in generate_corpus(seed, count) {
                writeln!(out, "{}", serde_json::to_string(&job)?)?;
            }
            out.flush()?;
            return Ok(0);
        }
        Cmd::Reduce { input } => (Job::Reduce, input),
        Cmd::Exceptional { input } => (Job::Exceptional, input),
        Cmd::Volume { input } => (Job::Volume, input),
        Cmd::Trivial { input } => (Job::Trivial, input),
        Cmd::Decompose { input } => (Job::Decompose, input),
        Cmd::Stability { input } => (Job::Stability, input),
        Cmd::CertifyRank { input } => (Job::CertifyRank, input),
        Cmd::Fibersum { input } => (Job::Fibersum, input),
        Cmd::SizeCheck { input } => (Job::SizeCheck, input),
    };
    let text = read_payload(&payload)?;
    let line = match serde_json::from_str(&text) {
        Ok(input) => {
            let job = JobSpec {
                command,
                input,
                options: JobOptions::default(),
            };
            run_job(&job, defaults)
        }
        Err(e) => JobResult::invalid(Some(command.name()), format!("malformed JSON payload: {e}")),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&line)?)?;
    out.flush()?;
    Ok(line.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("blowupcalc: {e}");
            ExitCode::from(1)
        }
    }
}
