//! `copl`: run, check or trace concept-oriented programs.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use copl_core::{compile, Analyzed, Config, Diagnostic, Interpreter};

const EXIT_RUNTIME: u8 = 1;
const EXIT_COMPILE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "copl", version, about = "Interpreter for a minimal concept-oriented language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a program; `print` output goes to stdout.
    Run {
        file: PathBuf,
        /// Write access-protocol trace lines to stderr (also COPL_TRACE=1).
        #[arg(long)]
        trace: bool,
        /// Evaluation steps before the run is aborted.
        #[arg(long, value_name = "N", default_value_t = Config::default().max_steps,
              value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
    },
    /// Parse and analyze a program without running it.
    Check { file: PathBuf },
    /// Run a program and print only its trace to stdout.
    TraceDump {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = Config::default().max_steps,
              value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let (file, max_steps) = match &cli.command {
        Command::Run { file, max_steps, .. } | Command::TraceDump { file, max_steps } => (file, *max_steps),
        Command::Check { file } => (file, 0),
    };
    let (analyzed, name) = match prepare(file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Run { trace, .. } => {
            let trace = trace || std::env::var("COPL_TRACE").is_ok_and(|v| v == "1");
            let mut stderr = io::stderr();
            let sink: Option<&mut dyn Write> = if trace { Some(&mut stderr) } else { None };
            execute(&analyzed, &name, &mut stdout, sink, max_steps)
        }
        Command::Check { .. } => ExitCode::SUCCESS,
        Command::TraceDump { .. } => execute(&analyzed, &name, &mut io::sink(), Some(&mut stdout), max_steps),
    }
}

fn load(file: &Path) -> Result<(String, String), ExitCode> {
    let name = file.display().to_string();
    match std::fs::read_to_string(file) {
        Ok(source) => Ok((source, name)),
        Err(e) => {
            eprintln!("error[Usage]: cannot read {name}: {e}");
            Err(ExitCode::from(EXIT_USAGE))
        }
    }
}

fn report(d: &Diagnostic, file: &str, code: u8) -> ExitCode {
    eprintln!("{}", d.render(file));
    ExitCode::from(code)
}

/// Loads and analyzes `file`, printing analysis warnings.
fn prepare(file: &Path) -> Result<(Analyzed, String), ExitCode> {
    let (source, name) = load(file)?;
    let analyzed = compile(&source).map_err(|d| report(&d, &name, EXIT_COMPILE))?;
    for w in &analyzed.warnings {
        eprintln!("{}", Diagnostic::from(w).render(&name));
    }
    Ok((analyzed, name))
}

fn execute<'a>(
    analyzed: &'a Analyzed,
    name: &str,
    out: &'a mut dyn Write,
    trace: Option<&'a mut dyn Write>,
    max_steps: u64,
) -> ExitCode {
    let config = Config { max_steps, ..Config::default() };
    let mut interp = Interpreter::new(analyzed, out, trace, config);
    let result = interp.run();
    for w in interp.warnings() {
        eprintln!("{}", w.render(name));
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&Diagnostic::from(&e), name, EXIT_RUNTIME),
    }
}
