use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fwdbuild::cli;
use fwdbuild::format::{Engine, EXIT_ERROR};
use fwdbuild::harness::GenParams;
use fwdbuild::hazard::RequiredMode;

#[derive(Parser)]
#[command(
    name = "fwdbuild",
    version,
    about = "Forward build engines and hazard checks"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a build spec with one engine
    Run {
        spec: PathBuf,
        #[arg(long, default_value = "rattle")]
        engine: Engine,
        /// Memory and file system carried between invocations
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value = "ever")]
        required_mode: RequiredMode,
    },
    /// Check a JSON-lines access log for hazards
    CheckTrace {
        trace: PathBuf,
        #[arg(long, default_value = "ever")]
        required_mode: RequiredMode,
    },
    /// Run every ordering of a spec's script
    Explore {
        spec: PathBuf,
        #[arg(long, default_value = "ever")]
        required_mode: RequiredMode,
    },
    /// Check the correctness statements over generated builds
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        max_build: Option<usize>,
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = match args.command {
        Command::Run {
            spec,
            engine,
            state,
            required_mode,
        } => cli::run(&spec, engine, state.as_deref(), required_mode),
        Command::CheckTrace {
            trace,
            required_mode,
        } => cli::check_trace(&trace, required_mode),
        Command::Explore {
            spec,
            required_mode,
        } => cli::explore(&spec, required_mode),
        Command::Verify {
            seed,
            cases,
            max_build,
            only,
        } => {
            let d = GenParams::default();
            let params = GenParams {
                seed: seed.unwrap_or(d.seed),
                cases: cases.unwrap_or(d.cases),
                max_build_len: max_build.unwrap_or(d.max_build_len),
                ..d
            };
            cli::verify(&params, only.as_deref())
        }
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
