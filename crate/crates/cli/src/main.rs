use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use collatz_cli::report::{self, CensusArgs, Format};
use collatz_cli::svg::Figure;
use collatz_cli::verify::{self, Level};
use collatz_cli::{exit, guard_from_env, parse_start, parse_type, CliError, CliResult};
use collatz_perm::Exec;

#[derive(Parser)]
#[command(
    name = "collatz",
    version,
    about = "Collatz permutations, types and census"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the trace, type and permutation of a start value.
    Trace { x: String },
    /// Print C(x) for one or more start values.
    Perm {
        #[arg(required = true)]
        xs: Vec<String>,
    },
    /// Congruence, witnesses, crossings and permutations of a type.
    TypeInfo { sigma: String },
    /// Excess-creating types of a given type length.
    EtList {
        m: usize,
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Count Collatz permutations by length.
    Census {
        #[arg(long, default_value_t = 1)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Checkpoint file; created if missing, resumed from if present.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Draw the line family of a type as SVG.
    Figure {
        sigma: String,
        #[arg(long = "witness")]
        witnesses: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in regression checks.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
        level: VerifyLevel,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

fn exec_for(threads: Option<usize>) -> CliResult<Exec> {
    if threads == Some(0) {
        return Err(CliError::usage("--threads must be positive"));
    }
    Ok(Exec::from_threads(threads))
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Trace { x } => {
            let guard = guard_from_env()?;
            report::cmd_trace(&parse_start(&x)?, guard)
        }
        Command::Perm { xs } => {
            let guard = guard_from_env()?;
            let xs = xs
                .iter()
                .map(|s| parse_start(s))
                .collect::<CliResult<Vec<_>>>()?;
            report::cmd_perm(&xs, guard)
        }
        Command::TypeInfo { sigma } => report::cmd_type_info(&parse_type(&sigma)?),
        Command::EtList { m, format, threads } => {
            let format = match format {
                ListFormat::Text => Format::Text,
                ListFormat::Json => Format::Json,
            };
            report::cmd_et_list(m, format, exec_for(threads)?)
        }
        Command::Census {
            min,
            max,
            format,
            out,
            resume,
            threads,
        } => report::cmd_census(&CensusArgs {
            min,
            max,
            format: match format {
                TableFormat::Csv => Format::Csv,
                TableFormat::Json => Format::Json,
            },
            out,
            resume,
            threads,
        }),
        Command::Figure {
            sigma,
            witnesses,
            out,
        } => {
            let svg = Figure::new(&parse_type(&sigma)?, &witnesses)?.render();
            match out {
                None => Ok(svg),
                Some(path) => {
                    fs::write(&path, svg).map_err(|e| {
                        CliError::new(exit::OUTPUT, format!("{}: {e}", path.display()))
                    })?;
                    Ok(format!("wrote {}\n", path.display()))
                }
            }
        }
        Command::Verify { level } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let report = verify::run(level, Exec::Parallel);
            let text = report.render();
            if report.all_passed() {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError::new(exit::FAILED_CHECK, "verification failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(exit::OUTPUT as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("collatz: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
