mod commands;
mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lgb_core::{ErrorClass, Exec};
use serde_json::json;

use problem::Problem;
use report::{Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Core(#[from] lgb_core::Error),
}

impl CliError {
    fn class(&self) -> ErrorClass {
        match self {
            CliError::Input(_) | CliError::Io(..) => ErrorClass::Input,
            CliError::Core(e) => e.class(),
        }
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Finding => 1,
        ErrorClass::Input => 2,
        ErrorClass::Internal => 3,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Finding => "finding",
        ErrorClass::Input => "input",
        ErrorClass::Internal => "internal",
    }
}

#[derive(Parser, Debug)]
#[command(name = "lgb", version, about = "Exact Milnor rings and orbifolded Landau-Ginzburg B-models")]
struct Cli {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timing out of the report, making output byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Evaluate every batch loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Input {
    /// Problem file with `W:`, `V:`, `vars:`, `group:`, `map:` lines.
    file: Option<PathBuf>,
    /// Polynomial W, overriding the file.
    #[arg(long)]
    poly: Option<String>,
    /// Target polynomial V; repeat for several.
    #[arg(long = "target")]
    targets: Vec<String>,
    /// Variable order, comma separated.
    #[arg(long)]
    vars: Option<String>,
    /// Group generators as phase vectors, e.g. "1/2,1/2;0,1/3".
    #[arg(long)]
    group: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weights, admissibility, atomic decomposition and symmetry groups.
    Analyze(Input),
    /// Milnor ring basis, Hessian, pairing and Frobenius axioms.
    Milnor(Input),
    /// Maximal and SL symmetry groups; validation of a given group.
    Symmetry(Input),
    /// Orbifolded B-model with its axiom verification.
    Bmodel(Input),
    /// Search for a linear change of variables taking V to W.
    Equiv(Input),
    /// Verify a Milnor ring isomorphism and extend it over the group.
    ExtendIso {
        #[command(flatten)]
        input: Input,
        /// Map file with lines `monomial -> scalar * monomial`.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Solve for diagonal scaling isomorphisms between every pair.
        #[arg(long)]
        solve: bool,
    },
    /// Run the release criteria.
    Selftest {
        /// Family parameters n for the three-polynomial pipeline.
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        n: Vec<u32>,
    },
}

fn load(input: &Input, map: Option<&PathBuf>) -> Result<Problem, CliError> {
    let mut p = match &input.file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            Problem::parse(&text, path.parent().unwrap_or(Path::new(".")))?
        }
        None => Problem::default(),
    };
    if let Some(w) = &input.poly {
        if p.polys.is_empty() {
            p.polys.push(w.clone());
        } else {
            p.polys[0] = w.clone();
        }
    }
    if !input.targets.is_empty() {
        p.polys.truncate(1);
        p.polys.extend(input.targets.iter().cloned());
    }
    if p.polys.is_empty() {
        return Err(CliError::Input("no polynomial: give a problem file or --poly".into()));
    }
    if let Some(v) = &input.vars {
        p.vars = Some(v.split(',').map(|s| s.trim().to_string()).collect());
    }
    if let Some(g) = &input.group {
        p.group = Some(g.clone());
    }
    if let Some(m) = map {
        p.map = Some(m.clone());
    }
    Ok(p)
}

fn run(cli: &Cli, exec: Exec) -> Result<Report, CliError> {
    match &cli.command {
        Command::Analyze(i) => commands::analyze(&load(i, None)?),
        Command::Milnor(i) => commands::milnor(&load(i, None)?, exec),
        Command::Symmetry(i) => commands::symmetry(&load(i, None)?),
        Command::Bmodel(i) => commands::bmodel(&load(i, None)?, exec),
        Command::Equiv(i) => commands::equiv(&load(i, None)?),
        Command::ExtendIso { input, map, solve } => {
            let p = load(input, map.as_ref())?;
            // a map named in the file only counts when --solve is absent
            let p = if *solve { Problem { map: None, ..p } } else { p };
            commands::extend(&p, *solve, exec)
        }
        Command::Selftest { n } => Ok(commands::selftest(n, exec, !cli.no_timing)),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze(_) => "analyze",
        Command::Milnor(_) => "milnor",
        Command::Symmetry(_) => "symmetry",
        Command::Bmodel(_) => "bmodel",
        Command::Equiv(_) => "equiv",
        Command::ExtendIso { .. } => "extend-iso",
        Command::Selftest { .. } => "selftest",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli, exec)));
    let elapsed = (!cli.no_timing).then(|| start.elapsed().as_secs_f64() * 1000.0);
    let result = match outcome {
        Ok(r) => r,
        Err(_) => Err(CliError::Core(lgb_core::Error::InvariantViolation("internal panic".into()))),
    };
    match result {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json(elapsed)).unwrap());
            } else {
                for line in &report.text {
                    println!("{line}");
                }
                if let Some(ms) = elapsed {
                    println!("time: {ms:.1} ms");
                }
            }
            ExitCode::from(if report.status == Status::Finding { 1 } else { 0 })
        }
        Err(e) => {
            let class = e.class();
            if cli.json {
                let v = json!({
                    "schema": report::SCHEMA,
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": command_name(&cli.command),
                    "status": "error",
                    "error": {"class": class_name(class), "message": e.to_string()},
                });
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            } else {
                eprintln!("error ({}): {e}", class_name(class));
            }
            ExitCode::from(exit_code(class))
        }
    }
}
