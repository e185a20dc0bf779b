use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use telechan_core::protocol::{parse_protocol, sample_params, serialize_protocol, Params, Protocol};
use telechan_core::scenarios::{self, ScenarioDef};
use telechan_core::tol;
use telechan_cli::{output, report};
use telechan_core::verify::{ledger, verify_protocol, VerificationReport};

const EXIT_INPUT: u8 = 1;
const EXIT_MISMATCH: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "telechan", version, about = "Simulate and audit teleportation protocols over multipartite channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the builtin scenarios
    List,
    /// Run one scenario or protocol file and report every leaf
    Run {
        /// Builtin name or path to a protocol JSON file
        target: String,
        /// A single parameter point, e.g. '[0.6, 0.8]' or '[[0.6,0],[0,0.8]]'
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare computed success probabilities with the stated claims
    Verify {
        /// Builtin name or path to a protocol JSON file
        target: Option<String>,
        /// Verify every builtin
        #[arg(long, conflicts_with = "target")]
        all: bool,
        /// Exit with status 3 when a claim mismatches
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print a builtin as a protocol document
    Show { name: String },
}

#[derive(Args, Debug)]
struct Common {
    /// Random parameter points in addition to the family's fixed points
    #[arg(long, default_value_t = 8)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest accepted |computed − claimed|
    #[arg(long, default_value_t = tol::CLAIM)]
    tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

fn load(target: &str) -> Result<(Protocol, Option<ScenarioDef>), Failure> {
    if let Ok(def) = scenarios::builtin(target) {
        return Ok((def.protocol.clone(), Some(def)));
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Failure(EXIT_INPUT, format!("unknown scenario `{target}` (not a builtin and no such file)")));
    }
    let text = fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let p = parse_protocol(&text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    Ok((p, None))
}

fn parse_params(p: &Protocol, text: &str) -> Result<Params, Failure> {
    let amps: Vec<Amplitude> = serde_json::from_str(text).map_err(|e| Failure(EXIT_INPUT, format!("--params: {e}")))?;
    let params = Params(
        amps.into_iter()
            .map(|a| match a {
                Amplitude::Real(x) => Complex64::new(x, 0.0),
                Amplitude::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect(),
    );
    p.input.family.check(&params).map_err(|e| Failure(EXIT_INPUT, format!("--params: {e}")))?;
    Ok(params)
}

fn points(p: &Protocol, explicit: Option<&str>, common: &Common) -> Result<Vec<Params>, Failure> {
    match (explicit, &p.input.params) {
        (Some(text), _) => Ok(vec![parse_params(p, text)?]),
        (None, Some(params)) => Ok(vec![params.clone()]),
        (None, None) => Ok(sample_params(p.input.family, common.samples, common.seed)),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn invariant_failure(reports: &[VerificationReport]) -> Option<Failure> {
    let bad: Vec<&str> = reports.iter().filter(|r| !r.invariants.ok()).map(|r| r.scenario.as_str()).collect();
    (!bad.is_empty()).then(|| Failure(EXIT_INVARIANT, format!("invariant violations in {}", bad.join(", "))))
}

fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn list() -> String {
    let rows: Vec<Vec<String>> = scenarios::all()
        .into_iter()
        .map(|def| {
            let p = &def.protocol;
            let claim = p.claim.as_ref().map_or_else(|| "-".to_string(), |c| format!("{} ({})", short(c.probability), c.citation));
            vec![p.name.clone(), p.input.family.name().to_string(), p.resource.name.clone(), def.description.to_string(), claim]
        })
        .collect();
    output::grid(&["name", "input", "channel", "description", "claim"], &rows)
}

fn run(target: &str, params: Option<&str>, common: &Common) -> Result<(), Failure> {
    let (p, def) = load(target)?;
    let points = points(&p, params, common)?;
    let r = verify_protocol(&p, &points, common.tolerance)?;
    let text = match common.format {
        Format::Table => output::run_table(&p, &r, def.as_ref()),
        Format::Json => output::to_json(&report::run_report(&p, &r)),
        Format::Csv => output::leaves_csv(std::slice::from_ref(&r))?,
    };
    emit(&text, common.out.as_deref())?;
    invariant_failure(std::slice::from_ref(&r)).map_or(Ok(()), Err)
}

fn verify(target: Option<&str>, all: bool, strict: bool, common: &Common) -> Result<(), Failure> {
    let protocols: Vec<Protocol> = match (target, all) {
        (Some(t), false) => vec![load(t)?.0],
        (None, true) => scenarios::all().into_iter().map(|d| d.protocol).collect(),
        _ => return Err(Failure(EXIT_INPUT, "verify needs a scenario name, a protocol file, or --all".into())),
    };
    let reports = report::verify_each(&protocols, common.samples, common.seed, common.tolerance)?;
    let rows = ledger(&reports);
    let text = match common.format {
        Format::Table => output::ledger_table(&rows, &reports),
        Format::Json => output::to_json(&report::verify_document(&protocols, &reports, common.samples, common.seed, common.tolerance)),
        Format::Csv => output::ledger_csv(&rows)?,
    };
    emit(&text, common.out.as_deref())?;
    if let Some(f) = invariant_failure(&reports) {
        return Err(f);
    }
    let mismatched: Vec<&str> = rows.iter().filter(|r| r.status == "MISMATCH").map(|r| r.scenario.as_str()).collect();
    if strict && !mismatched.is_empty() {
        return Err(Failure(EXIT_MISMATCH, format!("claim mismatch in {}", mismatched.join(", "))));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let result = match &cli.command {
        Command::List => {
            print!("{}", list());
            Ok(())
        }
        Command::Run { target, params, common } => run(target, params.as_deref(), common),
        Command::Verify { target, all, strict, common } => verify(target.as_deref(), *all, *strict, common),
        Command::Show { name } => scenarios::builtin(name).map(|d| print!("{}", serialize_protocol(&d.protocol))).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
