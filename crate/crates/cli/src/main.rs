//! `hamfactor`: Hamiltonian structures of linear systems given in real Jordan form.

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use hamfactor::assign::{parse_assignments, AssignError};
use hamfactor::classifier::conserved_report;
use hamfactor::exact::Assignment;
use hamfactor::flow::{run_flow, FlowConfig};
use hamfactor::integrability::DEFAULT_SEED;
use hamfactor::jordan::{JordanSpec, SpecError};
use hamfactor::report::{Report, ReportError};

const MAX_DIM_VAR: &str = "HAMFACTOR_MAX_DIM";
const DEFAULT_MAX_DIM: usize = 64;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
    #[error("transcript failed: {0}")]
    Transcript(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Usage(_) => 4,
            CliError::Transcript(_) => 5,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Json { .. } => CliError::Parse(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AssignError> for CliError {
    fn from(e: AssignError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Common {
    /// Jordan spec file (JSON).
    spec: PathBuf,
    /// Parameter value, `name=rational`; short names like `d14` are accepted.
    #[arg(long = "assign", value_name = "NAME=VALUE")]
    assign: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Parser)]
#[command(name = "hamfactor", version, about = "Hamiltonian, Poisson and Dirac structures for u' = Bu")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The family of symmetric D with DB skew-symmetric.
    SolveD {
        #[command(flatten)]
        common: Common,
        /// Also solve by brute force and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Structure verdict and conserved quantities for one member of the family.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Same report as `classify`.
    Casimirs {
        #[command(flatten)]
        common: Common,
    },
    /// Matrices commuting with B.
    Commutant {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        oracle: bool,
    },
    /// A complete commuting system of fields and integrals, with its transcript.
    Integrable {
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the transcript of a saved report.
    Verify {
        report: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// RK4 trajectory as CSV: t, H and each Casimir.
    DemoFlow {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
    /// Every section, oracles included.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn max_dim() -> Result<usize, CliError> {
    match std::env::var(MAX_DIM_VAR) {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_DIM_VAR} must be a positive integer, got `{v}`"))),
    }
}

fn load_spec(path: &Path) -> Result<JordanSpec, CliError> {
    let spec = JordanSpec::from_json(&read(path)?)?;
    spec.ensure_max_dim(max_dim()?)?;
    Ok(spec)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{newline}").and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(CliError::Usage(format!("cannot write output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn emit_report(r: &Report, output: &Output) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => r.to_json(),
        Format::Text => r.to_text(),
    };
    emit(&text, output.out.as_deref())
}

/// Resolves `--assign` against the spec's family.
fn assignment(report: &mut Report, items: &[String]) -> Result<Assignment, CliError> {
    let params = report.family().params().to_vec();
    Ok(parse_assignments(items, &params)?)
}

/// The report is written either way; a failing transcript only changes the exit code.
fn transcript_gate(r: &Report) -> Result<(), CliError> {
    let sys = r.integrable.as_ref().ok_or(ReportError::NoSystem)?;
    if sys.transcript.passed() {
        Ok(())
    } else {
        Err(CliError::Transcript(sys.transcript.summary()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SolveD { common, oracle } => {
            let mut r = Report::new(load_spec(&common.spec)?);
            r.add_family(oracle);
            emit_report(&r, &common.output)
        }
        Command::Classify { common } | Command::Casimirs { common } => {
            let mut r = Report::new(load_spec(&common.spec)?);
            let a = assignment(&mut r, &common.assign)?;
            r.add_classification(&a)?;
            emit_report(&r, &common.output)
        }
        Command::Commutant { common, oracle } => {
            let mut r = Report::new(load_spec(&common.spec)?);
            r.add_commutant(oracle);
            emit_report(&r, &common.output)
        }
        Command::Integrable { common } => {
            let mut r = Report::new(load_spec(&common.spec)?);
            r.add_integrable(common.seed);
            emit_report(&r, &common.output)?;
            transcript_gate(&r)
        }
        Command::Verify { report, output } => {
            let text = read(&report)?;
            // serde_json messages already end in "at line L column C"
            let mut r = Report::from_json(&text).map_err(|e| CliError::Parse(format!("malformed report: {e}")))?;
            r.check_version()?;
            r.spec.ensure_max_dim(max_dim()?)?;
            let sys = r.integrable.as_mut().ok_or(ReportError::NoSystem)?;
            if sys.b != r.spec.realize() {
                return Err(CliError::Validation("saved system does not belong to the saved spec".into()));
            }
            sys.reverify();
            emit_report(&r, &output)?;
            transcript_gate(&r)
        }
        Command::DemoFlow { common, t_max, steps } => {
            if steps == 0 || !t_max.is_finite() || t_max <= 0.0 {
                return Err(CliError::Usage("need --steps >= 1 and a finite --t-max > 0".into()));
            }
            let mut r = Report::new(load_spec(&common.spec)?);
            let a = assignment(&mut r, &common.assign)?;
            let d = r.family().general.evaluate_or_zero(&a).map_err(ReportError::from)?;
            let b = r.spec.realize();
            let casimirs: Vec<_> = conserved_report(&b, &d)
                .map_err(ReportError::from)?
                .casimirs
                .into_iter()
                .map(|c| c.c)
                .collect();
            let cfg = FlowConfig { t_max, steps, seed: common.seed };
            emit(&run_flow(&b, &d, &casimirs, &cfg).to_csv(), common.output.out.as_deref())
        }
        Command::Report { common } => {
            let mut r = Report::new(load_spec(&common.spec)?);
            let a = assignment(&mut r, &common.assign)?;
            let r = Report::full(r.spec, &a, common.seed)?;
            emit_report(&r, &common.output)?;
            transcript_gate(&r)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
