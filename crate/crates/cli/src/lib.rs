//! Command-line front end: single-matrix reports, model instantiation,
//! parameter sweeps and the invariant self-test.
//!
//! Exit codes: `0` success, `1` any other failure, `2` when `{H, H†}` is not
//! scalar, `3` when the input or the command line cannot be parsed.

pub mod analysis;
pub mod input;
pub mod report;
pub mod selftest;
pub mod sweep;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nh_bypass::models::{build_model, model_spec, MODELS};
use nh_bypass::Error;

use analysis::Settings;
use input::parse_number;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_SCALAR_D: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot parse {what}: {msg}")]
    Parse { what: String, msg: String },
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn parse(what: &str, msg: impl Into<String>) -> Self {
        CliError::Parse {
            what: what.to_string(),
            msg: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NotScalarD { .. }) => EXIT_NOT_SCALAR_D,
            CliError::Parse { .. }
            | CliError::Core(
                Error::NotSquare { .. } | Error::WrongDimension { .. } | Error::NonFinite,
            ) => EXIT_PARSE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "nh-bypass",
    version,
    about = "Spectral analysis of scalar-D non-Hermitian Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a matrix file (`-` reads standard input).
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Instantiate and analyze a model. Parameters go as `--name value`.
    Model {
        name: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate a model over a grid. Fixed parameters go as `--name value`.
    Sweep {
        name: String,
        #[arg(long = "grid", value_name = "PARAM=START:STOP:COUNT", required = true)]
        grid: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the invariant suites; `NH_BYPASS_SEED` overrides the seed.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List models and their parameters.
    Models,
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1e-9)]
    ep_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    oracle_tol: f64,
    /// Add closed-form comparisons to model reports and sweeps.
    #[arg(long)]
    expected: bool,
    /// Read angle parameters in degrees.
    #[arg(long)]
    degrees: bool,
}

impl Opts {
    fn settings(&self) -> Settings {
        Settings {
            ep_tol: self.ep_tol,
            oracle_tol: self.oracle_tol,
            expected: self.expected,
            ..Settings::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Flags the parser owns; every other `--name` after `model`/`sweep` is a
/// model parameter.
const OWN_FLAGS: &[&str] = &[
    "out",
    "format",
    "ep-tol",
    "oracle-tol",
    "expected",
    "degrees",
    "grid",
    "help",
    "version",
];

/// Separates model parameters from the rest of the command line.
fn split_params(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    if args.len() < 3 || !matches!(args[1].as_str(), "model" | "sweep") {
        return Ok((args, Vec::new()));
    }
    let mut rest = args[..2].to_vec();
    let mut params = Vec::new();
    let mut it = args[2..].iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--").filter(|b| !b.is_empty()) else {
            rest.push(a.clone());
            continue;
        };
        let (name, inline) = match body.split_once('=') {
            Some((n, v)) => (n, Some(v.to_string())),
            None => (body, None),
        };
        if OWN_FLAGS.contains(&name) {
            rest.push(a.clone());
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it
                .next()
                .cloned()
                .ok_or_else(|| CliError::parse("parameter", format!("--{name} needs a value")))?,
        };
        params.push((name.replace('-', "_"), value));
    }
    Ok((rest, params))
}

/// Validates parameter names against the model and converts angles.
fn resolve_params(
    model: &str,
    raw: &[(String, String)],
    degrees: bool,
) -> Result<BTreeMap<String, f64>, CliError> {
    let spec = model_spec(model)?;
    let mut out = BTreeMap::new();
    for (name, value) in raw {
        let ps = spec.params.iter().find(|p| p.name == name).ok_or_else(|| {
            CliError::parse(
                "parameter",
                format!("model `{model}` has no parameter `{name}`"),
            )
        })?;
        let mut v = parse_number(value)?;
        if degrees && ps.angle {
            v = v.to_radians();
        }
        out.insert(name.clone(), v);
    }
    Ok(out)
}

fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn report_bytes(report: &report::AnalysisReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut buf = Vec::new();
            report::write_csv(report, &mut buf).map_err(|e| CliError::Failed(e.to_string()))?;
            Ok(buf)
        }
    }
}

fn finish_report(
    report: &report::AnalysisReport,
    opts: &Opts,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    emit(
        opts.out.as_deref(),
        &report_bytes(report, opts.format.unwrap_or(Format::Json))?,
        stdout,
    )?;
    if !report.oracle.passed {
        return Err(CliError::Failed(format!(
            "framework and oracle eigenvalues differ by {:e} (tolerance {:e})",
            report.oracle.eigenvalue_deviation, report.oracle.tolerance
        )));
    }
    Ok(())
}

fn dispatch(
    cli: Cli,
    params: &[(String, String)],
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { file, opts } => {
            let text = if file.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&file)
                    .map_err(|e| CliError::parse("matrix", format!("{}: {e}", file.display())))?
            };
            let m = input::parse_matrix(&text)?;
            let report = analysis::analyze_matrix(&m, &opts.settings())?;
            finish_report(&report, &opts, stdout)?;
        }
        Command::Model { name, opts } => {
            let p = resolve_params(&name, params, opts.degrees)?;
            let model = build_model(&name, &p)?;
            let report = analysis::analyze_model(&model, &opts.settings())?;
            finish_report(&report, &opts, stdout)?;
        }
        Command::Sweep { name, grid, opts } => {
            let fixed = resolve_params(&name, params, opts.degrees)?;
            let spec = model_spec(&name)?;
            let mut axes = Vec::new();
            for g in &grid {
                let mut axis = sweep::Axis::parse(g)?;
                let ps = spec
                    .params
                    .iter()
                    .find(|p| p.name == axis.name)
                    .ok_or_else(|| {
                        CliError::parse(
                            "grid",
                            format!("model `{name}` has no parameter `{}`", axis.name),
                        )
                    })?;
                if opts.degrees && ps.angle {
                    axis.start = axis.start.to_radians();
                    axis.stop = axis.stop.to_radians();
                }
                axes.push(axis);
            }
            let sweep_spec = sweep::SweepSpec {
                model: name,
                fixed,
                axes,
                settings: opts.settings(),
            };
            let table = sweep::tabulate(&sweep_spec, &sweep::run_sweep(&sweep_spec));
            let bytes = match opts.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    sweep::write_csv(&table, &mut buf)?;
                    buf
                }
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&table)
                        .map_err(|e| CliError::Failed(e.to_string()))?;
                    s.push('\n');
                    s.into_bytes()
                }
            };
            emit(opts.out.as_deref(), &bytes, stdout)?;
        }
        Command::Selftest { out } => {
            let seed = selftest::seed_from_env()?;
            let (text, ok) = selftest::selftest(seed);
            emit(out.as_deref(), text.as_bytes(), stdout)?;
            return Ok(if ok { EXIT_OK } else { EXIT_FAILURE });
        }
        Command::Models => {
            let mut text = String::new();
            for m in MODELS {
                let ps: Vec<String> = m
                    .params
                    .iter()
                    .map(|p| {
                        let unit = if p.angle { " (angle)" } else { "" };
                        match p.default {
                            Some(d) => format!("--{} {d}{unit}", p.name.replace('_', "-")),
                            None => format!("--{} <required>{unit}", p.name.replace('_', "-")),
                        }
                    })
                    .collect();
                text.push_str(&format!(
                    "{}\n  {}\n  {}\n",
                    m.name,
                    m.summary,
                    ps.join(" ")
                ));
            }
            emit(None, text.as_bytes(), stdout)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let fail = |e: CliError, stderr: &mut dyn Write| {
        let _ = writeln!(stderr, "error: {e}");
        e.exit_code()
    };
    let (rest, params) = match split_params(args) {
        Ok(x) => x,
        Err(e) => return fail(e, stderr),
    };
    let cli = match Cli::try_parse_from(&rest) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_PARSE
                }
            };
        }
    };
    if !params.is_empty() && !matches!(cli.command, Command::Model { .. } | Command::Sweep { .. }) {
        return fail(
            CliError::parse(
                "arguments",
                "model parameters given to a command without a model",
            ),
            stderr,
        );
    }
    match dispatch(cli, &params, stdout) {
        Ok(code) => code,
        Err(e) => fail(e, stderr),
    }
}
