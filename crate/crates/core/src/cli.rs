//! Command-line front end.
//!
//! Reports go to standard output as JSON (or OFF for `export --format off`);
//! diagnostics go to standard error. Exit status: 0 success, 1 usage or input
//! error, 2 verification failure, 3 numerical failure.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::optimizer::{minimize_mean_width, minimize_width_isotropic_fastpath, table1, OptimConfig, OptimResult, Table1Row};
use crate::parallelohedron::{belts, classify, classify_default, measures_rep, BeltCounts, BodySpec, ParallelohedronType};
use crate::verify::{self, Suite};
use crate::zonotope::{hull_measures, QuermassReport, MAX_HULL_GENERATORS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "parallelohedra", version, about = "Measures, classifies and optimizes three-dimensional parallelohedra")]
pub struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Override the default tolerance of the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Spaces per JSON indentation level; 0 prints compact JSON.
    #[arg(long = "json-indent", global = true, default_value_t = 2)]
    pub json_indent: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume, surface area, mean width, second quermassintegral and inradius of a body.
    Measure {
        /// Body JSON file, or `-` for standard input.
        input: PathBuf,
    },
    /// Combinatorial type of a tetrahedron/β body.
    Classify {
        input: PathBuf,
        /// Weights at or below this value count as zero.
        #[arg(long)]
        eps: Option<f64>,
        /// Also report the belt lengths of the realized hull.
        #[arg(long)]
        belts: bool,
    },
    /// Randomized sweep of one family of identities or inequalities.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Where to write the counterexample on failure.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Minimal mean width at unit volume for one type.
    Optimize {
        #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=5))]
        type_number: u8,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Search tetrahedron shape only, with isotropic weights (type 5).
        #[arg(long)]
        fastpath: bool,
        /// Objective evaluations per start.
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Minimal mean widths of all five types next to their closed forms.
    Table1 {
        #[arg(long, default_value_t = 64)]
        starts: usize,
    },
    /// Write the hull mesh or the body with its measures.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Off)]
        format: ExportFormat,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Off,
    Json,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFinite
            | Error::MalformedPair(..)
            | Error::ZeroGenerator(_)
            | Error::NoGenerators
            | Error::InvalidTetrahedron(_)
            | Error::NegativeBeta(_)
            | Error::NonpositiveBudget(_)
            | Error::NotCentered(_)
            | Error::NonpositiveWidth(_)
            | Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, err) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn to_json<T: Serialize>(value: &T, indent: usize) -> String {
    let mut buf = Vec::new();
    let result = if indent == 0 {
        serde_json::to_writer(&mut buf, value)
    } else {
        let pad = vec![b' '; indent];
        let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        value.serialize(&mut ser)
    };
    result.expect("reports serialize");
    let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
    s.push('\n');
    s
}

fn read_input(path: &Path) -> std::result::Result<BodySpec, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid body JSON: {e}")))
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Outcome {
    if let Some(t) = cli.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::usage(format!("--tol must be positive, got {t}")));
        }
    }
    let indent = cli.json_indent;
    match &cli.command {
        Command::Measure { input } => measure(&read_input(input)?, indent),
        Command::Classify { input, eps, belts } => classify_cmd(&read_input(input)?, *eps, *belts, indent),
        Command::Verify { suite, trials, replay } => verify_cmd(*suite, *trials, cli.seed, cli.tol, replay.as_deref(), indent, err),
        Command::Optimize { type_number, starts, fastpath, max_iters } => {
            optimize(*type_number, *starts, *fastpath, *max_iters, cli.seed, indent)
        }
        Command::Table1 { starts } => table1_cmd(*starts, cli.seed, cli.tol, indent, err),
        Command::Export { input, format, out } => export(&read_input(input)?, *format, out.as_deref(), indent),
    }
}

#[derive(Serialize)]
struct CrossCheck {
    generic_volume_delta: Option<f64>,
    generic_surface_area_delta: Option<f64>,
    generic_mean_width_delta: Option<f64>,
    hull_volume_delta: Option<f64>,
    hull_surface_area_delta: Option<f64>,
}

#[derive(Serialize)]
struct MeasureReport {
    #[serde(flatten)]
    report: QuermassReport,
    cross_check: CrossCheck,
}

fn measure(spec: &BodySpec, indent: usize) -> Outcome {
    let body = spec.resolve()?;
    let z = &body.zonotope;
    if !z.is_full_dimensional() {
        return Err(Error::NotFullDimensional.into());
    }
    let generic = z.report();
    let (report, generic_deltas) = match &body.representation {
        Some((t, b)) => {
            let rep = measures_rep(t, b);
            let d = (
                Some(rep.volume - generic.volume),
                Some(rep.surface_area - generic.surface_area),
                Some(rep.mean_width - generic.mean_width),
            );
            (rep, d)
        }
        None => (generic, (None, None, None)),
    };
    let (hull_volume_delta, hull_surface_area_delta) = if z.generators().len() <= MAX_HULL_GENERATORS {
        let (v, s) = hull_measures(z)?;
        (Some(v - report.volume), Some(s - report.surface_area))
    } else {
        (None, None)
    };
    let out = MeasureReport {
        report,
        cross_check: CrossCheck {
            generic_volume_delta: generic_deltas.0,
            generic_surface_area_delta: generic_deltas.1,
            generic_mean_width_delta: generic_deltas.2,
            hull_volume_delta,
            hull_surface_area_delta,
        },
    };
    Ok((to_json(&out, indent), EXIT_OK))
}

#[derive(Serialize)]
struct ClassifyReport {
    #[serde(rename = "type")]
    type_number: Option<u8>,
    zeros: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    belts: Option<BeltCounts>,
}

fn classify_cmd(spec: &BodySpec, eps: Option<f64>, with_belts: bool, indent: usize) -> Outcome {
    let BodySpec::Representation { .. } = spec else {
        return Err(Failure::usage("classify needs a body given by \"tetrahedron\" and \"betas\""));
    };
    if let Some(e) = eps {
        if !(e >= 0.0) {
            return Err(Failure::usage(format!("--eps must be nonnegative, got {e}")));
        }
    }
    let body = spec.resolve()?;
    let (_, b) = body.representation.expect("representation input");
    let ty = match eps {
        Some(e) => classify(&b, e),
        None => classify_default(&b),
    };
    let zeros = b.zero_set(eps.unwrap_or(crate::parallelohedron::DEFAULT_CLASSIFY_RTOL * b.max()));
    let belts = if with_belts {
        if ty == ParallelohedronType::Degenerate {
            return Err(Error::NotFullDimensional.into());
        }
        Some(belts(&body.zonotope)?)
    } else {
        None
    };
    let out = ClassifyReport { type_number: ty.number(), zeros: zeros.iter().map(|p| p.to_string()).collect(), belts };
    Ok((to_json(&out, indent), EXIT_OK))
}

fn verify_cmd(
    suite: Suite,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    replay: Option<&Path>,
    indent: usize,
    err: &mut dyn Write,
) -> Outcome {
    let summary = verify::run(suite, trials, seed, tol);
    if summary.passed {
        return Ok((to_json(&summary, indent), EXIT_OK));
    }
    let default_path;
    let path = match replay {
        Some(p) => p,
        None => {
            let name = serde_json::to_value(suite).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            default_path = PathBuf::from(format!("replay-{name}-{seed}.json"));
            &default_path
        }
    };
    let doc = summary.counterexample.clone().unwrap_or(json!({}));
    std::fs::write(path, to_json(&doc, indent))
        .map_err(|e| Failure { code: EXIT_VERIFY, message: format!("verification failed; cannot write {}: {e}", path.display()) })?;
    let _ = writeln!(err, "verification failed; counterexample written to {}", path.display());
    Ok((to_json(&summary, indent), EXIT_VERIFY))
}

#[derive(Serialize)]
struct OptimizeReport {
    #[serde(rename = "type")]
    type_number: u8,
    method: &'static str,
    starts: usize,
    seed: u64,
    #[serde(flatten)]
    result: OptimResult,
}

fn optimize(type_number: u8, starts: usize, fastpath: bool, max_iters: Option<usize>, seed: u64, indent: usize) -> Outcome {
    let ty = ParallelohedronType::from_number(type_number).ok_or_else(|| Failure::usage("--type must be in 1..=5"))?;
    if fastpath && ty != ParallelohedronType::Type5 {
        return Err(Failure::usage("--fastpath applies to --type 5 only"));
    }
    let mut cfg = OptimConfig { starts, seed, ..OptimConfig::for_type(ty) };
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    cfg.validate()?;
    let result = if fastpath { minimize_width_isotropic_fastpath(&cfg)? } else { minimize_mean_width(&cfg)? };
    let out = OptimizeReport { type_number, method: if fastpath { "isotropic" } else { "general" }, starts, seed, result };
    Ok((to_json(&out, indent), EXIT_OK))
}

#[derive(Serialize)]
struct Table1Report {
    starts: usize,
    seed: u64,
    tolerance: f64,
    passed: bool,
    rows: Vec<Table1Row>,
}

/// Slack below the type-4 lower bound tolerated as rounding.
const BOUND_SLACK: f64 = 1e-6;

fn table1_cmd(starts: usize, seed: u64, tol: Option<f64>, indent: usize, err: &mut dyn Write) -> Outcome {
    if starts == 0 {
        return Err(Failure::usage("--starts must be at least 1"));
    }
    let tolerance = tol.unwrap_or(1e-5);
    let rows = table1(starts, seed)?;
    let passed = rows.iter().all(|r| r.passes(tolerance, BOUND_SLACK));
    if !passed {
        let _ = writeln!(err, "table mismatch beyond tolerance {tolerance:e}");
    }
    let out = Table1Report { starts, seed, tolerance, passed, rows };
    Ok((to_json(&out, indent), if passed { EXIT_OK } else { EXIT_VERIFY }))
}

fn export(spec: &BodySpec, format: ExportFormat, out: Option<&Path>, indent: usize) -> Outcome {
    let body = spec.resolve()?;
    let z = &body.zonotope;
    if !z.is_full_dimensional() {
        return Err(Error::NotFullDimensional.into());
    }
    let text = match format {
        ExportFormat::Off => z.realize_hull()?.to_off(),
        ExportFormat::Json => {
            let measures = match &body.representation {
                Some((t, b)) => measures_rep(t, b),
                None => z.report(),
            };
            to_json(&json!({ "body": spec, "generators": z.generators(), "measures": measures }), indent)
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), EXIT_OK))
        }
        None => Ok((text, EXIT_OK)),
    }
}
