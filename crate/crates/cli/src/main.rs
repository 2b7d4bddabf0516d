use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bifurq_core::curves::{geometric_grid, local_curve, nonlocal_curve, profile_table};
use bifurq_core::params::TOLERANCE_ENV;
use bifurq_core::{verify, AsymptoticModel, CurveTable, Error, LocalParams, LocalProblem, NonlocalProblem, ProblemParams, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "bifurq", version, about = "L2 bifurcation curves of a nonlocal Kirchhoff-type logistic problem")]
struct Cli {
    /// Relative tolerance; overrides BIFURQ_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic constants and the admissibility threshold.
    Constants {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long)]
        json: bool,
    },
    /// gamma(xi) of the local problem against its expansion.
    LocalCurve {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// lambda(alpha) of the nonlocal problem against its expansion.
    NonlocalCurve {
        #[command(flatten)]
        pq: PqArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Solution profile w(x) of the local problem.
    Profile {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long)]
        gamma: f64,
        /// Samples on [0, 1/2]; the output mirrors them onto [1/2, 1].
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Also write an SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the verification suite; exit status 1 if any check fails.
    Verify {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct PqArgs {
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    /// Decimal or fraction, e.g. 1/3.
    #[arg(long, default_value = "1/3", value_parser = parse_fraction)]
    q: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LevelArg {
    Fast,
    Full,
}

impl From<LevelArg> for verify::Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Fast => verify::Level::Fast,
            LevelArg::Full => verify::Level::Full,
        }
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0.0 {
                return Err("zero denominator".into());
            }
            Ok(parse(n)? / d)
        }
        None => parse(s),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::Domain(_) | Error::BelowThreshold { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn failure(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn tolerances(flag: Option<f64>) -> Result<Tolerances, Failure> {
    match flag {
        Some(v) => Ok(Tolerances::with_rel_tol(v)?),
        None => Tolerances::from_env().map_err(|e| failure(EXIT_USAGE, format!("{e} (from {TOLERANCE_ENV})"))),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| failure(EXIT_FAILURE, format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(table: &CurveTable, out: Option<&Path>, as_json: bool) -> Result<(), Failure> {
    let text = if as_json {
        let mut s = serde_json::to_string_pretty(&table.to_json()?).map_err(Error::from)?;
        s.push('\n');
        s
    } else {
        table.to_csv()
    };
    emit(&text, out)?;
    match table.failures() {
        0 => Ok(()),
        n => Err(failure(EXIT_FAILURE, format!("{n} of {} rows failed", table.rows.len()))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = tolerances(cli.tol)?;
    match cli.command {
        Command::Constants { pq, json } => {
            let params = ProblemParams::new(pq.p, pq.q)?;
            let model = AsymptoticModel::new(params)?;
            let t = NonlocalProblem::new(params, tol).xi_threshold()?;
            if json {
                let v = json!({
                    "p": pq.p, "q": pq.q, "c1": model.c1, "k": model.k, "b": model.b,
                    "lambda_exponent": model.lambda_exponent, "xi0": t.xi0, "alpha0": t.alpha0, "h0": t.h0,
                });
                println!("{}", serde_json::to_string_pretty(&v).map_err(Error::from)?);
            } else {
                println!("p               = {}", pq.p);
                println!("q               = {}", pq.q);
                println!("C1              = {:.12}", model.c1);
                println!("k               = {:.12}", model.k);
                println!("B               = {:.12}", model.b);
                println!("lambda_exponent = {:.12}", model.lambda_exponent);
                println!("xi0             = {:.12}", t.xi0);
                println!("alpha0          = {:.12}", t.alpha0);
            }
            Ok(())
        }
        Command::LocalCurve { p, sweep } => {
            let problem = LocalProblem::new(LocalParams::new(p)?, tol);
            let c1 = bifurq_core::compute_c1(p)?;
            let grid = geometric_grid(sweep.min, sweep.max, sweep.n)?;
            let table = local_curve(&problem, c1, &grid)?;
            emit_table(&table, sweep.out.as_deref(), sweep.json)
        }
        Command::NonlocalCurve { pq, sweep } => {
            let params = ProblemParams::new(pq.p, pq.q)?;
            let problem = NonlocalProblem::new(params, tol);
            let model = AsymptoticModel::new(params)?;
            let grid = geometric_grid(sweep.min, sweep.max, sweep.n)?;
            let table = nonlocal_curve(&problem, &model, &grid).map_err(|e| match e {
                Error::BelowThreshold { value, threshold, .. } => failure(
                    EXIT_USAGE,
                    format!("alpha = {value} is not above alpha0 = {threshold}; choose --min > {threshold}"),
                ),
                e => e.into(),
            })?;
            emit_table(&table, sweep.out.as_deref(), sweep.json)
        }
        Command::Profile { p, gamma, n, out, json, svg } => {
            let problem = LocalProblem::new(LocalParams::new(p)?, tol);
            let table = profile_table(&problem, gamma, n)?;
            if let Some(path) = svg {
                let doc = table.to_svg("x", "w")?;
                fs::write(&path, doc).map_err(|e| failure(EXIT_FAILURE, format!("writing {}: {e}", path.display())))?;
            }
            emit_table(&table, out.as_deref(), json)
        }
        Command::Verify { pq, level, json } => {
            let params = ProblemParams::new(pq.p, pq.q)?;
            let report = verify::run(params, tol, level.into())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
            } else {
                println!("{report}");
            }
            if report.overall {
                Ok(())
            } else {
                let failed: Vec<String> = report.criteria().into_iter().filter(|(_, ok)| !ok).map(|(c, _)| c).collect();
                Err(failure(EXIT_FAILURE, format!("failed criteria: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
