//! Command implementations behind the `tetrastab` binary.

pub mod config;

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use tetrastab::bifurcation::expand;
use tetrastab::checks::{run_suite, Check};
use tetrastab::convergence::loglog_slope;
use tetrastab::models::ProfileModel;
use tetrastab::report::{csv, markdown, round_sig, sci, table_cells, table_mismatches, TableRow, TABLE_HEADERS};
use tetrastab::space::TetraSpace;
use tetrastab::stability::{assemble_hessian, classify, eigen_sweep};

use crate::config::{Amplitudes, Cli, Command, Format, RunConfig, DEFAULT_EPSILON, DEFAULT_RANGE, MIN_LMAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_TABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] tetrastab::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) => EXIT_VERIFY,
        }
    }
}

/// Rendered report plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub exit: i32,
    /// Extra diagnostics for stderr.
    pub notes: Vec<String>,
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(round_sig(n.as_f64().unwrap_or(f64::NAN))).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).unwrap_or(Value::Null);
    let mut s = serde_json::to_string_pretty(&round_json(value)).unwrap_or_default();
    s.push('\n');
    s
}

fn render(format: Format, json: Value, headers: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Json => to_json(&json),
        Format::Csv => csv(headers, rows),
        Format::Markdown => markdown(headers, rows),
    }
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

pub fn cmd_table1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let space = TetraSpace::new(cfg.lmax)?;
    let reports = cfg.models.iter().map(|m| classify(&space, m)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<TableRow> = reports.iter().map(TableRow::from_report).collect();
    let mismatches = table_mismatches(&rows);
    let cells: Vec<Vec<String>> = rows.iter().map(table_cells).collect();
    let json = json!({
        "lmax": cfg.lmax,
        "matches_expected": mismatches.is_empty(),
        "rows": rows,
        "reports": reports,
        "mismatches": mismatches,
    });
    let body = render(cfg.format.unwrap_or(Format::Markdown), json, &TABLE_HEADERS, &cells);
    let exit = if mismatches.is_empty() { EXIT_OK } else { EXIT_TABLE };
    Ok(Outcome { body, exit, notes: mismatches })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = run_suite(cfg.lmax, &cfg.models);
    let passed = checks.iter().all(|c| c.passed);
    let headers = ["check", "model", "passed", "value", "threshold", "error"];
    let rows: Vec<Vec<String>> = checks.iter().map(check_cells).collect();
    let json = json!({ "lmax": cfg.lmax, "passed": passed, "checks": checks });
    let notes = checks.iter().filter(|c| !c.passed).map(describe_failure).collect();
    let body = render(cfg.format.unwrap_or(Format::Json), json, &headers, &rows);
    Ok(Outcome { body, exit: if passed { EXIT_OK } else { EXIT_VERIFY }, notes })
}

fn check_cells(c: &Check) -> Vec<String> {
    vec![
        c.name.clone(),
        c.model.map(|m| m.to_string()).unwrap_or_default(),
        c.passed.to_string(),
        opt_sci(c.value),
        opt_sci(c.threshold),
        c.error.clone().unwrap_or_default(),
    ]
}

fn describe_failure(c: &Check) -> String {
    let model = c.model.map(|m| format!(" [{m}]")).unwrap_or_default();
    match (&c.error, c.value) {
        (Some(e), _) => format!("FAIL {}{model}: {e}", c.name),
        (None, Some(v)) => format!("FAIL {}{model}: value {}", c.name, sci(v)),
        (None, None) => format!("FAIL {}{model}", c.name),
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.single_model("sweep")?;
    let eps = match &cfg.amplitudes {
        Some(a) => a.values(),
        None => config::parse_range(DEFAULT_RANGE)?,
    };
    let space = TetraSpace::new(cfg.lmax)?;
    let b = expand(space.sphere(), &model)?;
    let points = eigen_sweep(&space, &b, &eps)?;
    let headers = ["epsilon", "eta_eps", "eps2_eta2", "abs_diff"];
    let rows: Vec<Vec<String>> =
        points.iter().map(|p| vec![sci(p.epsilon), sci(p.eta_eps), sci(p.eps2_eta2), sci(p.abs_diff)]).collect();
    let slope = (points.len() >= 2).then(|| {
        let x: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
        let y: Vec<f64> = points.iter().map(|p| p.abs_diff).collect();
        loglog_slope(&x, &y)
    });
    let json = json!({ "model": model.kind(), "lmax": cfg.lmax, "slope": slope, "points": points });
    Ok(Outcome { body: render(cfg.format.unwrap_or(Format::Csv), json, &headers, &rows), exit: EXIT_OK, notes: vec![] })
}

#[derive(Serialize)]
struct ExpandRow {
    model: tetrastab::models::ModelKind,
    lambda_star: f64,
    gamma_prime: f64,
    lambda2: f64,
    psi2_norm: f64,
    mu2: f64,
    eta2: f64,
}

pub fn cmd_expand(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let space = TetraSpace::new(cfg.lmax)?;
    let rows = cfg
        .models
        .iter()
        .map(|m| {
            let r = classify(&space, m)?;
            Ok(ExpandRow {
                model: r.model,
                lambda_star: r.lambda_star,
                gamma_prime: r.gamma_prime,
                lambda2: r.lambda2,
                psi2_norm: r.psi2_norm,
                mu2: r.mu2,
                eta2: r.eta2,
            })
        })
        .collect::<Result<Vec<_>, tetrastab::Error>>()?;
    let headers = ["model", "lambda_star", "gamma_prime", "lambda2", "psi2_norm", "mu2", "eta2"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c = vec![r.model.to_string()];
            c.extend([r.lambda_star, r.gamma_prime, r.lambda2, r.psi2_norm, r.mu2, r.eta2].map(sci));
            c
        })
        .collect();
    let json = json!({ "lmax": cfg.lmax, "models": rows });
    Ok(Outcome {
        body: render(cfg.format.unwrap_or(Format::Json), json, &headers, &cells),
        exit: EXIT_OK,
        notes: vec![],
    })
}

pub fn cmd_hessian(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model: ProfileModel = cfg.single_model("hessian")?;
    let epsilon = match &cfg.amplitudes {
        None => DEFAULT_EPSILON,
        Some(Amplitudes::Single(e)) => *e,
        Some(Amplitudes::Range(_)) => return Err(CliError::Usage("hessian takes a single --epsilon".into())),
    };
    let space = TetraSpace::new(cfg.lmax)?;
    let b = expand(space.sphere(), &model)?;
    let h = assemble_hessian(space.sphere(), &b, epsilon, space.basis())?;
    let spec = h.spectrum(&space.basis().coordinates(space.y_star()))?;
    let headers = ["index", "eigenvalue", "critical"];
    let rows: Vec<Vec<String>> = spec
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| vec![k.to_string(), sci(v), (v == spec.critical).to_string()])
        .collect();
    let json = json!({
        "model": model.kind(),
        "lmax": cfg.lmax,
        "epsilon": epsilon,
        "dimension": h.dim(),
        "asymmetry": h.asymmetry(),
        "spectrum": spec,
    });
    Ok(Outcome { body: render(cfg.format.unwrap_or(Format::Csv), json, &headers, &rows), exit: EXIT_OK, notes: vec![] })
}

/// Runs the parsed command; returns the outcome and the resolved output path.
pub fn execute(cli: &Cli) -> Result<(Outcome, Option<std::path::PathBuf>), CliError> {
    let args = cli.command.args();
    let min_lmax = if matches!(cli.command, Command::Verify(_)) { 0 } else { MIN_LMAX };
    let cfg = RunConfig::resolve(args, min_lmax)?;
    let outcome = match &cli.command {
        Command::Verify(_) => cmd_verify(&cfg),
        Command::Table1(_) => cmd_table1(&cfg),
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::Expand(_) => cmd_expand(&cfg),
        Command::Hessian(_) => cmd_hessian(&cfg),
    }?;
    Ok((outcome, cfg.out))
}

/// Parses `argv`, runs the command, writes output, and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (outcome, out) = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    for n in &outcome.notes {
        let _ = writeln!(stderr, "{n}");
    }
    let written = match out {
        Some(path) => std::fs::write(&path, &outcome.body),
        None => stdout.write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {}", CliError::Io(e));
        return EXIT_VERIFY;
    }
    outcome.exit
}
