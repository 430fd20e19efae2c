//! The `weakot` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 protocol validation failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::attacks::cheat_report;
use crate::catalog::{build_cks, build_trivial, simulate_combined, WCFPrimitive};
use crate::error::{Error, Result};
use crate::oracle::cks_alice_oracle;
use crate::protocol::{load_protocol, ProtocolSpec};
use crate::tradeoff::{curve, tune_lambda};
use crate::verify::{run_all, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SPEC: i32 = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "weakot", version, about = "Cheating bounds for quantum weak oblivious transfer")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cheat report for a built-in protocol (cks, trivial) or a protocol JSON file.
    Analyze { protocol: String },
    /// Tradeoff curve of the coin-flip mixture.
    Curve {
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        dyadic_bits: u32,
    },
    /// Tuned mixture under δ-robust completeness.
    Robustness {
        #[arg(long)]
        delta_min: f64,
        #[arg(long)]
        delta_max: f64,
        /// Number of intervals; the sweep has steps + 1 rows.
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        oracle_grid: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Monte Carlo honest runs of the mixture.
    Simulate {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Run the invariant suite.
    Verify,
}

/// Everything a run produced, for callers that do not want process I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) | Error::Completeness(_) => EXIT_SPEC,
        _ => EXIT_USAGE,
    }
}

/// Formats `x` with 12 significant digits, shortest form.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let v = round12(x);
    if v == 0.0 {
        "0".into()
    } else {
        v.to_string()
    }
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let v: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let v = round_value(serde_json::to_value(x)?);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_num(x),
            _ => n.to_string(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_csv<T: Serialize>(columns: &[&str], rows: &[T]) -> Result<String> {
    let mut out = columns.join(",");
    out.push('\n');
    for r in rows {
        let v = serde_json::to_value(r)?;
        let cells: Vec<String> = columns.iter().map(|c| csv_cell(&v[*c])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn render<T: Serialize>(format: Format, columns: &[&str], rows: &[T], single: bool) -> Result<String> {
    match format {
        Format::Csv => to_csv(columns, rows),
        Format::Json if single => to_json(&rows[0]),
        Format::Json => to_json(&rows),
    }
}

/// Built-in names win over files of the same name; use `./cks` for a file.
pub fn resolve_protocol(name: &str) -> Result<ProtocolSpec> {
    match name {
        "cks" => Ok(build_cks()),
        "trivial" => Ok(build_trivial()),
        path => {
            if !std::path::Path::new(path).exists() {
                return Err(Error::Format(format!("unknown protocol or missing file: {path}")));
            }
            load_protocol(path)
        }
    }
}

#[derive(Serialize)]
struct RobustnessRow {
    delta: f64,
    p3: f64,
    lambda_star: f64,
    max_cheat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_p3: Option<f64>,
}

#[derive(Serialize)]
struct CurveRow {
    lambda: f64,
    epsilon: f64,
    p_bob: f64,
    p_alice: f64,
    combined: f64,
}

/// Returns the output text and the exit code.
fn execute(command: &Command, cfg: &RunConfig) -> Result<(String, i32)> {
    match command {
        Command::Analyze { protocol } => {
            let spec = resolve_protocol(protocol)?;
            let rep = cheat_report(&spec)?;
            let code = if rep.theorem1_holds() { EXIT_OK } else { EXIT_VERIFY };
            let cols = [
                "spec_name", "delta", "f", "alice_bound", "bob_bound", "bob_sim_s0", "bob_sim_s1", "theorem1_lhs",
            ];
            Ok((render(cfg.format.unwrap_or(Format::Json), &cols, &[rep], true)?, code))
        }
        Command::Curve { epsilon, points, dyadic_bits } => {
            let rows: Vec<CurveRow> = curve(*epsilon, *points, *dyadic_bits)?
                .into_iter()
                .map(|p| CurveRow {
                    lambda: p.lambda,
                    epsilon: p.epsilon,
                    p_bob: p.b_bound,
                    p_alice: p.a_bound,
                    combined: p.combined,
                })
                .collect();
            let cols = ["lambda", "epsilon", "p_bob", "p_alice", "combined"];
            Ok((render(cfg.format.unwrap_or(Format::Csv), &cols, &rows, false)?, EXIT_OK))
        }
        Command::Robustness { delta_min, delta_max, steps, oracle_grid, epsilon } => {
            let (lo, hi) = (*delta_min, *delta_max);
            if !(0.0 <= lo && lo <= hi && hi <= 0.5) {
                return Err(Error::Range(format!("need 0 <= delta-min <= delta-max <= 1/2, got {lo}, {hi}")));
            }
            if *steps == 0 && lo != hi {
                return Err(Error::Range("steps must be >= 1 unless delta-min = delta-max".into()));
            }
            let mut rows = Vec::with_capacity(steps + 1);
            for i in 0..=*steps {
                let delta = if *steps == 0 { lo } else { lo + (hi - lo) * i as f64 / *steps as f64 };
                let p = tune_lambda(delta, *epsilon)?;
                let oracle_p3 = match oracle_grid {
                    Some(g) => Some(cks_alice_oracle(delta, *g)?.value),
                    None => None,
                };
                rows.push(RobustnessRow {
                    delta: p.delta,
                    p3: p.p3,
                    lambda_star: p.lambda_star,
                    max_cheat: p.max_cheat,
                    oracle_p3,
                });
            }
            let mut cols = vec!["delta", "p3", "lambda_star", "max_cheat"];
            if oracle_grid.is_some() {
                cols.push("oracle_p3");
            }
            Ok((render(cfg.format.unwrap_or(Format::Csv), &cols, &rows, false)?, EXIT_OK))
        }
        Command::Simulate { lambda, trials, epsilon } => {
            let stats = simulate_combined(&WCFPrimitive::new(*lambda, *epsilon, 52)?, *trials, cfg.seed)?;
            let cols = ["lambda", "trials", "trivial_runs", "cks_runs", "correct", "completeness_rate"];
            Ok((render(cfg.format.unwrap_or(Format::Json), &cols, &[stats], true)?, EXIT_OK))
        }
        Command::Verify => render_verify(&run_all(cfg.seed), cfg.format),
    }
}

/// Text and exit code for a verify report: 0 iff every suite passed.
pub fn render_verify(rep: &VerifyReport, format: Option<Format>) -> Result<(String, i32)> {
    let code = if rep.all_passed() { EXIT_OK } else { EXIT_VERIFY };
    let text = match format {
        Some(Format::Json) => {
            let suites: Vec<Value> = rep
                .suites
                .iter()
                .map(|s| serde_json::json!({"name": s.name, "passed": s.passed, "detail": s.detail}))
                .collect();
            to_json(&serde_json::json!({"seed": rep.seed, "passed": rep.all_passed(), "suites": suites}))?
        }
        Some(Format::Csv) => {
            let mut out = String::from("suite,passed,detail\n");
            for s in &rep.suites {
                let detail = csv_cell(&Value::String(s.detail.clone()));
                out.push_str(&format!("{},{},{detail}\n", s.name, s.passed));
            }
            out
        }
        None => rep.render(),
    };
    Ok((text, code))
}

/// Parses `args` (program name first) and runs the command without touching
/// the process streams.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let (text, code) = match execute(&cli.command, &cli.cfg) {
        Ok(r) => r,
        Err(e) => {
            return CliOutput { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") };
        }
    };
    let mut stderr = String::new();
    if code == EXIT_VERIFY {
        if let Command::Verify = cli.command {
            stderr = format!("error: verification failed: {}\n", failing_suites(&text));
        }
    }
    match &cli.cfg.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => CliOutput { code, stdout: String::new(), stderr },
            Err(e) => CliOutput { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
        },
        None => CliOutput { code, stdout: text, stderr },
    }
}

fn failing_suites(report: &str) -> String {
    let names: Vec<&str> = report
        .lines()
        .filter_map(|l| l.strip_prefix("FAIL "))
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    if names.is_empty() {
        "see report".into()
    } else {
        names.join(", ")
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = run(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(2.0 + 1e-15), "2");
    }

    #[test]
    fn curve_rows() {
        let out = run(["weakot", "curve", "--epsilon", "0", "--points", "3"]);
        assert_eq!(out.code, 0);
        assert_eq!(
            out.stdout,
            "lambda,epsilon,p_bob,p_alice,combined\n0,0,0.75,0.5,2\n0.5,0,0.625,0.75,2\n1,0,0.5,1,2\n"
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["weakot", "curve", "--points", "1"]).code, 2);
        assert_eq!(run(["weakot", "frobnicate"]).code, 2);
        assert_eq!(run(["weakot", "curve", "--points", "3", "--bogus"]).code, 2);
        assert_eq!(run(["weakot", "analyze", "nope-not-here.json"]).code, 2);
        assert_eq!(
            run(["weakot", "robustness", "--delta-min", "0.2", "--delta-max", "0.1", "--steps", "2"]).code,
            2
        );
    }

    #[test]
    fn json_keys_sorted() {
        let out = run(["weakot", "analyze", "cks"]);
        assert_eq!(out.code, 0);
        let keys: Vec<usize> = ["alice_bound", "bob_bound", "bob_sim_s0", "delta", "f", "spec_name", "theorem1_lhs"]
            .iter()
            .map(|k| out.stdout.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
