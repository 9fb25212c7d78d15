//! Command-line front end. [`execute`] parses arguments, runs one
//! subcommand and returns the exit code with the rendered output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical non-convergence or an instance the numerics must refuse.

mod table;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use table::{sci, Table};
pub use verify::{Check, Suite, BETA_RANGE_HIGH, BETA_RANGE_LOW, DELTA_PUBLISHED};

use crate::bounds::{comparison_table, BoundInput, BoundReport, DEFAULT_REL_TOL};
use crate::coefficients::{
    coefficient_records, nu_recursive, nu_table, NuMethod, NuTable, ENUMERATION_CAP,
};
use crate::exact::Rational;
use crate::numeric::{run_simulation, NumericError, Status, ValidationReport};
use crate::series::{
    beta_sweep, emit_phi_curve, estimate_beta_for, lhs_integral_series, DEFAULT_K_CUT,
    PRINTED_ORDER_FOUR,
};
use crate::trees::enumerate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "magnus-bound",
    version,
    about = "Magnus expansion tree coefficients and truncation bounds"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Recursion,
    Enumeration,
    Simplified,
    /// Recursion with an equality column against enumeration.
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact tree coefficients nu_1..nu_n.
    Coeffs {
        n_max: usize,
        #[arg(value_enum, default_value_t = MethodArg::Recursion)]
        method: MethodArg,
    },
    /// Left-ordered trees with n leaves.
    Trees {
        n: usize,
        #[arg(long)]
        with_coefficients: bool,
    },
    /// Generating-function series, phi curves and the beta sweep.
    Series(SeriesArgs),
    /// Closed-form per-term and truncation bounds.
    Bounds {
        h_max: f64,
        t: f64,
        /// Truncation order N.
        order: usize,
        /// Include the tail-sum bound.
        #[arg(long)]
        tight: bool,
        /// Append the comparison with the pi x^n bound.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = crate::bounds::DEFAULT_PREFACTOR)]
        prefactor: f64,
    },
    /// Cross-check suites.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Numerical validation run described by a config file.
    Simulate { config: PathBuf },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["phi", "gen_coeffs", "beta_sweep"])))]
pub struct SeriesArgs {
    /// phi(n, k) curve for this n.
    #[arg(long)]
    pub phi: Option<usize>,
    /// Coefficients of the integral series through this order.
    #[arg(long)]
    pub gen_coeffs: Option<usize>,
    /// Fitted beta, theta, delta, k_max for each n.
    #[arg(long)]
    pub beta_sweep: bool,
    /// beta for the phi curve; fitted from nu_n when absent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 200)]
    pub k_max: usize,
    #[arg(long, default_value_t = DEFAULT_K_CUT)]
    pub k_cut: usize,
    #[arg(long, default_value_t = 10)]
    pub from: usize,
    #[arg(long, default_value_t = 24)]
    pub to: usize,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

impl From<NumericError> for Failure {
    fn from(e: NumericError) -> Self {
        let code = match e {
            NumericError::NonConvergence { .. }
            | NumericError::BranchCut { .. }
            | NumericError::Singular => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered body plus the exit code it implies.
struct Rendered {
    body: String,
    code: i32,
}

fn ok(body: String) -> Result<Rendered, Failure> {
    Ok(Rendered {
        body,
        code: EXIT_OK,
    })
}

fn json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn render_table(table: &Table, format: Format, json: impl FnOnce() -> serde_json::Value) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Pretty => table.to_pretty(),
        Format::Json => json_string(&json()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(r) => match &cli.output {
            Some(path) => match std::fs::write(path, &r.body) {
                Ok(()) => Outcome {
                    code: r.code,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: format!("error: cannot write {}: {e}\n", path.display()),
                },
            },
            None => Outcome {
                code: r.code,
                stdout: r.body,
                stderr: String::new(),
            },
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Rendered, Failure> {
    let f = cli.format;
    match &cli.command {
        Command::Coeffs { n_max, method } => coeffs(*n_max, *method, f),
        Command::Trees {
            n,
            with_coefficients,
        } => trees(*n, *with_coefficients, f),
        Command::Series(args) => series(args, f),
        Command::Bounds {
            h_max,
            t,
            order,
            tight,
            compare,
            prefactor,
        } => bounds(*h_max, *t, *order, *tight, *compare, *prefactor, f),
        Command::Verify { suite } => verify_cmd(*suite, f),
        Command::Simulate { config } => simulate(config, f),
    }
}

fn coeffs(n_max: usize, method: MethodArg, format: Format) -> Result<Rendered, Failure> {
    if n_max == 0 {
        return Err(usage("n_max must be at least 1"));
    }
    let (table, equal): (NuTable, Option<Vec<bool>>) = match method {
        MethodArg::Recursion => (nu_table(NuMethod::Recursion, n_max).map_err(usage)?, None),
        MethodArg::Simplified => (nu_table(NuMethod::Simplified, n_max).map_err(usage)?, None),
        MethodArg::Enumeration => (nu_table(NuMethod::Enumeration, n_max).map_err(usage)?, None),
        MethodArg::All => {
            if n_max > ENUMERATION_CAP {
                return Err(usage(format!(
                    "method all enumerates trees and is capped at n = {ENUMERATION_CAP}"
                )));
            }
            let rec = nu_table(NuMethod::Recursion, n_max).map_err(usage)?;
            let en = nu_table(NuMethod::Enumeration, n_max).map_err(usage)?;
            let eq = (1..=n_max).map(|n| rec.get(n) == en.get(n)).collect();
            (rec, Some(eq))
        }
    };
    let method_name = match method {
        MethodArg::All => "all".to_string(),
        _ => table.method().to_string(),
    };
    let mut headers = vec!["n", "exact", "decimal", "method"];
    if equal.is_some() {
        headers.push("equal");
    }
    let mut t = Table::new(headers);
    for (n, v) in table.iter() {
        let mut row = vec![
            n.to_string(),
            v.to_string(),
            v.to_scientific(8),
            method_name.clone(),
        ];
        if let Some(eq) = &equal {
            row.push(eq[n - 1].to_string());
        }
        t.push(row);
    }
    let body = render_table(&t, format, || {
        json!({
            "method": method_name,
            "rows": table.iter().map(|(n, v)| {
                let mut o = json!({"n": n, "exact": v.to_string(), "decimal": v.to_f64()});
                if let Some(eq) = &equal { o["equal"] = json!(eq[n - 1]); }
                o
            }).collect::<Vec<_>>(),
        })
    });
    let all_equal = equal.is_none_or(|e| e.iter().all(|b| *b));
    Ok(Rendered {
        body,
        code: if all_equal { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn trees(n: usize, with_coefficients: bool, format: Format) -> Result<Rendered, Failure> {
    if n == 0 || n > ENUMERATION_CAP {
        return Err(usage(format!(
            "n must be 1 to {ENUMERATION_CAP} (enumeration cap)"
        )));
    }
    let mut headers = vec!["tree"];
    if with_coefficients {
        headers.extend(["alpha", "mu", "abs_alpha_mu"]);
    }
    headers.push("commutator");
    let mut t = Table::new(headers);
    let mut json_rows = Vec::new();
    if with_coefficients {
        let records = coefficient_records(n).map_err(usage)?;
        for r in &records {
            let expr = r.tree.to_commutator_expression();
            t.push(vec![
                r.tree.serialize(),
                r.alpha.to_string(),
                r.mu.to_string(),
                r.product.to_string(),
                expr.clone(),
            ]);
            json_rows.push(json!({
                "tree": r.tree.serialize(), "alpha": r.alpha.to_string(), "mu": r.mu.to_string(),
                "abs_alpha_mu": r.product.to_string(), "commutator": expr,
            }));
        }
    } else {
        for tree in enumerate(n).map_err(usage)?.iter() {
            let expr = tree.to_commutator_expression();
            t.push(vec![tree.serialize(), expr.clone()]);
            json_rows.push(json!({"tree": tree.serialize(), "commutator": expr}));
        }
    }
    ok(render_table(
        &t,
        format,
        || json!({"leaves": n, "trees": json_rows}),
    ))
}

fn series(args: &SeriesArgs, format: Format) -> Result<Rendered, Failure> {
    if let Some(order) = args.gen_coeffs {
        let s = lhs_integral_series(order).map_err(usage)?;
        let printed: Rational = PRINTED_ORDER_FOUR.parse().expect("valid literal");
        let mut t = Table::new(["power", "coefficient", "decimal", "note"]);
        t.push(vec![
            "log".into(),
            s.log_coefficient.to_string(),
            sci(s.log_coefficient.to_f64()),
            "coefficient of log(f)".into(),
        ]);
        for k in 1..=order {
            let c = s.series.coeff(k).map_err(usage)?;
            let note = if k == 4 && *c != printed {
                format!("exact value; the published series prints {PRINTED_ORDER_FOUR}")
            } else {
                String::new()
            };
            t.push(vec![k.to_string(), c.to_string(), sci(c.to_f64()), note]);
        }
        let rows = t.rows.clone();
        return ok(render_table(&t, format, || {
            json!({
                "log_coefficient": s.log_coefficient.to_string(),
                "coefficients": rows.iter().skip(1).map(|r| json!({"power": r[0].parse::<usize>().unwrap_or(0), "exact": r[1], "note": r[3]})).collect::<Vec<_>>(),
            })
        }));
    }
    if args.beta_sweep {
        if args.from < 1 || args.to < args.from {
            return Err(usage("--from must be at least 1 and not above --to"));
        }
        let table = nu_recursive(args.to).map_err(usage)?;
        let sweep = beta_sweep(&table, args.from..=args.to, args.k_cut).map_err(usage)?;
        let mut t = Table::new(["n", "beta", "theta", "delta", "k_max"]);
        for r in &sweep {
            t.push(vec![
                r.n.to_string(),
                sci(r.beta),
                sci(r.theta),
                sci(r.delta),
                sci(r.k_max),
            ]);
        }
        return ok(render_table(&t, format, || json!(sweep)));
    }
    let n = args.phi.expect("clap enforces one mode");
    if n < 2 {
        return Err(usage("--phi needs n >= 2"));
    }
    let beta = match args.beta {
        Some(b) => b,
        None => {
            let table = nu_recursive(n).map_err(usage)?;
            estimate_beta_for(&table, n, args.k_cut).map_err(usage)?
        }
    };
    let curve = emit_phi_curve(n, beta, args.k_min..=args.k_max).map_err(usage)?;
    let mut t = Table::new(["k", "phi"]);
    for (k, v) in &curve {
        t.push(vec![k.to_string(), sci(*v)]);
    }
    ok(render_table(
        &t,
        format,
        || json!({"n": n, "beta": beta, "curve": curve.iter().map(|(k, v)| json!({"k": k, "phi": v})).collect::<Vec<_>>()}),
    ))
}

fn bounds(
    h_max: f64,
    t: f64,
    order: usize,
    tight: bool,
    compare: bool,
    prefactor: f64,
    format: Format,
) -> Result<Rendered, Failure> {
    if !(prefactor.is_finite() && prefactor > 0.0) {
        return Err(usage("--prefactor must be positive"));
    }
    let input = BoundInput::new(h_max, t, order).map_err(usage)?;
    let mut report = BoundReport::evaluate_with(input, prefactor, DEFAULT_REL_TOL);
    if !tight {
        report = report.without_tight();
    }
    let comparison = if compare {
        Some(comparison_table(order, h_max, t).map_err(usage)?)
    } else {
        None
    };
    let body = match format {
        Format::Json => json_string(&json!({"report": report, "comparison": comparison})),
        Format::Csv | Format::Pretty => {
            let mut kv = Table::new(["key", "value"]);
            kv.push(vec!["h_max".into(), sci(report.input.h_max)]);
            kv.push(vec!["t".into(), sci(report.input.t)]);
            kv.push(vec!["order".into(), order.to_string()]);
            kv.push(vec!["prefactor".into(), sci(report.prefactor)]);
            kv.push(vec!["x".into(), sci(report.x)]);
            for p in &report.per_term {
                kv.push(vec![format!("term_{}", p.n), sci(p.bound)]);
            }
            kv.push(vec![
                "truncation_simple".into(),
                report.truncation_simple.to_string(),
            ]);
            if let Some(v) = report.truncation_tight {
                kv.push(vec!["truncation_tight".into(), v.to_string()]);
            }
            kv.push(vec!["converged".into(), report.converged.to_string()]);
            let mut body = if format == Format::Csv {
                kv.to_csv()
            } else {
                kv.to_pretty()
            };
            if let Some(rows) = &comparison {
                let mut c = Table::new(["n", "bound_new", "bound_prior", "ratio"]);
                for r in rows {
                    c.push(vec![
                        r.n.to_string(),
                        sci(r.bound_new),
                        sci(r.bound_prior),
                        sci(r.ratio),
                    ]);
                }
                body.push('\n');
                body.push_str(&if format == Format::Csv {
                    c.to_csv()
                } else {
                    c.to_pretty()
                });
            }
            body
        }
    };
    ok(body)
}

fn verify_cmd(suite: Suite, format: Format) -> Result<Rendered, Failure> {
    let checks = verify::run(suite);
    let mut t = Table::new(["suite", "check", "result", "detail"]);
    for c in &checks {
        let result = if c.passed { "PASS" } else { "FAIL" };
        t.push(vec![
            c.suite.into(),
            c.name.clone(),
            result.into(),
            c.detail.clone(),
        ]);
    }
    let passed = checks.iter().all(|c| c.passed);
    let body = render_table(&t, format, || json!({"passed": passed, "checks": checks}));
    Ok(Rendered {
        body,
        code: if passed { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn validation_table(report: &ValidationReport) -> Table {
    let mut t = Table::new([
        "kind", "order", "measured", "bound", "slack", "margin", "pass",
    ]);
    for r in &report.per_term {
        t.push(vec![
            "term".into(),
            r.n.to_string(),
            sci(r.measured),
            sci(r.bound),
            sci(r.slack),
            sci(r.margin),
            r.pass.to_string(),
        ]);
    }
    for r in &report.truncation {
        t.push(vec![
            "truncation".into(),
            r.order.to_string(),
            sci(r.measured),
            r.bound.to_string(),
            sci(r.slack),
            r.margin.map_or_else(|| "n/a".into(), sci),
            r.pass.map_or_else(|| "n/a".into(), |p| p.to_string()),
        ]);
    }
    t
}

fn simulate(path: &PathBuf, format: Format) -> Result<Rendered, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let (config, report) = run_simulation(&text)?;
    let code = match report.status {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_FAILURE,
        Status::Rejected => EXIT_NUMERIC,
    };
    let body = match format {
        Format::Json => json_string(&json!({"config": config, "report": report})),
        Format::Csv => validation_table(&report).to_csv(),
        Format::Pretty => {
            let mut s = format!(
                "dimension {}  t {}  h_max {}  x {}  status {:?}\n",
                report.dimension,
                sci(report.t),
                sci(report.h_max),
                sci(report.x),
                report.status
            );
            if let Some(reason) = &report.rejection {
                s.push_str(&format!("rejected: {reason}\n"));
            }
            s.push('\n');
            s.push_str(&validation_table(&report).to_pretty());
            s
        }
    };
    Ok(Rendered { body, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        execute(std::iter::once("magnus-bound").chain(args.iter().copied()))
    }

    #[test]
    fn coeffs_first_row() {
        let o = run(&["--format", "csv", "coeffs", "1"]);
        assert_eq!(o.code, 0);
        assert_eq!(
            o.stdout,
            "n,exact,decimal,method\n1,1,1.00000000×10⁰,recursion\n"
        );
    }

    #[test]
    fn coeffs_all_equal() {
        let o = run(&["--format", "csv", "coeffs", "10", "all"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.lines().skip(1).all(|l| l.ends_with(",true")));
        let capped = run(&["coeffs", "13", "enumeration"]);
        assert_eq!(capped.code, EXIT_USAGE);
        assert!(capped.stderr.contains("12"));
    }

    #[test]
    fn trees_with_coefficients() {
        let o = run(&["--format", "json", "trees", "3", "--with-coefficients"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        let alphas: Vec<&str> = v["trees"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["alpha"].as_str().unwrap())
            .collect();
        assert_eq!(alphas.len(), 2);
        assert!(alphas.contains(&"1/4") && alphas.contains(&"1/12"));
        let one = run(&["--format", "csv", "trees", "1", "--with-coefficients"]);
        assert_eq!(
            one.stdout,
            "tree,alpha,mu,abs_alpha_mu,commutator\nL,1,1,1,H(t1)\n"
        );
    }

    #[test]
    fn trees_sum_matches_nu5() {
        let o = run(&["--format", "json", "trees", "5", "--with-coefficients"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        let sum: Rational = v["trees"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                r["abs_alpha_mu"]
                    .as_str()
                    .unwrap()
                    .parse::<Rational>()
                    .unwrap()
            })
            .sum();
        assert_eq!(sum.to_string(), "479/86400");
    }

    #[test]
    fn bounds_outputs() {
        let o = run(&["--format", "json", "bounds", "1.0", "0.5434", "3"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert!((v["report"]["x"].as_f64().unwrap() - 0.5).abs() < 1e-4);
        assert!((v["report"]["truncation_simple"].as_f64().unwrap() - 0.03125).abs() < 1e-4);
        let zero = run(&["--format", "csv", "bounds", "0", "1", "3", "--tight"]);
        assert!(zero.stdout.contains("term_3,0.00000000e0\n"));
        assert!(zero.stdout.contains("truncation_tight,0.00000000e0\n"));
        let div = run(&["--format", "json", "bounds", "2", "1", "3"]);
        assert_eq!(div.code, 0);
        assert!(div.stdout.contains("\"truncation_simple\": \"diverged\""));
        assert_eq!(run(&["bounds", "x", "1", "3"]).code, EXIT_USAGE);
        assert_eq!(run(&["bounds", "1", "1", "0"]).code, EXIT_USAGE);
    }

    #[test]
    fn series_modes() {
        let o = run(&["--format", "csv", "series", "--gen-coeffs", "5"]);
        assert!(o.stdout.contains("\n4,11/12960,"));
        assert!(o.stdout.contains("11/12969"));
        assert!(o.stdout.contains("\n5,-29/170100,"));
        let phi = run(&["--format", "csv", "series", "--phi", "24", "--k-max", "50"]);
        assert_eq!(phi.stdout.lines().count(), 51);
        assert_eq!(run(&["series"]).code, EXIT_USAGE);
        assert_eq!(
            run(&["series", "--phi", "3", "--beta", "2.0"]).code,
            EXIT_USAGE
        );
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(&["coeffs", "3", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(run(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn deterministic_output() {
        let a = run(&[
            "--format",
            "csv",
            "series",
            "--beta-sweep",
            "--from",
            "10",
            "--to",
            "12",
        ]);
        let b = run(&[
            "--format",
            "csv",
            "series",
            "--beta-sweep",
            "--from",
            "10",
            "--to",
            "12",
        ]);
        assert_eq!(a, b);
        assert!(a.stdout.starts_with("n,beta,theta,delta,k_max\n10,"));
    }
}
