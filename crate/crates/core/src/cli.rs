//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 domain error, 3 numerical
//! failure.
//!
//! For `--which u` the flag `--b` is the `b` of `U(a, b+1, z)`: the function
//! evaluated is `U(a, b+1, z)`, not `U(a, b, z)`.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::coefficients::{coefficient_set, Which, MAX_TERMS};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvalOptions, ExpansionResult, ValueStatus};
use crate::oracle::{oracle_m, oracle_u, OracleValue, DEFAULT_DIGITS};
use crate::scaling::{scale, Parameters, DEFAULT_RHO};
use crate::verify::{error_table, recurrence_residual, wronskian_residual, ResidualReport, TableId, TableSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "kummer",
    version,
    about = "Kummer functions M(a,b,z) and U(a,b+1,z) by uniform asymptotic expansions",
    after_help = "With --which u, --b is the b of U(a, b+1, z)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate M(a,b,z) or U(a,b+1,z), or their scaled forms.
    Eval(EvalArgs),
    /// Print the expansion coefficients.
    Coeffs(PointArgs),
    /// Print recurrence and Wronskian residuals at a point.
    Check(CheckArgs),
    /// Reproduce a residual table.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichArg {
    M,
    U,
}

impl From<WhichArg> for Which {
    fn from(w: WhichArg) -> Which {
        match w {
            WhichArg::M => Which::M,
            WhichArg::U => Which::U,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long, value_enum, default_value = "m")]
    which: WhichArg,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// For U this is the b of U(a, b+1, z).
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Highest correction index N (0..=8).
    #[arg(long, env = "KUMMER_TERMS", default_value_t = crate::coefficients::DEFAULT_TERMS)]
    terms: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Return M̃ or Ũ instead of M or U.
    #[arg(long)]
    scaled: bool,
    /// Saddle-point bound for the domain_ok diagnostic.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    /// Also compute the reference value and the relative error.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    precision_digits: u32,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    #[arg(long, env = "KUMMER_TERMS", default_value_t = crate::coefficients::DEFAULT_TERMS)]
    terms: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value = "table1")]
    id: String,
    #[arg(long)]
    z: Option<f64>,
    /// Comma-separated row values of a.
    #[arg(long, value_delimiter = ',')]
    a_list: Option<Vec<f64>>,
    /// Comma-separated values of b.
    #[arg(long, value_delimiter = ',')]
    b_list: Option<Vec<f64>>,
    /// Comma-separated term counts N.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::Domain(_) => EXIT_DOMAIN,
        Error::Numerical(_) | Error::Internal(_) => EXIT_NUMERICAL,
    }
}

fn check_terms(n: usize) -> Result<()> {
    if n > MAX_TERMS {
        return Err(Error::usage(format!("--terms must lie in 0..={MAX_TERMS}, got {n}")));
    }
    Ok(())
}

fn params(which: Which, a: f64, b: f64, z: f64) -> Result<Parameters> {
    match which {
        Which::M => Parameters::new(a, b, z),
        Which::U => Parameters::for_u(a, b, z),
    }
}

fn no_csv(f: Format, cmd: &str) -> Result<()> {
    if f == Format::Csv {
        return Err(Error::usage(format!("{cmd} supports --format text or json")));
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// writes its output. Returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "kummer: {e}");
            exit_code(&e)
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Eval(args) => run_eval(&args),
        Command::Coeffs(args) => run_coeffs(&args),
        Command::Check(args) => run_check(&args),
        Command::Table(args) => run_table(args),
    }
}

/// `|x/ref - 1|` from the logs and signs.
fn relative_error(x: &ExpansionResult, r: &OracleValue) -> f64 {
    if x.status == ValueStatus::Normal && r.value != 0.0 {
        return (x.value / r.value - 1.0).abs();
    }
    let q = (x.log_magnitude - r.log_magnitude).exp_m1();
    if x.sign == r.sign {
        q.abs()
    } else {
        2.0 + q
    }
}

fn result_json(r: &ExpansionResult) -> Value {
    serde_json::to_value(r).expect("results serialize")
}

fn run_eval(args: &EvalArgs) -> Result<String> {
    let pt = &args.point;
    check_terms(pt.terms)?;
    no_csv(pt.format, "eval")?;
    if !(args.rho > 0.0 && args.rho < 1.0) {
        return Err(Error::usage(format!("--rho must lie in (0, 1), got {}", args.rho)));
    }
    let which: Which = pt.which.into();
    let p = params(which, pt.a, pt.b, pt.z)?;
    let opts = EvalOptions {
        terms: pt.terms,
        rho: args.rho,
    };
    let res = evaluate(which, args.scaled, &p, &opts)?;
    let oracle = if args.oracle {
        let unscaled = if args.scaled { evaluate(which, false, &p, &opts)? } else { res };
        let reference = match which {
            Which::M => oracle_m(&p, args.precision_digits)?,
            Which::U => oracle_u(&Parameters::new(pt.a, pt.b + 1.0, pt.z)?, args.precision_digits)?,
        };
        Some((reference, relative_error(&unscaled, &reference)))
    } else {
        None
    };
    Ok(match pt.format {
        Format::Json => {
            let mut v = result_json(&res);
            if let Some((reference, rel)) = oracle {
                v["oracle"] = serde_json::to_value(reference).expect("oracle values serialize");
                v["oracle_relative_error"] = json!(rel);
            }
            format!("{v}\n")
        }
        _ => {
            let name = match (which, args.scaled) {
                (Which::M, false) => "M(a,b,z)",
                (Which::M, true) => "M~(a,b,z)",
                (Which::U, false) => "U(a,b+1,z)",
                (Which::U, true) => "U~(a,b+1,z)",
            };
            let status = match res.status {
                ValueStatus::Normal => "normal",
                ValueStatus::Underflow => "underflow",
                ValueStatus::Overflow => "overflow",
            };
            let mut s = format!(
                "{name} a={} b={} z={}\nvalue            {:e}\nlog_magnitude    {}\nsign             {}\nterms_used       {}\nlast_term_ratio  {:e}\ndomain_ok        {}\nstatus           {status}\n",
                pt.a, pt.b, pt.z, res.value, res.log_magnitude, res.sign, res.terms_used, res.last_term_ratio, res.domain_ok
            );
            if let Some((reference, rel)) = oracle {
                s.push_str(&format!(
                    "oracle_value     {:e}\noracle_log      {}\nrelative_error   {rel:e}\n",
                    reference.value, reference.log_magnitude
                ));
            }
            s
        }
    })
}

fn run_coeffs(args: &PointArgs) -> Result<String> {
    check_terms(args.terms)?;
    no_csv(args.format, "coeffs")?;
    let which: Which = args.which.into();
    let p = params(which, args.a, args.b, args.z)?;
    let set = coefficient_set(which, &scale(&p), args.terms)?;
    Ok(match args.format {
        Format::Json => format!("{}\n", set.to_json()),
        _ => {
            let mut s = format!("{which} coefficients  mu={}  beta={}  tau={}\n", set.mu, set.beta, set.tau);
            s.push_str(&format!("{:>3}  {:>24}  {:>24}\n", "n", "f", "f_tilde"));
            for (n, (f, ft)) in set.f.iter().zip(&set.f_tilde).enumerate() {
                s.push_str(&format!("{n:>3}  {f:>24e}  {ft:>24e}\n"));
            }
            s
        }
    })
}

fn run_check(args: &CheckArgs) -> Result<String> {
    check_terms(args.terms)?;
    no_csv(args.format, "check")?;
    let p = Parameters::new(args.a, args.b, args.z)?;
    let mut reports: Vec<ResidualReport> = vec![recurrence_residual(Which::M, &p, args.terms)?];
    // The U recurrence reaches down to Ũ(a, b-1).
    if args.b > 1.0 {
        reports.push(recurrence_residual(Which::U, &p, args.terms)?);
    }
    reports.push(wronskian_residual(&p, args.terms)?);
    Ok(match args.format {
        Format::Json => format!("{}\n", serde_json::to_string(&reports).expect("reports serialize")),
        _ => {
            let mut s = format!("a={} b={} z={} N={}\n", args.a, args.b, args.z, args.terms);
            for r in &reports {
                let v = serde_json::to_value(r.kind).expect("kinds serialize");
                s.push_str(&format!("{:<14} {:.3e}\n", v.as_str().unwrap_or_default(), r.residual));
            }
            s
        }
    })
}

fn run_table(args: TableArgs) -> Result<String> {
    let id: TableId = args.id.parse()?;
    if let Some(ns) = &args.n_list {
        for &n in ns {
            check_terms(n)?;
        }
    }
    let spec = TableSpec {
        id,
        z: args.z,
        a_list: args.a_list,
        b_list: args.b_list,
        n_list: args.n_list,
    };
    let table = error_table(&spec)?;
    Ok(match args.format {
        Format::Csv => table.to_csv(),
        Format::Text => table.to_text(),
        Format::Json => format!("{}\n", serde_json::to_string(&table).expect("tables serialize")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("kummer").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_scaled_m_text() {
        let (code, out, _) = call(&["eval", "--which", "m", "--a", "499", "--b", "500", "--z", "500", "--terms", "4", "--scaled"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("M~(a,b,z) a=499 b=500 z=500"));
        assert!(out.contains("terms_used       5"));
        assert!(out.contains("domain_ok        true"));
    }

    #[test]
    fn eval_u_json_extreme_value() {
        let (code, out, _) = call(&["eval", "--which", "u", "--a", "130", "--b", "25.1", "--z", "100", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["sign"], 1);
        let lm = v["log_magnitude"].as_f64().unwrap();
        assert!((lm - 3.8723892985558665e-293f64.ln()).abs() < 1e-9, "{lm}");
        assert!((v["value"].as_f64().unwrap() / 3.8723892985558665e-293 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn eval_json_round_trips_bitwise() {
        let (_, out, _) = call(&["eval", "--which", "m", "--a", "33.3", "--b", "71.7", "--z", "12.5", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        let back: ExpansionResult = serde_json::from_value(v).unwrap();
        let direct = evaluate(Which::M, false, &Parameters::new(33.3, 71.7, 12.5).unwrap(), &EvalOptions::default()).unwrap();
        assert_eq!(back.value.to_bits(), direct.value.to_bits());
        assert_eq!(back.log_magnitude.to_bits(), direct.log_magnitude.to_bits());
        assert_eq!(back.last_term_ratio.to_bits(), direct.last_term_ratio.to_bits());
    }

    #[test]
    fn eval_with_oracle() {
        let (code, out, _) = call(&["eval", "--which", "u", "--a", "20", "--b", "30", "--z", "40", "--oracle", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["oracle_relative_error"].as_f64().unwrap() < 1e-8);
        let (code, _, err) = call(&["eval", "--a", "2", "--b", "3", "--z", "4", "--oracle", "--precision-digits", "50"]);
        assert_eq!(code, EXIT_USAGE, "{err}");
    }

    #[test]
    fn table1_csv_layout() {
        let (code, out, _) = call(&["table", "--id", "table1"]);
        assert_eq!(code, 0);
        let first = out.lines().next().unwrap();
        assert_eq!(first, "a,n0,n1,n2,n3,n4");
        assert_eq!(out.lines().filter(|l| l.starts_with("a,")).count(), 2);
    }

    #[test]
    fn table_overrides() {
        let (code, out, _) = call(&["table", "--id", "table2", "--z", "50", "--a-list", "101,301", "--b-list", "101", "--format", "text"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("Wronskian, N = 4, z = 50"));
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn coeffs_json_fields() {
        let (code, out, _) = call(&["coeffs", "--which", "u", "--a", "10", "--b", "20", "--z", "30", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        for k in ["mu", "beta", "tau", "which", "f", "f_tilde"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["f_tilde"].as_array().unwrap().len(), 5);
        assert_eq!(v["f_tilde"][0], 1.0);
    }

    #[test]
    fn check_reports_three_residuals() {
        let (code, out, _) = call(&["check", "--a", "99", "--b", "500", "--z", "500", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Vec<Value> = serde_json::from_str(&out).unwrap();
        let kinds: Vec<&str> = v.iter().map(|r| r["kind"].as_str().unwrap()).collect();
        assert_eq!(kinds, ["recurrence_M", "recurrence_U", "wronskian"]);
        assert!(v.iter().all(|r| r["residual"].as_f64().unwrap() < 1e-11));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["eval", "--a", "1", "--b", "2", "--z", "3", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "--a", "1", "--b", "2", "--z", "3", "--terms", "9"]).0, EXIT_USAGE);
        assert_eq!(call(&["table", "--id", "table3"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "--a", "-1", "--b", "2", "--z", "3"]).0, EXIT_DOMAIN);
        assert_eq!(call(&["eval", "--which", "u", "--a", "1", "--b", "-2", "--z", "3"]).0, EXIT_DOMAIN);
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("U(a, b+1, z)"));
    }

    #[test]
    fn u_accepts_b_below_zero() {
        // U(a, b+1, z) with -1 < b <= 0.
        let (code, out, err) = call(&["eval", "--which", "u", "--a", "40", "--b", "-0.5", "--z", "30"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("U(a,b+1,z)"));
    }
}
