//! Command-line front end: expression parsing, dispatch to the factoriser
//! and the operator pipeline, JSON and plain-text reports.

pub mod json;
mod parse;

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::diffop::{eigen, jordan};
use crate::error::{Error, Result};
use crate::factor::{factor_linear_traced, FactorStep};
use crate::orepoly::newton_polygon;
use crate::scalars::Backend;
use crate::series::{is_similar, similarity_witness};

pub use parse::{parse_expression, parse_fraction, parse_matrix, parse_poly, parse_scalar, parse_series, Parsed};

/// Per-invocation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    /// Absolute `t`-precision requested from every computation.
    pub precision: i64,
    pub backend: Backend,
    /// Exponent `m` of the derivation `t^m d/dt` used for polynomials.
    pub derivation_m: i64,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            precision: 48,
            backend: Backend::Exact,
            derivation_m: 1,
        }
    }
}

impl Session {
    pub fn new(precision: i64, backend: Backend, derivation_m: i64) -> Result<Self> {
        if precision < 8 {
            return Err(Error::Unsupported(format!(
                "precision must be at least 8, got {precision}"
            )));
        }
        if derivation_m < 1 {
            return Err(Error::Unsupported(format!(
                "derivation exponent must be at least 1, got {derivation_m}"
            )));
        }
        Ok(Session {
            precision,
            backend,
            derivation_m,
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Parser, Debug)]
#[command(
    name = "hlt",
    version,
    about = "Factor differential polynomials and compute formal Jordan decompositions"
)]
struct Cli {
    /// Absolute t-precision of results (at least 8).
    #[arg(long, global = true, default_value_t = 48, allow_negative_numbers = true)]
    prec: i64,
    /// Coefficient arithmetic.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Use the derivation t^m d/dt for polynomials.
    #[arg(
        long = "derivation-m",
        global = true,
        default_value_t = 1,
        allow_negative_numbers = true
    )]
    derivation_m: i64,
    /// Emit a JSON document (default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Emit a plain-text summary instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor a monic differential polynomial into linear factors.
    Factor {
        /// Polynomial in x, or `-` for stdin.
        poly: String,
    },
    /// Newton polygon of a differential polynomial.
    Newton {
        /// Polynomial in x, or `-` for stdin.
        poly: String,
    },
    /// Jordan decomposition D = S + N of d + A.
    Jordan {
        /// Matrix `[a, b; c, d]`, or `-` for stdin.
        matrix: String,
    },
    /// One eigenvalue and eigenvector of d + A.
    Eigen {
        /// Matrix `[a, b; c, d]`, or `-` for stdin.
        matrix: String,
    },
    /// Decide whether two series are similar under t d/dt.
    Similar { a: String, b: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Factor { .. } => "factor",
            Command::Newton { .. } => "newton",
            Command::Jordan { .. } => "jordan",
            Command::Eigen { .. } => "eigen",
            Command::Similar { .. } => "similar",
        }
    }

    fn inputs(&self) -> Vec<&String> {
        match self {
            Command::Factor { poly } | Command::Newton { poly } => vec![poly],
            Command::Jordan { matrix } | Command::Eigen { matrix } => vec![matrix],
            Command::Similar { a, b } => vec![a, b],
        }
    }
}

/// Result of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Exit code for command-line usage errors.
pub const USAGE_EXIT: i32 = 1;

struct Report {
    ramification: u32,
    precision: Option<Rational64>,
    payload: Value,
    warnings: Vec<String>,
    summary: Vec<String>,
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
    }
}

fn cmd_factor(text: &str, s: &Session) -> Result<Report> {
    let f = parse_poly(text, s)?;
    let (lf, steps) = factor_linear_traced(&f, s.precision)?;
    let slopes: Vec<String> = steps
        .iter()
        .filter_map(|st| match st {
            FactorStep::Visit { polygon, .. } => polygon.single_slope().map(json::fraction),
            _ => None,
        })
        .collect();
    let b = lf.ramification;
    let product_ok = lf.product().eq_to_precision(&f.lift_to(b));
    let mut summary = vec![format!("ramification b = {b}")];
    summary.extend(lf.roots.iter().enumerate().map(|(k, r)| format!("root {}: {r}", k + 1)));
    Ok(Report {
        ramification: b,
        precision: lf.precision,
        payload: json!({
            "input": json::poly(&f),
            "roots": lf.roots.iter().map(json::series).collect::<Vec<_>>(),
            "single_slopes": slopes,
            "product_matches": product_ok,
        }),
        warnings: Vec::new(),
        summary,
    })
}

fn cmd_newton(text: &str, s: &Session) -> Result<Report> {
    let f = parse_poly(text, s)?;
    let np = newton_polygon(&f);
    let vertices: Vec<Value> = np
        .vertices()
        .iter()
        .map(|(i, v)| json!([i, json::fraction(*v)]))
        .collect();
    let slopes: Vec<Value> = np
        .slopes()
        .iter()
        .map(|(r, len)| json!({"slope": json::fraction(*r), "length": len}))
        .collect();
    let summary = np
        .slopes()
        .iter()
        .map(|(r, len)| format!("slope {} of length {len}", json::fraction(*r)))
        .collect();
    Ok(Report {
        ramification: f.ramification(),
        precision: f.precision_t(),
        payload: json!({
            "input": json::poly(&f),
            "vertices": vertices,
            "slopes": slopes,
            "single_slope": np.single_slope().map(json::fraction),
        }),
        warnings: Vec::new(),
        summary,
    })
}

fn cmd_jordan(text: &str, s: &Session) -> Result<Report> {
    let d = parse_matrix(text, s)?;
    let jd = jordan(&d, s.precision)?;
    let mut classes: Vec<(crate::series::PuiseuxSeries, usize)> = Vec::new();
    for a in &jd.eigenvalues {
        match classes.iter_mut().find(|(r, _)| is_similar(r, a)) {
            Some(c) => c.1 += 1,
            None => classes.push((a.clone(), 1)),
        }
    }
    let mut warnings = Vec::new();
    if jd.ramification > d.ramification() {
        warnings.push(format!("eigenvalues need ramification b = {}", jd.ramification));
    }
    if !jd.descends {
        warnings.push("S and N are not fixed by the Galois action to precision".into());
    }
    let jtype = jd.jordan_type();
    let mut summary = vec![format!("ramification b = {}", jd.ramification)];
    summary.extend(
        classes
            .iter()
            .map(|(r, k)| format!("eigenvalue class [{}] with multiplicity {k}", r.to_expr_string())),
    );
    summary.push(format!("Jordan type of N: {jtype:?}"));
    summary.push(format!("descends: {}", jd.descends));
    Ok(Report {
        ramification: jd.ramification,
        precision: jd.precision,
        payload: json!({
            "input": json::matrix(d.matrix()),
            "eigenvalues": jd.eigenvalues.iter().map(json::series).collect::<Vec<_>>(),
            "classes": classes.iter().map(|(r, k)| json!({"representative": json::series(r), "multiplicity": k})).collect::<Vec<_>>(),
            "nilpotent": json::scalar_rows(&jd.nilpotent),
            "jordan_type": jtype,
            "blocks": jd.blocks.iter().map(|r| json!([r.start, r.end])).collect::<Vec<_>>(),
            "descends": jd.descends,
            "gauge": json::matrix(jd.gauge.matrix()),
        }),
        warnings,
        summary,
    })
}

fn cmd_eigen(text: &str, s: &Session) -> Result<Report> {
    let d = parse_matrix(text, s)?;
    let pair = eigen(&d, s.precision)?;
    let (rep, _) = pair.eigenvalue.similarity_representative()?;
    let b = pair.eigenvector.iter().fold(pair.eigenvalue.ramification(), |acc, e| {
        num_integer::lcm(acc, e.ramification())
    });
    let precision = pair
        .eigenvector
        .iter()
        .chain([&pair.eigenvalue])
        .filter_map(|e| e.precision_t())
        .min();
    Ok(Report {
        ramification: b,
        precision,
        payload: json!({
            "input": json::matrix(d.matrix()),
            "eigenvalue": json::series(&pair.eigenvalue),
            "representative": json::series(&rep),
            "eigenvector": pair.eigenvector.iter().map(json::series).collect::<Vec<_>>(),
        }),
        warnings: Vec::new(),
        summary: vec![
            format!("eigenvalue: {}", pair.eigenvalue),
            format!("class representative: {}", rep.to_expr_string()),
            format!(
                "eigenvector: ({})",
                pair.eigenvector
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ],
    })
}

fn cmd_similar(a: &str, b: &str, s: &Session) -> Result<Report> {
    let x = parse_series(a, s)?;
    let y = parse_series(b, s)?;
    let similar = is_similar(&x, &y);
    let witness = if similar {
        similarity_witness(&x, &y, s.precision)
    } else {
        None
    };
    let ram = num_integer::lcm(x.ramification(), y.ramification());
    let mut summary = vec![format!("similar: {similar}")];
    if let Some(w) = &witness {
        summary.push(format!("witness c with a - b = c^-1 d(c): {w}"));
    }
    Ok(Report {
        ramification: ram,
        precision: witness.as_ref().and_then(|w| w.precision_t()),
        payload: json!({
            "a": json::series(&x),
            "b": json::series(&y),
            "similar": similar,
            "representatives": [json::series(&x.similarity_representative()?.0), json::series(&y.similarity_representative()?.0)],
            "witness": witness.as_ref().map(json::series),
        }),
        warnings: Vec::new(),
        summary,
    })
}

fn read_input(arg: &str, stdin: &mut dyn Read, used: &mut bool) -> Result<String> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    if *used {
        return Err(Error::Unsupported("stdin can be used for one argument only".into()));
    }
    *used = true;
    let mut buf = String::new();
    stdin.read_to_string(&mut buf).map_err(|e| Error::Parse {
        line: 1,
        column: 1,
        message: format!("cannot read stdin: {e}"),
    })?;
    Ok(buf)
}

fn dispatch(cmd: &Command, inputs: &[String], s: &Session) -> Result<Report> {
    match cmd {
        Command::Factor { .. } => cmd_factor(&inputs[0], s),
        Command::Newton { .. } => cmd_newton(&inputs[0], s),
        Command::Jordan { .. } => cmd_jordan(&inputs[0], s),
        Command::Eigen { .. } => cmd_eigen(&inputs[0], s),
        Command::Similar { .. } => cmd_similar(&inputs[0], &inputs[1], s),
    }
}

/// Runs one command line (including the program name) and collects its output.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let backend = match cli.backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Float => Backend::Float,
    };
    let command = json!({
        "name": cli.command.name(),
        "args": cli.command.inputs(),
        "precision": cli.prec,
        "backend": backend_name(backend),
        "derivation_m": cli.derivation_m,
    });
    let result = Session::new(cli.prec, backend, cli.derivation_m).and_then(|s| {
        let mut used = false;
        let inputs: Vec<String> = cli
            .command
            .inputs()
            .iter()
            .map(|a| read_input(a, stdin, &mut used))
            .collect::<Result<_>>()?;
        dispatch(&cli.command, &inputs, &s)
    });
    match result {
        Ok(r) => {
            let stdout = if cli.pretty {
                let mut lines = r.summary.clone();
                if let Some(p) = r.precision {
                    lines.push(format!("precision: O(t^{})", json::fraction(p)));
                }
                lines.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
                lines.join("\n") + "\n"
            } else {
                let doc = json!({
                    "schema": json::SCHEMA,
                    "command": command,
                    "ramification": r.ramification,
                    "payload": r.payload,
                    "diagnostics": {
                        "precision": r.precision.map(json::fraction),
                        "backend": backend_name(backend),
                        "warnings": r.warnings,
                    },
                });
                serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
            };
            Outcome {
                stdout,
                stderr: String::new(),
                code: 0,
            }
        }
        Err(e) => {
            let stdout = if cli.pretty {
                String::new()
            } else {
                let doc = json!({
                    "schema": json::SCHEMA,
                    "command": command,
                    "error": {"code": e.code(), "exit_code": e.exit_code(), "message": e.to_string()},
                });
                serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
            };
            Outcome {
                stdout,
                stderr: format!("error[{}]: {e}\n", e.code()),
                code: e.exit_code(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(
            std::iter::once("hlt").chain(args.iter().copied()),
            &mut std::io::empty(),
        )
    }

    fn doc(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn factor_worked_example() {
        let o = run_args(&[
            "factor",
            "x^2 + (4*t^-2 + 2*t^-1 + 2)*x + (4*t^-4 + 4*t^-3 + t^-2 + t^-1 + 1)",
            "--prec",
            "16",
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let d = doc(&o);
        assert_eq!(d["schema"], "hlt/1");
        for r in d["payload"]["roots"].as_array().unwrap() {
            assert_eq!(r["expr"], "-2*t^-2 - t^-1 - 1");
        }
        assert_eq!(d["payload"]["single_slopes"], json!(["-2", "-1", "0"]));
        assert_eq!(d["payload"]["product_matches"], true);
    }

    #[test]
    fn similar_example() {
        let o = run_args(&["similar", "0", "3+t"]);
        assert_eq!(doc(&o)["payload"]["similar"], true);
        let o = run_args(&["similar", "0", "1/2"]);
        assert_eq!(doc(&o)["payload"]["similar"], false);
    }

    #[test]
    fn jordan_zero_matrix() {
        let d = doc(&run_args(&["jordan", "[0,0;0,0]"]));
        assert_eq!(d["payload"]["eigenvalues"][0]["expr"], "0");
        assert_eq!(d["payload"]["eigenvalues"][1]["expr"], "0");
        assert_eq!(d["payload"]["nilpotent"], json!([["0", "0"], ["0", "0"]]));
    }

    #[test]
    fn stdin_input() {
        let mut input: &[u8] = b"[0, t^2;\n 0, 0]";
        let o = run(["hlt", "jordan", "-"], &mut input);
        assert_eq!(o.code, 0);
        assert_eq!(doc(&o)["payload"]["jordan_type"], json!([1, 1]));
    }

    #[test]
    fn error_codes() {
        let o = run_args(&["factor", "x^2 + $"]);
        assert_eq!(o.code, 2);
        assert_eq!(doc(&o)["error"]["code"], "parse_error");
        let o = run_args(&["jordan", "[1, 2, 3; 4, 5, 6]"]);
        assert_eq!(o.code, 13);
        let o = run_args(&["factor", "x^2 + t", "--prec", "4"]);
        assert_eq!(o.code, 14);
        let o = run_args(&["factor", "x^2 + t", "--derivation-m", "2"]);
        assert_eq!(o.code, 14);
        assert_eq!(run_args(&["bogus"]).code, USAGE_EXIT);
        assert_eq!(run_args(&["--help"]).code, 0);
    }

    #[test]
    fn newton_with_higher_derivation() {
        let o = run_args(&["newton", "x^2 + t^-3", "--derivation-m", "2"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(doc(&o)["payload"]["slopes"].is_array());
    }

    #[test]
    fn pretty_summary() {
        let o = run_args(&["eigen", "[0, t; 0, 0]", "--pretty"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("eigenvalue: "));
    }

    #[test]
    fn float_backend_factor() {
        let o = run_args(&["factor", "x^2 - 3*t*x - 1", "--backend", "float", "--prec", "10"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(doc(&o)["diagnostics"]["backend"], "float");
    }
}
