//! `cubalg`: JSON front end for the cubalg library.
//!
//! Exit codes: 0 when the computation ran and every requested check passed,
//! 1 when a check failed, 2 on usage, parse, or input errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cubalg::fixtures::{fixture, NAMES};
use cubalg::identities::{proof_trace, TraceConfig, TraceMode, TraceOutcome};
use cubalg::ops::{
    certified_constant, equivalence_check, inf_laplace_residual, linear_cube_null_p,
    p_laplace_residual, radial_residual,
};
use cubalg::search::certify::{
    certify_nonexistence, exceptional_sweep, grid_certify_2d, CertConfig,
};
use cubalg::search::idempotents::{find_idempotents, IdempotentConfig};
use cubalg::identities::snap;
use cubalg::scalar::parse_rational;
use cubalg::{
    CubicForm, FSAlgebra, GramMetric, HomoPoly, InnerScheme, LinOp, PParam, Rational, Scalar,
};

const CLI_SCHEMA: &str = "cubalg.cli/1";

#[derive(Parser)]
#[command(name = "cubalg", version, about = "Cubic forms, their algebras, and p-Laplace certificates")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Arithmetic: rational (default for check/trace) or float (default for certify).
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Rational,
    Float,
}

#[derive(Args, Serialize)]
struct PolyArgs {
    /// Cubic in the text format, e.g. "x1^3 - 3*x1*x2^2".
    #[arg(long, conflicts_with = "poly_file", required_unless_present = "poly_file")]
    poly: Option<String>,
    /// File holding the cubic.
    #[arg(long)]
    poly_file: Option<PathBuf>,
    /// Number of variables.
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplication table and trace vector of the algebra of a cubic.
    Algebra {
        #[command(flatten)]
        poly: PolyArgs,
        /// Gram matrix rows separated by `;`, entries by `,`.
        #[arg(long)]
        gram: Option<String>,
    },
    /// Full polarization u(x; y; z), by closed form and by inclusion-exclusion.
    Polarize {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// p-Laplace (or infinity-Laplace) residual; with --lambda, the radial residual.
    Residual {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Which coefficient of <x^2,x^3> makes the quintic identity exact.
    Check {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
    },
    /// Replay the idempotent contradiction chain.
    Trace {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, env = "CUBALG_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Tolerance for checks run in floating point.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Nonzero idempotents by sphere maximization and Newton refinement.
    Idempotents {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        gram: Option<String>,
        #[arg(long, env = "CUBALG_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Multistart lower bound on the residual over unit cubics.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "sweep")]
        p: Option<String>,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, env = "CUBALG_SEED")]
        seed: Option<u64>,
        /// coefficient-l2 or sphere-l2.
        #[arg(long, default_value = "coefficient-l2")]
        scheme: String,
        /// Worker threads for restarts.
        #[arg(long)]
        jobs: Option<usize>,
        /// Brute-force grid with this many points per axis (n = 2 only).
        #[arg(long)]
        grid: Option<usize>,
        /// Comma-separated exponents; reports where the residual vanishes.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["p", "grid"])]
        sweep: Option<String>,
    },
    /// Named test algebras with re-verified facts.
    Fixture {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Outcome {
    command: &'static str,
    config: Value,
    seed: Option<u64>,
    mode: Option<Mode>,
    passed: bool,
    result: Value,
}

fn read_poly(args: &PolyArgs) -> Result<HomoPoly<Rational>, Failure> {
    let text = match (&args.poly, &args.poly_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(Failure::Usage("one of --poly, --poly-file is required".into())),
    };
    Ok(HomoPoly::parse(text.trim(), args.n)?)
}

fn read_cubic(args: &PolyArgs) -> Result<CubicForm<Rational>, Failure> {
    Ok(CubicForm::new(read_poly(args)?)?)
}

fn parse_p(text: &str) -> Result<PParam, Failure> {
    text.parse::<PParam>().map_err(Failure::Usage)
}

fn parse_vector(text: &str, n: usize) -> Result<Vec<Rational>, Failure> {
    let v: Option<Vec<Rational>> = text.split(',').map(|t| parse_rational(t.trim())).collect();
    let v = v.ok_or_else(|| Failure::Usage(format!("invalid vector `{text}`")))?;
    if v.len() != n {
        return Err(Failure::Usage(format!(
            "vector `{text}` has {} entries, expected {n}",
            v.len()
        )));
    }
    Ok(v)
}

fn parse_gram(text: &str, n: usize) -> Result<GramMetric<Rational>, Failure> {
    let rows = text
        .split(';')
        .map(|r| parse_vector(r, n))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.len() != n {
        return Err(Failure::Usage(format!("Gram matrix needs {n} rows")));
    }
    Ok(GramMetric::new(LinOp::from_rows(rows))?)
}

fn build_algebra(
    poly: &PolyArgs,
    gram: &Option<String>,
) -> Result<FSAlgebra<Rational>, Failure> {
    let u = read_cubic(poly)?;
    Ok(match gram {
        None => FSAlgebra::euclidean(u),
        Some(g) => FSAlgebra::new(u, parse_gram(g, poly.n)?)?,
    })
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let mode = cli.mode;
    Ok(match &cli.command {
        Command::Algebra { poly, gram } => {
            let a = build_algebra(poly, gram)?;
            let mode = mode.unwrap_or(Mode::Rational);
            let table = match mode {
                Mode::Rational => to_json(&a.multiplication_table()),
                Mode::Float => to_json(&a.to_f64().multiplication_table()),
            };
            Outcome {
                command: "algebra",
                config: json!({ "poly": poly, "gram": gram }),
                seed: None,
                mode: Some(mode),
                passed: true,
                result: table,
            }
        }
        Command::Polarize { poly, x, y, z } => {
            let u = read_cubic(poly)?;
            let (x, y, z) = (
                parse_vector(x, poly.n)?,
                parse_vector(y, poly.n)?,
                parse_vector(z, poly.n)?,
            );
            let mode = mode.unwrap_or(Mode::Rational);
            let (closed, incl) = match mode {
                Mode::Rational => (
                    u.polarize3(&x, &y, &z)?.to_json(),
                    u.polarize3_inclusion_exclusion(&x, &y, &z)?.to_json(),
                ),
                Mode::Float => {
                    let uf = u.to_f64();
                    let f = |v: &[Rational]| v.iter().map(Scalar::to_f64).collect::<Vec<_>>();
                    let (xf, yf, zf) = (f(&x), f(&y), f(&z));
                    (
                        uf.polarize3(&xf, &yf, &zf)?.to_json(),
                        uf.polarize3_inclusion_exclusion(&xf, &yf, &zf)?.to_json(),
                    )
                }
            };
            let agree = match mode {
                Mode::Rational => closed == incl,
                Mode::Float => {
                    let (a, b) = (closed.as_f64().unwrap_or(f64::NAN), incl.as_f64().unwrap_or(0.0));
                    (a - b).abs() <= 1e-9 * (1.0 + a.abs())
                }
            };
            Outcome {
                command: "polarize",
                config: json!({ "poly": poly }),
                seed: None,
                mode: Some(mode),
                passed: agree,
                result: json!({ "value": closed, "inclusion_exclusion": incl, "agree": agree }),
            }
        }
        Command::Residual { poly, p, lambda } => {
            let u = read_poly(poly)?;
            let pp = parse_p(p)?;
            let mode = mode.unwrap_or(Mode::Rational);
            let lam = lambda
                .as_deref()
                .map(|l| parse_rational(l).ok_or_else(|| Failure::Usage(format!("invalid lambda `{l}`"))))
                .transpose()?;
            fn compute<S: Scalar>(
                u: &HomoPoly<S>,
                p: &PParam,
                lam: Option<S>,
            ) -> Result<(HomoPoly<S>, &'static str), Failure> {
                Ok(match (p, lam) {
                    (_, Some(l)) => (radial_residual(u, p, &l)?, "radial"),
                    (PParam::Infinity, None) => (inf_laplace_residual(u), "infinity-laplace"),
                    (_, None) => (p_laplace_residual(u, p)?, "p-laplace"),
                })
            }
            let (text, is_zero, degree, op) = match mode {
                Mode::Rational => {
                    let (r, op) = compute(&u, &pp, lam.clone())?;
                    (r.to_string(), r.is_zero(), r.degree(), op)
                }
                Mode::Float => {
                    let (r, op) = compute(&u.to_f64(), &pp, lam.as_ref().map(Scalar::to_f64))?;
                    (r.to_string(), r.is_zero(), r.degree(), op)
                }
            };
            Outcome {
                command: "residual",
                config: json!({ "poly": poly, "p": pp, "lambda": lam.map(|l| l.to_string()) }),
                seed: None,
                mode: Some(mode),
                passed: true,
                result: json!({
                    "operator": op,
                    "residual": text,
                    "is_zero": is_zero,
                    "degree": degree,
                }),
            }
        }
        Command::Check { poly, p } => {
            if mode == Some(Mode::Float) {
                return Err(Failure::Usage("check compares polynomials exactly; use --mode rational".into()));
            }
            let u = read_cubic(poly)?;
            let pp = parse_p(p)?;
            let report = equivalence_check(&u, &pp)?;
            let probes = certified_constant(&pp)?;
            let passed = report.certified_s.is_some();
            Outcome {
                command: "check",
                config: json!({ "poly": poly, "p": pp }),
                seed: None,
                mode: Some(Mode::Rational),
                passed,
                result: json!({
                    "equivalence": report,
                    "probe_certified_s": probes.map(|s| s.to_string()),
                    "linear_cube_null_p": linear_cube_null_p().map(|p| p.to_string()),
                    "candidate_exceptional_p": ["0", "2"],
                }),
            }
        }
        Command::Trace {
            poly,
            p,
            seed,
            restarts,
            tol,
        } => {
            let a = FSAlgebra::euclidean(read_cubic(poly)?);
            let pp = parse_p(p)?;
            let seed = seed.unwrap_or(0);
            let mode = mode.unwrap_or(Mode::Rational);
            let mut cfg = TraceConfig::default().with_seed(seed).with_restarts(*restarts);
            cfg.tol = *tol;
            cfg.mode = match mode {
                Mode::Rational => TraceMode::Exact,
                Mode::Float => TraceMode::Float,
            };
            let trace = proof_trace(&a, &pp, &cfg)?;
            let passed = trace.outcome == TraceOutcome::CounterexampleAlarm;
            Outcome {
                command: "trace",
                config: json!({ "poly": poly, "p": pp, "restarts": restarts, "tol": tol }),
                seed: Some(seed),
                mode: Some(mode),
                passed,
                result: to_json(&trace),
            }
        }
        Command::Idempotents {
            poly,
            gram,
            seed,
            restarts,
        } => {
            let a = build_algebra(poly, gram)?;
            let seed = seed.unwrap_or(0);
            let cfg = IdempotentConfig {
                restarts: *restarts,
                seed,
                ..IdempotentConfig::default()
            };
            let found = find_idempotents(&a.to_f64(), &cfg);
            let list: Vec<Value> = found
                .idempotents
                .iter()
                .map(|i| {
                    let mut v = to_json(i);
                    v["exact"] = snap(&a, &i.c, 1_000_000)
                        .map(|c| json!(c.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
                        .unwrap_or(Value::Null);
                    v
                })
                .collect();
            Outcome {
                command: "idempotents",
                config: json!({ "poly": poly, "gram": gram, "restarts": restarts }),
                seed: Some(seed),
                mode: Some(Mode::Float),
                passed: !found.optimizer_failure,
                result: json!({
                    "count": list.len(),
                    "idempotents": list,
                    "zero_algebra": found.zero_algebra,
                    "optimizer_failure": found.optimizer_failure,
                }),
            }
        }
        Command::Certify {
            n,
            p,
            restarts,
            seed,
            scheme,
            jobs,
            grid,
            sweep,
        } => {
            if mode == Some(Mode::Rational) {
                return Err(Failure::Usage("certify runs in floating point; use --mode float".into()));
            }
            let scheme: InnerScheme = scheme.parse()?;
            let seed = seed.unwrap_or(42);
            let cfg = CertConfig {
                restarts: *restarts,
                seed,
                scheme,
                jobs: *jobs,
                ..CertConfig::default()
            };
            let config = json!({
                "n": n, "p": p, "restarts": restarts, "scheme": scheme,
                "jobs": jobs, "grid": grid, "sweep": sweep,
            });
            let (passed, result) = if let Some(list) = sweep {
                let ps = list.split(',').map(parse_p).collect::<Result<Vec<_>, _>>()?;
                (true, to_json(&exceptional_sweep(*n, &ps, &cfg)?))
            } else {
                let pp = parse_p(p.as_deref().unwrap_or_default())?;
                let report = match grid {
                    Some(res) => {
                        if *n != 2 {
                            return Err(Failure::Usage("--grid needs --n 2".into()));
                        }
                        grid_certify_2d(&pp, *res, scheme)?
                    }
                    None => certify_nonexistence(*n, &pp, &cfg)?,
                };
                (report.certified_positive, to_json(&report))
            };
            Outcome {
                command: "certify",
                config,
                seed: Some(seed),
                mode: Some(Mode::Float),
                passed,
                result,
            }
        }
        Command::Fixture { name, list } => {
            let result = if *list {
                json!(NAMES)
            } else {
                let f = fixture(name.as_deref().unwrap_or_default())?;
                f.to_json()
            };
            Outcome {
                command: "fixture",
                config: json!({ "name": name, "list": list }),
                seed: None,
                mode: None,
                passed: true,
                result,
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut doc = json!({
                "schema_version": CLI_SCHEMA,
                "command": out.command,
                "mode": out.mode,
                "seed": out.seed,
                "config": out.config,
                "status": if out.passed { "pass" } else { "fail" },
                "result": out.result,
            });
            if !cli.no_timestamp {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                doc["timestamp"] = json!(secs);
            }
            let text = if cli.pretty {
                serde_json::to_string_pretty(&doc)
            } else {
                serde_json::to_string(&doc)
            }
            .expect("JSON output");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("cubalg: {msg}");
            ExitCode::from(2)
        }
    }
}
