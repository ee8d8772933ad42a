use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use freepd::extend::{self, CentralOracle, ParamOracle, ParamSequence, RandomOracle};
use freepd::json::{self, CertJson, ParamsJson, TraceJson};
use freepd::ncpoly::{self, SosOutcome};
use freepd::pdfun::{self, PdFunction};
use freepd::quasimult;
use freepd::{Error, GroupContext, Tolerance};

/// Positive definite functions on free groups: verify, extend, parametrize,
/// and factor noncommutative polynomials.
///
/// Exit status: 0 on success, 1 when the mathematics fails (not positive
/// definite, no certificate found, ...), 2 on malformed input.
#[derive(Parser, Debug)]
#[command(name = "freepd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check positivity of a pdfun.v1 function on its largest ball.
    Verify {
        #[command(flatten)]
        io: Io,
        /// Relative eigenvalue floor.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Extend a function to a larger ball.
    Extend {
        #[command(flatten)]
        io: Io,
        /// Target radius.
        #[arg(long = "to")]
        to: usize,
        /// Zero contraction at every step (the default).
        #[arg(long, conflicts_with_all = ["params", "seed"])]
        central: bool,
        /// Explicit contractions, params.v1.
        #[arg(long, conflicts_with = "seed")]
        params: Option<PathBuf>,
        /// Seeded random contractions.
        #[arg(long)]
        seed: Option<u64>,
        /// Norm bound for random contractions.
        #[arg(long, default_value_t = 1.0, requires = "seed")]
        radius: f64,
        #[command(flatten)]
        order: OrderArg,
        /// Also write the step trace (trace.v1) here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Relative eigenvalue / rank tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Extract the contractions that produce a function from its restriction.
    Params {
        #[command(flatten)]
        io: Io,
        /// Radius of the base ball.
        #[arg(long = "from")]
        from: usize,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Check maximal (n+1)-orthogonality.
    CheckOrtho {
        #[command(flatten)]
        io: Io,
        /// The level n; words of length n + 1 are checked.
        #[arg(long)]
        n: usize,
        /// Largest admissible inner product of the residuals.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Write the Haagerup function e^{-t|s|} I_k on a ball.
    Haagerup {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        t: f64,
        #[arg(long = "to")]
        to: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Average a function over spheres.
    Radialize {
        #[command(flatten)]
        io: Io,
    },
    /// Factor an ncpoly.v1 polynomial as a sum of hermitian squares.
    Factor {
        #[command(flatten)]
        io: Io,
        /// Coefficient tolerance of the certificate.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
    },
    /// Evaluate a polynomial on random unitaries.
    Sample {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        d_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Io {
    #[arg(short, long)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrderArg {
    /// Letter order, e.g. `1,-1,2,-2` for a1 < a1⁻¹ < a2 < a2⁻¹.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    order: Option<Vec<i32>>,
}

/// A failure that still produced a report.
struct Failure {
    kind: &'static str,
    details: Value,
}

enum Outcome {
    Done,
    Failed(Failure),
}

fn read(path: &Path) -> freepd::Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(output: Option<&Path>, text: &str) -> freepd::Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_pdfun(path: &Path) -> freepd::Result<PdFunction> {
    json::pdfun_from_str(&read(path)?)
}

fn with_order(phi: PdFunction, order: &OrderArg) -> freepd::Result<PdFunction> {
    match &order.order {
        Some(o) => phi.with_context(&GroupContext::with_order(phi.ctx().m(), o.clone())?),
        None => Ok(phi),
    }
}

fn run(cli: Cli) -> freepd::Result<Outcome> {
    match cli.command {
        Command::Verify { io, tol } => {
            let phi = load_pdfun(&io.input)?;
            let report = pdfun::verify_pd(&phi, &Tolerance::uniform(tol)?)?;
            let doc = json!({
                "is_pd": report.is_pd,
                "radius": phi.radius(),
                "min_eigenvalue": report.min_eigenvalue,
                "witness": report.witness,
            });
            emit(io.output.as_deref(), &json::to_string(&doc)?)?;
            if !report.is_pd {
                return Ok(Outcome::Failed(Failure {
                    kind: "not_positive_definite",
                    details: doc,
                }));
            }
        }
        Command::Extend {
            io,
            to,
            central: _,
            params,
            seed,
            radius,
            order,
            trace,
            tol,
        } => {
            let tol = Tolerance::uniform(tol)?;
            let mut phi = with_order(load_pdfun(&io.input)?, &order)?;
            let mut oracle: Box<dyn ParamOracle> = match (params, seed) {
                (Some(path), _) => {
                    let (ctx, seq) = json::params_from_str(&read(&path)?)?;
                    if order.order.is_none() && &ctx != phi.ctx() {
                        phi = phi.with_context(&ctx)?;
                    }
                    Box::new(seq)
                }
                (None, Some(s)) => Box::new(RandomOracle::new(s, radius)),
                (None, None) => Box::new(CentralOracle),
            };
            let (out, steps) = extend::extend_to_ball(&phi, to, oracle.as_mut(), &tol)?;
            emit(io.output.as_deref(), &json::pdfun_to_string(&out)?)?;
            if let Some(path) = trace {
                fs::write(path, json::to_string(&TraceJson::new(out.ctx(), out.k(), &steps))?)?;
            }
        }
        Command::Params {
            io,
            from,
            order,
            tol,
        } => {
            let phi = with_order(load_pdfun(&io.input)?, &order)?;
            let seq: ParamSequence = extend::extract_params(&phi, from, &Tolerance::uniform(tol)?)?;
            let doc = ParamsJson::new(phi.ctx(), phi.k(), from, &seq);
            emit(io.output.as_deref(), &json::to_string(&doc)?)?;
        }
        Command::CheckOrtho { io, n, tol } => {
            let phi = load_pdfun(&io.input)?;
            let report = extend::check_max_orthogonal(&phi, n, tol)?;
            let doc = json!({
                "holds": report.holds,
                "level": n + 1,
                "worst_violation": report.worst_violation,
                "worst_class": report.worst_class,
            });
            emit(io.output.as_deref(), &json::to_string(&doc)?)?;
            if !report.holds {
                return Ok(Outcome::Failed(Failure {
                    kind: "not_maximal_orthogonal",
                    details: doc,
                }));
            }
        }
        Command::Haagerup { m, k, t, to, output } => {
            let phi = quasimult::haagerup(&GroupContext::new(m)?, k, t, to)?;
            emit(output.as_deref(), &json::pdfun_to_string(&phi)?)?;
        }
        Command::Radialize { io } => {
            let phi = pdfun::radialize(&load_pdfun(&io.input)?)?;
            emit(io.output.as_deref(), &json::pdfun_to_string(&phi)?)?;
        }
        Command::Factor { io, tol, max_iter } => {
            let p = json::ncpoly_from_str(&read(&io.input)?)?;
            match ncpoly::factor_sos(&p, tol, max_iter)? {
                SosOutcome::Certificate(cert) => {
                    emit(io.output.as_deref(), &json::to_string(&CertJson::from(&cert))?)?;
                }
                SosOutcome::Infeasible(r) => {
                    return Ok(Outcome::Failed(Failure {
                        kind: "no_certificate",
                        details: json!({
                            "gap": r.gap,
                            "residual": r.residual,
                            "iterations": r.iterations,
                            "note": "the solver is heuristic; this does not prove p is not positive",
                        }),
                    }));
                }
            }
        }
        Command::Sample {
            io,
            trials,
            d_max,
            seed,
        } => {
            let p = json::ncpoly_from_str(&read(&io.input)?)?;
            let r = ncpoly::sample_positivity(&p, trials, d_max, seed)?;
            let doc = json!({
                "min_eigenvalue": r.min_eigenvalue,
                "trial": r.trial,
                "dim": r.dim,
                "trials": trials,
            });
            emit(io.output.as_deref(), &json::to_string(&doc)?)?;
        }
    }
    Ok(Outcome::Done)
}

fn diagnostic(kind: &str, message: String, details: Value) -> String {
    json!({ "status": "failure", "kind": kind, "message": message, "details": details }).to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(f)) => {
            eprintln!("{}", diagnostic(f.kind, f.kind.replace('_', " "), f.details));
            ExitCode::from(1)
        }
        Err(e) => {
            let code = if e.is_input_error() { 2 } else { 1 };
            let details = match &e {
                Error::NotPsd { min_eigenvalue } => json!({ "min_eigenvalue": min_eigenvalue }),
                Error::PartialPositivity {
                    dropped,
                    min_eigenvalue,
                } => json!({ "dropped": dropped, "min_eigenvalue": min_eigenvalue }),
                Error::MissingValue { word, left, right } => {
                    json!({ "word": word, "pair": [left, right] })
                }
                _ => Value::Null,
            };
            eprintln!("{}", diagnostic(e.kind(), e.to_string(), details));
            ExitCode::from(code)
        }
    }
}
