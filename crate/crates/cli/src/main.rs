//! `qmetric` command-line tool.
//!
//! Exit codes: 0 success, 1 a checked bound or assertion failed, 2 bad input.
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmetric::algebra::{AlgElement, AlgState, Algebra, NormKind};
use qmetric::funcspace::{lip_part, lipnorm, q_term, MatrixFunction, QTerm, SeminormSpec};
use qmetric::mcshane::ExtensionProblem;
use qmetric::metric::{gh_exact, gh_upper, FiniteMetricSpace, GH_EXACT_CAP};
use qmetric::mk::{embed_check, MkOptions, MkProgram, MkResult};
use qmetric::propinquity::{approx_table, halving_schedule, propinquity_upper_bound};
use qmetric::states::FunctionalState;
use qmetric::Tolerances;
use serde::Serialize;
use serde_json::json;

mod inputs;
mod report;

use inputs::{parse_list, Inputs};
use report::{Cell, Format, Report};

/// Failures mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Violation(String),
}

impl From<qmetric::Error> for CliError {
    fn from(e: qmetric::Error) -> Self {
        match e {
            qmetric::Error::Invariant(m) => CliError::Violation(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qmetric", version, about = "Quantum metrics on matrix-valued functions over finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Use all cores for independent solves. Output does not change.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum NormArg {
    Op,
    Max,
    Realmax,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum QArg {
    Cx,
    C,
    State,
    Conv,
    Convk,
}

#[derive(Args, Serialize)]
struct SpecArgs {
    #[arg(long = "spec-norm", value_enum, default_value = "realmax")]
    norm: NormArg,
    #[arg(long = "spec-q", value_enum, default_value = "conv")]
    q: QArg,
    /// Scale for the convk quotient.
    #[arg(long = "K")]
    k: Option<f64>,
    /// State file for the state-centered quotient.
    #[arg(long = "q-state")]
    q_state: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SpaceArgs {
    /// Metric space JSON file.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Built-in space: circle-chord:N, circle-arc:N, interval:N or random:N,
    /// optionally followed by @D to rescale to diameter D.
    #[arg(long = "gen")]
    generator: Option<String>,
}

#[derive(Args, Serialize)]
struct MkArgs {
    /// Outer and inner 16-gons instead of boxes in interval mode.
    #[arg(long)]
    polygons: bool,
    /// Keep the Lipschitz constraints of every pair.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Operator, max and real max norms of an element, with the equivalence checks.
    Norms {
        #[arg(long)]
        element: PathBuf,
        /// Block sizes such as `2,3`, or a JSON file.
        #[arg(long)]
        algebra: String,
    },
    /// Lipschitz seminorm of a function.
    Lipnorm {
        #[arg(long)]
        function: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Distance between two states.
    Mk {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        mk: MkArgs,
    },
    /// Compare distances between point states with the metric.
    EmbedCheck {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        algebra: String,
        /// State on the algebra; defaults to the tracial state with equal block weights.
        #[arg(long)]
        mu: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        mk: MkArgs,
    },
    /// Gromov-Hausdorff distance, exact for small spaces and bounded through a cross matrix.
    Gh {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// JSON matrix of distances from points of X to points of Y.
        #[arg(long)]
        cross: Option<PathBuf>,
    },
    /// Propinquity bound through the unit-pivot bridge, with sampled certificates.
    Bridge {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Defaults to the metric of X when X and Y are the same space.
        #[arg(long)]
        cross: Option<PathBuf>,
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Bounds for a schedule of nets of one space.
    Approx {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        algebra: String,
        /// Comma-separated net scales; defaults to halving from diam/2.
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 6)]
        rows: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Print a built-in metric space.
    Gen {
        /// circle-chord:N, circle-arc:N, interval:N or random:N, optionally @D.
        generator: String,
    },
    /// McShane extension of a Lipschitz function from a subset.
    Extend {
        #[arg(long)]
        problem: PathBuf,
    },
}

fn tolerances() -> Result<Tolerances, CliError> {
    match std::env::var("QMETRIC_TOL") {
        Ok(s) => Ok(Tolerances::default().parse_overrides(&s)?),
        Err(_) => Ok(Tolerances::default()),
    }
}

fn spec(
    args: &SpecArgs,
    inputs: &mut Inputs,
    space: Option<(&FiniteMetricSpace, &Algebra)>,
    tol: &Tolerances,
) -> Result<SeminormSpec, CliError> {
    let norm = match args.norm {
        NormArg::Op => NormKind::Operator,
        NormArg::Max => NormKind::Max,
        NormArg::Realmax => NormKind::RealMax,
    };
    let q = match args.q {
        QArg::Cx => QTerm::PointwiseQuotient,
        QArg::C => QTerm::ScalarQuotient,
        QArg::Conv => QTerm::RealQuotient,
        QArg::Convk => QTerm::ScaledRealQuotient(
            args.k.ok_or_else(|| CliError::Input("--spec-q convk needs --K".into()))?,
        ),
        QArg::State => {
            let path = args.q_state.as_deref().ok_or_else(|| CliError::Input("--spec-q state needs --q-state".into()))?;
            let (space, alg) = space.expect("caller supplies the space");
            QTerm::StateCentered(FunctionalState::from_json(&inputs.value(path)?, space, alg, tol)?)
        }
    };
    Ok(SeminormSpec::new(norm, q)?)
}

fn mk_options(args: &MkArgs, parallel: bool) -> MkOptions {
    MkOptions { prune_pairs: !args.no_prune, polygons: args.polygons, parallel }
}

#[derive(Serialize)]
struct NormsReport {
    self_adjoint: bool,
    op: f64,
    max: f64,
    real_max: Option<f64>,
    dist_to_scalars: serde_json::Value,
    /// `op / m_A <= max <= op`.
    max_sandwich: bool,
    /// `real_max <= op <= sqrt 2 m_A real_max`, for self-adjoint input.
    real_max_sandwich: Option<bool>,
}

fn cmd_norms(element: &Path, algebra: &str, inputs: &mut Inputs, tol: &Tolerances) -> Result<(NormsReport, bool), CliError> {
    let alg = inputs.algebra(algebra)?;
    let a: AlgElement = inputs.json(element)?;
    alg.check(&a)?;
    let m = alg.max_block() as f64;
    let slack = 1e-12;
    let (op, max) = (a.op_norm_with(tol.eig), a.max_norm());
    let sa = a.is_self_adjoint(tol.sa);
    let real_max = if sa { Some(a.real_max_norm(tol)?) } else { None };
    let max_sandwich = op / m <= max * (1.0 + slack) + slack && max <= op * (1.0 + slack) + slack;
    let real_max_sandwich =
        real_max.map(|r| r <= op * (1.0 + slack) + slack && op <= std::f64::consts::SQRT_2 * m * r * (1.0 + slack) + slack);
    let dist = |k| a.dist_to_scalars(k, tol).ok();
    let report = NormsReport {
        self_adjoint: sa,
        op,
        max,
        real_max,
        dist_to_scalars: json!({
            "op": dist(NormKind::Operator),
            "max": dist(NormKind::Max),
            "real_max": if sa { dist(NormKind::RealMax) } else { None },
        }),
        max_sandwich,
        real_max_sandwich,
    };
    let ok = max_sandwich && real_max_sandwich != Some(false);
    Ok((report, ok))
}

fn run(cli: Cli) -> Result<(Report, bool), CliError> {
    let tol = tolerances()?;
    let common = &cli.common;
    if !common.parallel {
        // Ignore failure: a pool may already exist when embedded in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let config = json!({ "command": &cli.command, "common": common, "tolerances": tol });
    let mut inputs = Inputs::default();
    let inp = &mut inputs;
    let (name, result, table, ok): (&'static str, serde_json::Value, _, bool) = match &cli.command {
        Command::Norms { element, algebra } => {
            let (r, ok) = cmd_norms(element, algebra, inp, &tol)?;
            ("norms", serde_json::to_value(r).unwrap(), None, ok)
        }
        Command::Lipnorm { function, spec: sa } => {
            let f: MatrixFunction = inp.json(function)?;
            let s = spec(sa, inp, Some((f.space(), f.algebra())), &tol)?;
            let r = json!({
                "norm": s.norm,
                "q": s.q.name(),
                "lip_part": lip_part(&f, s.norm, &tol)?,
                "q_term": q_term(&f, &s, &tol)?,
                "lipnorm": lipnorm(&f, &s, &tol)?,
            });
            ("lipnorm", r, None, true)
        }
        Command::Mk { space, algebra, mu, nu, spec: sa, mk } => {
            let x = inp.space(space.space.as_deref(), space.generator.as_deref(), common.seed)?;
            let alg = inp.algebra(algebra)?;
            let mu = FunctionalState::from_json(&inp.value(mu)?, &x, &alg, &tol)?;
            let nu = FunctionalState::from_json(&inp.value(nu)?, &x, &alg, &tol)?;
            let s = spec(sa, inp, Some((&x, &alg)), &tol)?;
            let prog = MkProgram::new(&x, &alg, s, mk_options(mk, common.parallel), &tol)?;
            let r = prog.distance(&mu, &nu)?;
            let ok = match &r {
                MkResult::Exact { .. } => true,
                MkResult::Interval { lower, upper } => lower <= &(upper + tol.lp),
            };
            let v = json!({ "n_vars": prog.n_vars(), "n_constraints": prog.n_constraints(), "distance": r });
            ("mk", v, None, ok)
        }
        Command::EmbedCheck { space, algebra, mu, spec: sa, mk } => {
            let x = inp.space(space.space.as_deref(), space.generator.as_deref(), common.seed)?;
            let alg = inp.algebra(algebra)?;
            let mu: AlgState = match mu {
                Some(p) => {
                    let m: AlgState = inp.json(p)?;
                    m.validate(&alg, &tol)?;
                    m
                }
                None => AlgState::tracial(&alg, &vec![1.0 / alg.block_count() as f64; alg.block_count()], &tol)?,
            };
            let s = spec(sa, inp, Some((&x, &alg)), &tol)?;
            let prog = MkProgram::new(&x, &alg, s, mk_options(mk, common.parallel), &tol)?;
            let r = embed_check(&prog, &mu)?;
            let rows = r
                .pairs
                .iter()
                .map(|p| vec![Cell::Int(p.x), Cell::Int(p.y), Cell::Num(p.distance), Cell::Num(p.mk)])
                .collect();
            let ok = r.ok();
            ("embed-check", serde_json::to_value(r).unwrap(), Some((vec!["x", "y", "distance", "mk"], rows)), ok)
        }
        Command::Gh { x, y, cross } => {
            let xs: FiniteMetricSpace = inp.json(x)?;
            let ys: FiniteMetricSpace = inp.json(y)?;
            let upper = match cross {
                Some(c) => {
                    let c: Vec<Vec<f64>> = inp.json(c)?;
                    Some(gh_upper(&xs, &ys, &c, &tol)?)
                }
                None => None,
            };
            let small = xs.len() <= GH_EXACT_CAP && ys.len() <= GH_EXACT_CAP;
            if !small && upper.is_none() {
                return Err(CliError::Input(format!(
                    "exact search is limited to {GH_EXACT_CAP} points per space; pass --cross for an upper bound"
                )));
            }
            let exact = if small { Some(gh_exact(&xs, &ys)?) } else { None };
            let ok = match (exact, upper) {
                (Some(e), Some(u)) => e <= u + tol.metric,
                _ => true,
            };
            ("gh", json!({ "exact": exact, "upper": upper }), None, ok)
        }
        Command::Bridge { x, y, cross, algebra, eps, samples } => {
            let xs: FiniteMetricSpace = inp.json(x)?;
            let ys: FiniteMetricSpace = inp.json(y)?;
            let c: Vec<Vec<f64>> = match cross {
                Some(c) => inp.json(c)?,
                None if xs == ys => xs.matrix().to_vec(),
                None => return Err(CliError::Input("--cross is required when X and Y differ".into())),
            };
            let alg = inp.algebra(algebra)?;
            let b = propinquity_upper_bound(&xs, &ys, &c, *eps, &alg, *samples, common.seed, &tol)?;
            let ok = b.all_verified;
            ("bridge", serde_json::to_value(b).unwrap(), None, ok)
        }
        Command::Approx { space, algebra, schedule, rows, eps, samples } => {
            let x = inp.space(space.space.as_deref(), space.generator.as_deref(), common.seed)?;
            let alg = inp.algebra(algebra)?;
            let schedule = match schedule {
                Some(s) => parse_list(s)?,
                None => halving_schedule(&x, *rows),
            };
            let t = approx_table(&x, &alg, &schedule, *eps, *samples, common.seed, &tol)?;
            let table = t
                .rows
                .iter()
                .map(|r| {
                    vec![Cell::Num(r.eps_n), Cell::Int(r.net_size), Cell::Num(r.hausdorff), Cell::Num(r.delta_xy), Cell::Num(r.bound)]
                })
                .collect();
            let ok = t.all_verified();
            let header = vec!["eps_n", "net_size", "hausdorff", "delta_xy", "bound"];
            ("approx", serde_json::to_value(t).unwrap(), Some((header, table)), ok)
        }
        Command::Gen { generator } => {
            let s = inputs::generate(generator, common.seed)?;
            ("gen", serde_json::to_value(s).unwrap(), None, true)
        }
        Command::Extend { problem } => {
            let p: ExtensionProblem = inp.json(problem)?;
            let values = p.extend(&tol)?;
            ("extend", json!({ "values": values }), None, true)
        }
    };
    let mut report = Report::new(name, config, &inputs, result);
    report.table = table;
    Ok((report, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = (cli.common.format, cli.common.out.clone());
    match run(cli) {
        Ok((report, ok)) => {
            if let Err(CliError::Input(m)) = report.emit(format, out.as_deref()) {
                eprintln!("error: {m}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed; see report");
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Violation(m)) => {
            eprintln!("violation: {m}");
            ExitCode::from(1)
        }
    }
}
