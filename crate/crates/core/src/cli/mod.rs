//! Command-line front end: expression language, JSON records and subcommands.
//!
//! Exit codes: 0 success, 1 internal or I/O failure, 2 invalid input or violated
//! precondition, 3 verification failure.

pub mod ast;
pub mod config;
pub mod eval;
pub mod parse;
pub mod records;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::calculus::{derivative_with, multiply, primitive_with, DerivativeSelection};
use crate::cauchy::{
    residual_check_with, solve_cauchy_with, solve_higher_order_with, verification_suite, CauchyProblem, DistMatrix,
    HigherOrderProblem, SolverConfig, RESIDUAL_TOL,
};
use crate::dist::{kernel_coefficients_with, pair, Distribution, TestFunction};
use crate::error::Error;
use crate::mollify::{convergence_report, families_for, NOISE_FLOOR};
use crate::pwfun::{Interval, Side};
use crate::scalar::Complex;

pub use ast::{print, Expr, Kind};
pub use config::{Config, Settings};
pub use eval::{eval, Value};
pub use parse::parse;

use config::parse_eps_grid;
use eval::default_interval;
use records::{from_json, to_json, DistributionRecord, HigherOrderRecord, HigherOrderSolutionRecord, ProblemRecord, SolutionRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "regudist", version, about = "Distributions with one-sided deltas and linear Cauchy problems")]
struct Cli {
    /// JSON config file (tolerance, k_max, default_alpha, eps_grid, suite_size).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working interval as `lo,hi`; derived from the sites when omitted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Print JSON records instead of expressions.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical form of an expression, optionally its values or a pairing.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        /// Points where the regular part is evaluated from both sides.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        at: Vec<f64>,
        /// Test-function body, cut to `--support`.
        #[arg(long, allow_hyphen_values = true, requires = "support")]
        pair: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        support: Option<String>,
    },
    /// Product of a piecewise coefficient with a distribution.
    Mul {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Derivative with a chosen split at the jumps of the regular part.
    Diff {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Primitive vanishing left of `t0`.
    Prim {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
    },
    /// Solve `x' = A x + f`, `x = x0` at `t0`.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Write the solution record to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve `x^(m) = A_{m-1} x^(m-1) + ... + A_0 x + f`.
    SolveHo {
        /// JSON higher-order problem file.
        #[arg(long, conflicts_with_all = ["coeff", "f"])]
        problem: Option<PathBuf>,
        /// Coefficient matrices `A_0, A_1, ...` in order.
        #[arg(long, allow_hyphen_values = true)]
        coeff: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        t0: f64,
        /// Initial values `x(t0), x'(t0), ...` as expressions, in order.
        #[arg(long, allow_hyphen_values = true)]
        ic: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_ic: Option<String>,
    },
    /// Convergence of mollified problems towards the distributional solution.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `default` or a comma-separated list of epsilons.
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        suite_size: Option<usize>,
        /// Directory for two-column `eps error` files, one per series.
        #[arg(long)]
        coords: Option<PathBuf>,
    },
    /// Coefficients `(f, φ_k)` of a pure jump functional at each of its sites.
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        site: Option<f64>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// JSON problem file; replaces the inline flags.
    #[arg(long, conflicts_with_all = ["a", "f"])]
    problem: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Forcing: a scalar expression or a vector `[f1; f2; ...]`.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_ic: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Integration(_) => EXIT_FAILURE,
        _ => EXIT_INPUT,
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = s.split(',').collect();
    let nums = parts.iter().map(|x| x.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>();
    match nums.as_deref() {
        Ok([a, b]) => Ok((*a, *b)),
        _ => Err(Error::Input(format!("{what} must be 'lo,hi', got '{s}'"))),
    }
}

fn read_file(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

struct Ctx {
    settings: Settings,
    interval: Option<Interval>,
    json: bool,
}

impl Ctx {
    fn interval_for(&self, exprs: &[&Expr], extra: &[f64]) -> Interval {
        self.interval.unwrap_or_else(|| default_interval(exprs, extra))
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig { k_max: self.settings.k_max, tol: self.settings.tol }
    }
}

fn scalar(src: &str) -> Result<Complex, Error> {
    let e = parse(src)?;
    let iv = Interval::new(-1.0, 1.0)?;
    eval(&e, iv)?.into_scalar()
}

/// Runs the tool with explicit output streams and environment lookup.
pub fn run<I, T>(args: I, env_tol: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, env_tol, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_VERIFY
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_tol = std::env::var(config::TOL_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, env_tol.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

fn settings(cli: &Cli, env_tol: Option<&str>) -> Outcome<Settings> {
    let mut s = Settings::default();
    if let Some(path) = &cli.config {
        let c: Config = from_json(&read_file(path)?)?;
        s.apply(&c);
    }
    s.apply_env(env_tol)?;
    Ok(s)
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome<()> {
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

fn emit_dist(ctx: &Ctx, out: &mut dyn Write, d: &Distribution) -> Outcome<()> {
    if ctx.json {
        emit(out, &to_json(&DistributionRecord::from(d))?)
    } else {
        emit(out, &render::distribution(d))
    }
}

fn dispatch(cli: Cli, env_tol: Option<&str>, out: &mut dyn Write) -> Outcome<()> {
    let settings = settings(&cli, env_tol)?;
    let interval = match &cli.interval {
        Some(s) => {
            let (lo, hi) = parse_pair(s, "--interval")?;
            Some(Interval::new(lo, hi)?)
        }
        None => None,
    };
    let mut ctx = Ctx { settings, interval, json: cli.json };
    match cli.cmd {
        Command::Eval { expr, at, pair: phi, support } => {
            ctx.settings.validate()?;
            let e = parse(&expr)?;
            let phi_e = phi.as_deref().map(parse).transpose()?;
            let mut all = vec![&e];
            all.extend(phi_e.as_ref());
            let mut extra = at.clone();
            let support = support.as_deref().map(|s| parse_pair(s, "--support")).transpose()?;
            if let Some((u, v)) = support {
                extra.extend([u, v]);
            }
            let iv = ctx.interval_for(&all, &extra);
            let d = eval(&e, iv)?.into_dist(iv)?;
            emit_dist(&ctx, out, &d)?;
            for t in at {
                let g = d.regular_part();
                let left = g.one_sided_jet(t, Side::Left, 0)?[0];
                let right = g.one_sided_jet(t, Side::Right, 0)?[0];
                emit(out, &format!("at {}: left {} right {}", render::real(t), render::number(left), render::number(right)))?;
            }
            if let (Some(pe), Some((u, v))) = (phi_e, support) {
                let body = eval(&pe, iv)?.into_function(iv)?;
                let phi = TestFunction::cut(&body, u, v)?;
                emit(out, &format!("pairing {}", render::number(pair(&d, &phi)?)))?;
            }
            Ok(())
        }
        Command::Mul { g, f } => {
            ctx.settings.validate()?;
            let (ge, fe) = (parse(&g)?, parse(&f)?);
            if ge.kind()? == Kind::Singular {
                return Err(Error::Type(format!("the coefficient '{g}' must be a piecewise function")).into());
            }
            let iv = ctx.interval_for(&[&ge, &fe], &[]);
            let gv = eval(&ge, iv)?.into_function(iv)?;
            let fv = eval(&fe, iv)?.into_dist(iv)?;
            emit_dist(&ctx, out, &multiply(&gv, &fv)?)
        }
        Command::Diff { f, alpha, k_max } => {
            if let Some(a) = alpha {
                ctx.settings.default_alpha = scalar(&a)?;
            }
            if let Some(k) = k_max {
                ctx.settings.k_max = k;
            }
            ctx.settings.validate()?;
            let fe = parse(&f)?;
            let iv = ctx.interval_for(&[&fe], &[]);
            let fv = eval(&fe, iv)?.into_dist(iv)?;
            let sel = DerivativeSelection {
                k_max: ctx.settings.k_max,
                ..DerivativeSelection::with_alpha(ctx.settings.default_alpha)
            };
            emit_dist(&ctx, out, &derivative_with(&fv, &sel, &ctx.settings.tol)?)
        }
        Command::Prim { f, t0 } => {
            ctx.settings.validate()?;
            let fe = parse(&f)?;
            let iv = ctx.interval_for(&[&fe], &[t0]);
            let fv = eval(&fe, iv)?.into_dist(iv)?;
            emit_dist(&ctx, out, &primitive_with(&fv, t0, &ctx.settings.tol)?)
        }
        Command::Solve { problem, out: path } => {
            ctx.settings.validate()?;
            let p = load_problem(&ctx, &problem)?;
            solve(&ctx, &p, path.as_deref(), out)
        }
        Command::SolveHo { problem, coeff, f, t0, ic, alpha_ic } => {
            ctx.settings.validate()?;
            let p = match problem {
                Some(path) => {
                    let mut rec: HigherOrderRecord = from_json(&read_file(&path)?)?;
                    if rec.interval.is_none() {
                        rec.interval = ctx.interval.map(|iv| [iv.lo, iv.hi]);
                    }
                    rec.to_problem()?
                }
                None => inline_higher_order(&ctx, &coeff, f.as_deref(), t0, &ic, alpha_ic.as_deref())?,
            };
            let s = solve_higher_order_with(&p, &ctx.solver())?;
            if ctx.json {
                return emit(out, &to_json(&HigherOrderSolutionRecord::from(&s))?);
            }
            for k in 0..s.derivatives.len() {
                let m = &s.derivatives[k];
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let name = if k == 0 { "x".to_string() } else { format!("x^({k})") };
                        let idx = if m.rows() * m.cols() == 1 { String::new() } else { format!("[{i},{j}]") };
                        emit(out, &format!("{name}{idx} = {}", render::distribution(m.get(i, j))))?;
                    }
                }
            }
            let mut worst = 0.0f64;
            for (col, bundle) in s.columns.iter().enumerate() {
                let cp = column_problem(&p, &s, col)?;
                let suite = verification_suite(cp.interval(), &problem_sites(&cp)?, ctx.settings.suite_size)?;
                let rep = residual_check_with(&cp, bundle, &suite, RESIDUAL_TOL, &ctx.settings.tol)?;
                worst = worst.max(rep.max_residual);
                if !rep.passed {
                    emit(out, &format!("companion residual {:.3e} (threshold {:.0e}) FAILED", rep.max_residual, RESIDUAL_TOL))?;
                    return Err(Failure::Verify(format!("companion residual {:.3e} exceeds {:.0e}", rep.max_residual, RESIDUAL_TOL)));
                }
            }
            emit(out, &format!("companion residual {worst:.3e} (threshold {RESIDUAL_TOL:.0e}) passed"))
        }
        Command::Verify { problem, eps_grid, suite_size, coords } => {
            if let Some(g) = eps_grid {
                ctx.settings.eps_grid = parse_eps_grid(&g)?;
            }
            if let Some(n) = suite_size {
                ctx.settings.suite_size = n;
            }
            ctx.settings.validate()?;
            let p = load_problem(&ctx, &problem)?;
            let suite = verification_suite(p.interval(), &problem_sites(&p)?, ctx.settings.suite_size)?;
            let fams = families_for(&p, &ctx.settings.eps_grid)?;
            let rep = convergence_report(&p, &fams, &suite)?;
            write!(out, "{}", rep.to_table()).map_err(|e| Failure::Io(e.to_string()))?;
            if let Some(dir) = coords {
                std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
                for t in 0..suite.len() {
                    for c in 0..p.dim() {
                        write_file(&dir.join(format!("phi{t}_x{c}.dat")), &rep.coordinates(t, c))?;
                    }
                }
            }
            let monotone = rep.is_monotone(NOISE_FLOOR, 1, 1);
            let fin = rep.final_max_rel_error();
            emit(out, &format!("monotone {monotone}; final max relative error {fin:.3e}"))?;
            if !monotone {
                return Err(Failure::Verify("errors do not decrease along the eps grid".into()));
            }
            Ok(())
        }
        Command::Kernel { f, site, max_order } => {
            ctx.settings.validate()?;
            let fe = parse(&f)?;
            let iv = ctx.interval_for(&[&fe], &site.into_iter().collect::<Vec<_>>());
            let fv = eval(&fe, iv)?.into_dist(iv)?;
            let sites = match site {
                Some(s) => vec![s],
                None => fv.sites(),
            };
            for s in sites {
                let c = kernel_coefficients_with(&fv, s, max_order, &ctx.settings.tol)?;
                let list: Vec<String> = c.iter().map(|x| render::number(*x)).collect();
                emit(out, &format!("site {}: {}", render::real(s), list.join(", ")))?;
            }
            Ok(())
        }
    }
}

fn problem_sites(p: &CauchyProblem) -> Result<Vec<f64>, Error> {
    let mut sites: Vec<f64> = p.total_forcing()?.iter().flat_map(|d| d.sites()).collect();
    sites.extend(p.a.breakpoints().iter().copied());
    sites.sort_by(f64::total_cmp);
    sites.dedup();
    Ok(sites)
}

fn load_problem(ctx: &Ctx, args: &ProblemArgs) -> Outcome<CauchyProblem> {
    if let Some(path) = &args.problem {
        let mut rec: ProblemRecord = from_json(&read_file(path)?)?;
        if rec.interval.is_none() {
            rec.interval = ctx.interval.map(|iv| [iv.lo, iv.hi]);
        }
        return Ok(rec.to_problem()?);
    }
    let (Some(a), Some(f)) = (&args.a, &args.f) else {
        return Err(Error::Input("give --problem or both --a and --f".into()).into());
    };
    let (ae, fe) = (parse(a)?, parse(f)?);
    let iv = ctx.interval_for(&[&ae, &fe], &[args.t0]);
    let am = eval(&ae, iv)?.into_matrix(iv)?;
    let fv = eval(&fe, iv)?
        .into_vector()?
        .into_iter()
        .map(|v| v.into_dist(iv))
        .collect::<Result<Vec<_>, _>>()?;
    let mut p = CauchyProblem::new(am, fv, args.t0);
    if let Some(x0) = &args.x0 {
        let xs = eval(&parse(x0)?, iv)?
            .into_vector()?
            .into_iter()
            .map(Value::into_scalar)
            .collect::<Result<Vec<_>, _>>()?;
        p = p.with_x0(xs);
    }
    if let Some(a) = &args.alpha_ic {
        p = p.with_alpha_ic(scalar(a)?);
    }
    Ok(p)
}

fn solve(ctx: &Ctx, p: &CauchyProblem, path: Option<&Path>, out: &mut dyn Write) -> Outcome<()> {
    let s = solve_cauchy_with(p, &ctx.solver())?;
    let suite = verification_suite(p.interval(), &problem_sites(p)?, ctx.settings.suite_size)?;
    let rep = residual_check_with(p, &s, &suite, RESIDUAL_TOL, &ctx.settings.tol)?;
    let record = SolutionRecord::new(&s, Some(&rep));
    if let Some(path) = path {
        write_file(path, &to_json(&record)?)?;
    }
    if ctx.json {
        emit(out, &to_json(&record)?)?;
    } else {
        let one = s.x.len() == 1;
        for (i, (x, xp)) in s.x.iter().zip(&s.x_prime).enumerate() {
            let idx = if one { String::new() } else { format!("[{i}]") };
            emit(out, &format!("x{idx} = {}", render::distribution(x)))?;
            emit(out, &format!("x'{idx} = {}", render::distribution(xp)))?;
        }
        let verdict = if rep.passed { "passed" } else { "FAILED" };
        emit(
            out,
            &format!(
                "residual {:.3e} over {} test functions (threshold {:.0e}), derivative certified {}: {verdict}",
                rep.max_residual,
                suite.len(),
                rep.threshold,
                rep.derivative_certified
            ),
        )?;
    }
    if !rep.passed {
        return Err(Failure::Verify(format!("residual {:.3e} exceeds {:.0e}", rep.max_residual, rep.threshold)));
    }
    Ok(())
}

fn inline_higher_order(
    ctx: &Ctx,
    coeff: &[String],
    f: Option<&str>,
    t0: f64,
    ic: &[String],
    alpha_ic: Option<&str>,
) -> Outcome<HigherOrderProblem> {
    let Some(f) = f else {
        return Err(Error::Input("give --problem or --coeff and --f".into()).into());
    };
    if coeff.is_empty() {
        return Err(Error::Input("at least one --coeff is required".into()).into());
    }
    let ce = coeff.iter().map(|c| parse(c)).collect::<Result<Vec<_>, _>>()?;
    let fe = parse(f)?;
    let mut all: Vec<&Expr> = ce.iter().collect();
    all.push(&fe);
    let iv = ctx.interval_for(&all, &[t0]);
    let coeffs = ce.iter().map(|e| eval(e, iv)?.into_matrix(iv)).collect::<Result<Vec<_>, _>>()?;
    let (rows, cols, entries) = eval(&fe, iv)?.into_entries();
    let entries = entries.into_iter().map(|v| v.into_dist(iv)).collect::<Result<Vec<_>, _>>()?;
    let mut p = HigherOrderProblem::new(coeffs, DistMatrix::new(rows, cols, entries)?, t0);
    if !ic.is_empty() {
        if ic.len() != p.order() {
            return Err(Error::Dimension(format!("{} initial values for an order {} equation", ic.len(), p.order())).into());
        }
        p.ics = ic
            .iter()
            .map(|s| {
                let (r, c, e) = eval(&parse(s)?, iv)?.into_entries();
                let vals = e.into_iter().map(Value::into_scalar).collect::<Result<Vec<_>, _>>()?;
                Ok(nalgebra::DMatrix::from_row_slice(r, c, &vals))
            })
            .collect::<Result<Vec<_>, Error>>()?;
    }
    if let Some(a) = alpha_ic {
        p.alpha_ic = scalar(a)?;
    }
    Ok(p)
}

/// First-order problem solved for column `col` of a higher-order problem.
fn column_problem(p: &HigherOrderProblem, s: &crate::cauchy::HigherOrderSolution, col: usize) -> Result<CauchyProblem, Error> {
    let n = p.f.rows();
    let m = p.order();
    let iv = p.f.get(0, 0).interval();
    let mut f = vec![Distribution::zero(iv); n * (m - 1)];
    f.extend(p.f.column(col));
    let x0 = p.ics.iter().flat_map(|x| x.column(col).iter().copied().collect::<Vec<_>>()).collect();
    Ok(CauchyProblem::new(s.companion.clone(), f, p.t0).with_x0(x0).with_alpha_ic(p.alpha_ic))
}
