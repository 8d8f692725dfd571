//! Command-line driver: `solve`, `sweep`, `bifurcation`, `verify-critical`,
//! and `identities`.
//!
//! The driver is a thin shell over the library. Every command first writes a
//! [`RunManifest`] (invocation record) and only then starts numerics, so even
//! a crashed run leaves a reproducible trail. Result payloads contain no
//! timestamps and render floats with 17 significant digits, so rerunning the
//! manifest's argument vector produces byte-identical artifacts.
//!
//! Exit codes: `0` success, `1` numerical failure or a reported finding
//! (non-convergence, identity violation), `2` usage or validation errors.

mod jsonfmt;
mod manifest;

pub use jsonfmt::{fmt_float, Json};
pub use manifest::{manifest_path_for, ManifestParams, RunManifest};

use crate::ball::{beckner_gap, ProblemParams};
use crate::basis::{build_rule, BoundaryFunction};
use crate::error::Error;
use crate::halfspace::{er_residual, reflection_probe, trace_to_halfspace, ProbeSpec};
use crate::identities::{beckner_verify, mean_curvature, pohozaev_report, CriticalFamily};
use crate::solver::{
    find_bifurcation, initial_guess, minimize_quotient, newton_solve, residual_scaled,
    InitStrategy, SolveResult, SolverOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// Everything worked and, where applicable, all checks passed.
pub const EXIT_SUCCESS: i32 = 0;
/// Numerics failed or a check reported a finding.
pub const EXIT_FAILURE: i32 = 1;
/// The invocation itself was invalid.
pub const EXIT_USAGE: i32 = 2;

/// A command failure carrying its exit class.
#[derive(Debug)]
enum Failure {
    /// Invalid invocation, unreadable input, unwritable output: exit 2.
    Usage(String),
    /// Valid invocation, negative outcome: exit 1.
    Numeric(String),
}

type CmdResult = std::result::Result<i32, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Split solver errors into usage-class (bad parameters) and numeric-class
/// (legitimate failures of a well-posed run).
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidDimension(_)
        | Error::InvalidParameters { .. }
        | Error::SupercriticalExponent { .. }
        | Error::TruncationTooLarge { .. } => Failure::Usage(e.to_string()),
        other => Failure::Numeric(other.to_string()),
    }
}

/// Spectral solver for a nonlinear Steklov boundary problem on the unit ball.
#[derive(Debug, Parser)]
#[command(name = "steklov", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the boundary equation at fixed parameters.
    Solve(SolveArgs),
    /// Quotient-minimization sweep over a grid of `a` values.
    Sweep(SweepArgs),
    /// Locate the symmetry-breaking threshold `a*` by bisection.
    Bifurcation(BifurcationArgs),
    /// Check the explicit critical-pair solution family end to end.
    VerifyCritical(VerifyCriticalArgs),
    /// Randomized inequality verification and solution identity checks.
    Identities(IdentitiesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitKind {
    /// The exact constant solution.
    Constant,
    /// Constant with a seeded random decaying perturbation.
    PerturbedConstant,
    /// Constant plus a first-mode offset.
    Mode1,
    /// Trace loaded from `--init-file`.
    File,
}

impl InitKind {
    fn strategy(self) -> InitStrategy {
        match self {
            InitKind::Constant => InitStrategy::Constant,
            InitKind::PerturbedConstant => InitStrategy::PerturbedConstant,
            InitKind::Mode1 => InitStrategy::Mode1,
            InitKind::File => unreachable!("file initialization is handled separately"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodKind {
    /// Damped Newton iteration on the coefficient-space residual.
    Newton,
    /// Projected gradient descent on the Rayleigh-type quotient, then a
    /// Newton polish.
    Minimize,
}

fn enum_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Ambient dimension of the ball (n >= 3).
    #[arg(long)]
    n: u32,
    /// Nonlinearity exponent, 1 < q <= n/(n-2).
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Linear boundary coefficient, a > 0.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Truncation degree of the coefficient space.
    #[arg(long = "L", default_value_t = 64)]
    l: usize,
    /// Quadrature node count (default: the dealiased 2L + 2).
    #[arg(long)]
    m: Option<usize>,
    /// Convergence tolerance on the residual norm.
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Seed for randomized initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial iterate.
    #[arg(long, value_enum, default_value_t = InitKind::Constant)]
    init: InitKind,
    /// Trace file for `--init file`: either a previous result JSON or a bare
    /// object with fields "n" and "coeffs".
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Solution method.
    #[arg(long, value_enum, default_value_t = MethodKind::Newton)]
    method: MethodKind,
    /// Output path for the result JSON (the manifest lands next to it).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Ambient dimension of the ball (n >= 3).
    #[arg(long)]
    n: u32,
    /// Nonlinearity exponent, strictly subcritical.
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Smallest boundary coefficient in the grid.
    #[arg(long, allow_negative_numbers = true)]
    a_min: f64,
    /// Largest boundary coefficient in the grid.
    #[arg(long, allow_negative_numbers = true)]
    a_max: f64,
    /// Number of grid points (endpoints included).
    #[arg(long)]
    steps: usize,
    /// Independent random initializations per grid point.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Truncation degree of the coefficient space.
    #[arg(long = "L", default_value_t = 64)]
    l: usize,
    /// Quadrature node count (default: the dealiased 2L + 2).
    #[arg(long)]
    m: Option<usize>,
    /// Convergence tolerance on the residual norm.
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Base seed; cell j of every grid point uses seed + j.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (cells are independent; output order is fixed).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output path for the CSV table.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BifurcationArgs {
    /// Ambient dimension of the ball (n >= 3).
    #[arg(long)]
    n: u32,
    /// Nonlinearity exponent (q > 1).
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Lower end of the bisection bracket.
    #[arg(long, allow_negative_numbers = true)]
    a_min: f64,
    /// Upper end of the bisection bracket.
    #[arg(long, allow_negative_numbers = true)]
    a_max: f64,
    /// Optional output path for a JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyCriticalArgs {
    /// Ambient dimension of the ball (n >= 3).
    #[arg(long)]
    n: u32,
    /// Family parameter in [0, 1); 0 is the constant member.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    s: f64,
    /// Truncation degree of the coefficient space.
    #[arg(long = "L", default_value_t = 64)]
    l: usize,
    /// Quadrature node count (default: the dealiased 2L + 2).
    #[arg(long)]
    m: Option<usize>,
    /// Seed for the reflection probe's sampling plan.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional output path for a JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IdentitiesArgs {
    /// Ambient dimension of the ball (n >= 3).
    #[arg(long)]
    n: u32,
    /// Nonlinearity exponent used for the inequality gap.
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Boundary coefficient (enters only through parameter validation).
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    a: f64,
    /// Number of random traces to test.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed for the random traces.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional result JSON whose stored solution gets a flux-identity check.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Optional output path for a JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `argv` (binary path first) and run the selected command, returning
/// the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(&argv, args),
        Command::Sweep(args) => cmd_sweep(&argv, args),
        Command::Bifurcation(args) => cmd_bifurcation(&argv, args),
        Command::VerifyCritical(args) => cmd_verify_critical(&argv, args),
        Command::Identities(args) => cmd_identities(&argv, args),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

/// Write the manifest for a command; `out` is the primary artifact (absent
/// for report-only commands, which get `steklov-<command>.manifest.json` in
/// the working directory).
fn write_manifest(
    command: &str,
    argv: &[String],
    params: ManifestParams,
    out: Option<&Path>,
) -> std::result::Result<PathBuf, Failure> {
    let path = match out {
        Some(artifact) => manifest_path_for(artifact),
        None => PathBuf::from(format!("steklov-{command}.manifest.json")),
    };
    let outputs: Vec<&Path> = out.into_iter().collect();
    RunManifest::new(command, argv.to_vec(), params, &outputs)
        .write(&path)
        .map_err(|e| Failure::Usage(format!("cannot write manifest {}: {e}", path.display())))?;
    Ok(path)
}

fn write_text(path: &Path, body: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, body)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// `Ok` becomes a number, `Err` renders as JSON `null` (via the non-finite
/// rule) so one failed diagnostic never hides the others.
fn opt_num(value: Option<f64>) -> Json {
    Json::Num(value.unwrap_or(f64::NAN))
}

/// Float formatting for CSV cells: lossless like the JSON rule, but CSV has
/// no `null`, so non-finite values print as `NaN`.
fn csv_float(v: f64) -> String {
    if v.is_finite() {
        fmt_float(v)
    } else {
        "NaN".to_string()
    }
}

/// Deterministic boundary radii for transformed-equation residual checks:
/// log-uniform in [0.1, 10] (the image of most of the sphere).
fn er_residual_max(f: &BoundaryFunction, params: &ProblemParams, count: usize) -> f64 {
    let len = params.n() as usize - 1;
    let mut worst = 0.0f64;
    for k in 0..count {
        let frac = k as f64 / (count.max(2) - 1) as f64;
        let r = 10f64.powf(2.0 * frac - 1.0);
        let mut x_prime = vec![0.0; len];
        x_prime[0] = r;
        match er_residual(f, params, &x_prime) {
            Ok(v) => worst = worst.max(v.abs()),
            Err(_) => return f64::NAN,
        }
    }
    worst
}

fn solution_json(f: &BoundaryFunction) -> Json {
    Json::Obj(vec![
        ("n", Json::Int(f.geom.n as i64)),
        ("coeffs", Json::floats(&f.coeffs)),
    ])
}

fn identity_checks_json(f: &BoundaryFunction, params: &ProblemParams, m: usize) -> Json {
    let report = build_rule(params.n(), m)
        .and_then(|rule| pohozaev_report(f, params, &rule))
        .ok();
    let gap = beckner_gap(f, params.q).ok();
    Json::Obj(vec![
        ("pohozaev_raw", opt_num(report.map(|p| p.raw))),
        ("pohozaev_scaled", opt_num(report.map(|p| p.scaled))),
        ("beckner_gap", opt_num(gap)),
        ("er_residual_max", Json::Num(er_residual_max(f, params, 32))),
    ])
}

/// Trace file contents: the trace plus any stored problem parameters.
struct StoredTrace {
    f: BoundaryFunction,
    a: Option<f64>,
    q: Option<f64>,
}

/// Read a trace from disk: either a full result JSON (fields `a`, `q`,
/// `solution: {n, coeffs}`) or a bare `{n, coeffs}` object.
fn read_trace_file(path: &Path) -> std::result::Result<StoredTrace, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let val: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is not JSON: {e}", path.display())))?;
    let obj = val.get("solution").unwrap_or(&val);
    let n = obj
        .get("n")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Failure::Usage(format!("{}: missing integer field \"n\"", path.display())))?
        as u32;
    let coeffs: Vec<f64> = obj
        .get("coeffs")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| {
            Failure::Usage(format!("{}: missing array field \"coeffs\"", path.display()))
        })?
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                Failure::Usage(format!("{}: non-numeric coefficient", path.display()))
            })
        })
        .collect::<std::result::Result<_, _>>()?;
    let f = BoundaryFunction::new(n, coeffs).map_err(usage)?;
    Ok(StoredTrace {
        f,
        a: val.get("a").and_then(serde_json::Value::as_f64),
        q: val.get("q").and_then(serde_json::Value::as_f64),
    })
}

fn solve_document(args: &SolveArgs, m: usize, params: &ProblemParams, res: &SolveResult) -> Json {
    Json::Obj(vec![
        ("command", Json::Str("solve".to_string())),
        ("n", Json::Int(args.n as i64)),
        ("q", Json::Num(args.q)),
        ("a", Json::Num(args.a)),
        ("L", Json::Int(args.l as i64)),
        ("m", Json::Int(m as i64)),
        ("tol", Json::Num(args.tol)),
        ("seed", Json::Int(args.seed as i64)),
        ("init", Json::Str(enum_name(args.init))),
        ("method", Json::Str(enum_name(args.method))),
        ("converged", Json::Bool(res.converged)),
        ("iterations", Json::Int(res.iterations as i64)),
        ("residual_norm", Json::Num(res.residual_norm)),
        (
            "residual_scaled",
            opt_num(residual_scaled(&res.solution, params).ok()),
        ),
        ("multiplier", Json::Num(res.multiplier)),
        ("quotient_value", Json::Num(res.quotient_value)),
        ("amplitude", Json::Num(res.solution.amplitude())),
        ("mean_value", Json::Num(res.solution.mean_value())),
        (
            "min_eigenvalue",
            opt_num(res.spectrum.first().copied()),
        ),
        ("spectrum", Json::floats(&res.spectrum)),
        (
            "identity_checks",
            identity_checks_json(&res.solution, params, m),
        ),
        ("solution", solution_json(&res.solution)),
    ])
}

fn cmd_solve(argv: &[String], args: &SolveArgs) -> CmdResult {
    let params = ProblemParams::new(args.n, args.a, args.q).map_err(usage)?;
    params.require_subcritical_or_critical().map_err(usage)?;
    if args.method == MethodKind::Minimize && args.q >= params.q_crit() - 1e-12 {
        return Err(Failure::Usage(format!(
            "--method minimize needs a strictly subcritical exponent, got q = {} with critical value {}",
            args.q,
            params.q_crit()
        )));
    }
    let m = args.m.unwrap_or(2 * args.l + 2);
    if m < args.l + 1 {
        return Err(Failure::Usage(format!(
            "--m {m} is below L + 1 = {}",
            args.l + 1
        )));
    }
    if args.init == InitKind::File && args.init_file.is_none() {
        return Err(Failure::Usage(
            "--init file needs --init-file <path>".to_string(),
        ));
    }
    if args.init != InitKind::File && args.init_file.is_some() {
        return Err(Failure::Usage(
            "--init-file only applies with --init file".to_string(),
        ));
    }

    let f0 = match args.init {
        InitKind::File => {
            let stored = read_trace_file(args.init_file.as_ref().expect("checked above"))?;
            if stored.f.geom.n != args.n {
                return Err(Failure::Usage(format!(
                    "initial trace has n = {}, expected n = {}",
                    stored.f.geom.n, args.n
                )));
            }
            stored.f.resized(args.l)
        }
        kind => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            initial_guess(&params, args.l, kind.strategy(), &mut rng)
        }
    };

    write_manifest(
        "solve",
        argv,
        ManifestParams {
            n: Some(args.n),
            q: Some(args.q),
            a: Some(args.a),
            l: Some(args.l),
            m: Some(m),
            tol: Some(args.tol),
            seed: Some(args.seed),
            init: Some(enum_name(args.init)),
            method: Some(enum_name(args.method)),
            ..ManifestParams::default()
        },
        Some(&args.out),
    )?;

    let opts = SolverOptions {
        truncation: args.l,
        node_count: Some(m),
        tol: args.tol,
        max_iter: 200,
        damping: 0.5,
        seed: args.seed,
    };
    let outcome = match args.method {
        MethodKind::Newton => newton_solve(&f0, &params, &opts),
        MethodKind::Minimize => minimize_quotient(&f0, &params, &opts),
    };

    match outcome {
        Ok(res) => {
            write_text(&args.out, &solve_document(args, m, &params, &res).render())?;
            println!(
                "solve: n={} q={} a={} converged={} iterations={} residual={:.3e} amplitude={:.6e} -> {}",
                args.n,
                args.q,
                args.a,
                res.converged,
                res.iterations,
                res.residual_norm,
                res.solution.amplitude(),
                args.out.display()
            );
            if res.converged {
                Ok(EXIT_SUCCESS)
            } else {
                Err(Failure::Numeric(format!(
                    "no convergence after {} iterations (residual {:.3e}); diagnostics in {}",
                    res.iterations,
                    res.residual_norm,
                    args.out.display()
                )))
            }
        }
        Err(e) => {
            // Leave a parseable artifact describing the failure.
            let doc = Json::Obj(vec![
                ("command", Json::Str("solve".to_string())),
                ("n", Json::Int(args.n as i64)),
                ("q", Json::Num(args.q)),
                ("a", Json::Num(args.a)),
                ("converged", Json::Bool(false)),
                ("error", Json::Str(e.to_string())),
            ]);
            write_text(&args.out, &doc.render())?;
            Err(classify(e))
        }
    }
}

/// Grid point `i` of `steps` equally spaced values over `[a_min, a_max]`.
fn linspace(a_min: f64, a_max: f64, steps: usize, i: usize) -> f64 {
    if steps <= 1 {
        a_min
    } else {
        a_min + (a_max - a_min) * i as f64 / (steps - 1) as f64
    }
}

const SWEEP_HEADER: &str =
    "a,q,n,converged,amplitude,quotient_value,min_eigenvalue,residual_norm,pohozaev_scaled,beckner_min_gap";

/// One sweep cell: quotient minimization from a seeded perturbed constant,
/// plus identity diagnostics. Pure function of its arguments, so rows are
/// reproducible regardless of the worker count.
fn sweep_cell(n: u32, q: f64, a: f64, l: usize, m: usize, tol: f64, cell_seed: u64) -> (bool, String) {
    let fail_row = |msg: &str| {
        let nan = "NaN";
        (
            false,
            format!(
                "{},{},{},false,{nan},{nan},{nan},{nan},{nan},{msg}",
                csv_float(a),
                csv_float(q),
                n
            ),
        )
    };
    let Ok(params) = ProblemParams::new(n, a, q) else {
        return fail_row("NaN");
    };
    let opts = SolverOptions {
        truncation: l,
        node_count: Some(m),
        tol,
        max_iter: 200,
        damping: 0.5,
        seed: cell_seed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
    let f0 = initial_guess(&params, l, InitStrategy::PerturbedConstant, &mut rng);
    match minimize_quotient(&f0, &params, &opts) {
        Ok(res) => {
            let pohozaev = build_rule(n, m)
                .and_then(|rule| pohozaev_report(&res.solution, &params, &rule))
                .map(|p| p.scaled)
                .unwrap_or(f64::NAN);
            let gap = beckner_gap(&res.solution, q).unwrap_or(f64::NAN);
            let row = format!(
                "{},{},{},{},{},{},{},{},{},{}",
                csv_float(a),
                csv_float(q),
                n,
                res.converged,
                csv_float(res.solution.amplitude()),
                csv_float(res.quotient_value),
                csv_float(res.spectrum.first().copied().unwrap_or(f64::NAN)),
                csv_float(res.residual_norm),
                csv_float(pohozaev),
                csv_float(gap)
            );
            (res.converged, row)
        }
        Err(_) => fail_row("NaN"),
    }
}

fn cmd_sweep(argv: &[String], args: &SweepArgs) -> CmdResult {
    let params_lo = ProblemParams::new(args.n, args.a_min, args.q).map_err(usage)?;
    ProblemParams::new(args.n, args.a_max, args.q).map_err(usage)?;
    if args.a_max < args.a_min {
        return Err(Failure::Usage(format!(
            "--a-max {} is below --a-min {}",
            args.a_max, args.a_min
        )));
    }
    if args.q >= params_lo.q_crit() - 1e-12 {
        return Err(Failure::Usage(format!(
            "sweep minimizes the quotient and needs a strictly subcritical exponent, got q = {} with critical value {}",
            args.q,
            params_lo.q_crit()
        )));
    }
    if args.steps == 0 || args.seeds == 0 {
        return Err(Failure::Usage(
            "--steps and --seeds must be positive".to_string(),
        ));
    }
    if args.jobs == 0 {
        return Err(Failure::Usage("--jobs must be positive".to_string()));
    }
    let m = args.m.unwrap_or(2 * args.l + 2);
    if m < args.l + 1 {
        return Err(Failure::Usage(format!(
            "--m {m} is below L + 1 = {}",
            args.l + 1
        )));
    }

    write_manifest(
        "sweep",
        argv,
        ManifestParams {
            n: Some(args.n),
            q: Some(args.q),
            a_min: Some(args.a_min),
            a_max: Some(args.a_max),
            steps: Some(args.steps),
            seeds: Some(args.seeds),
            l: Some(args.l),
            m: Some(m),
            tol: Some(args.tol),
            seed: Some(args.seed),
            jobs: Some(args.jobs),
            ..ManifestParams::default()
        },
        Some(&args.out),
    )?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot build worker pool: {e}")))?;
    let (n, q, l, tol) = (args.n, args.q, args.l, args.tol);
    let (a_min, a_max, steps, seeds, seed) = (args.a_min, args.a_max, args.steps, args.seeds, args.seed);
    let cells: Vec<(bool, String)> = pool.install(|| {
        (0..steps * seeds)
            .into_par_iter()
            .map(|idx| {
                let a = linspace(a_min, a_max, steps, idx / seeds);
                let cell_seed = seed + (idx % seeds) as u64;
                sweep_cell(n, q, a, l, m, tol, cell_seed)
            })
            .collect()
    });

    let mut body = String::from(SWEEP_HEADER);
    body.push('\n');
    let mut converged = 0usize;
    for (ok, row) in &cells {
        converged += usize::from(*ok);
        body.push_str(row);
        body.push('\n');
    }
    write_text(&args.out, &body)?;

    let total = cells.len();
    println!(
        "sweep: {converged}/{total} cells converged -> {}",
        args.out.display()
    );
    if converged * 10 >= total * 9 {
        Ok(EXIT_SUCCESS)
    } else {
        Err(Failure::Numeric(format!(
            "only {converged}/{total} cells converged (below the 90% bar)"
        )))
    }
}

fn cmd_bifurcation(argv: &[String], args: &BifurcationArgs) -> CmdResult {
    ProblemParams::new(args.n, args.a_min.max(f64::MIN_POSITIVE), args.q).map_err(usage)?;
    if !(args.a_min > 0.0 && args.a_max > args.a_min) {
        return Err(Failure::Usage(format!(
            "need 0 < --a-min < --a-max, got [{}, {}]",
            args.a_min, args.a_max
        )));
    }

    write_manifest(
        "bifurcation",
        argv,
        ManifestParams {
            n: Some(args.n),
            q: Some(args.q),
            a_min: Some(args.a_min),
            a_max: Some(args.a_max),
            ..ManifestParams::default()
        },
        args.out.as_deref(),
    )?;

    let a_star = find_bifurcation(args.n, args.q, (args.a_min, args.a_max)).map_err(classify)?;
    let closed_form = 1.0 / (args.q - 1.0);
    let deviation = (a_star - closed_form).abs();
    println!(
        "bifurcation: n={} q={} a* = {:.12e} closed form 1/(q-1) = {:.12e} deviation = {:.3e}",
        args.n, args.q, a_star, closed_form, deviation
    );
    if let Some(out) = &args.out {
        let doc = Json::Obj(vec![
            ("command", Json::Str("bifurcation".to_string())),
            ("n", Json::Int(args.n as i64)),
            ("q", Json::Num(args.q)),
            ("a_min", Json::Num(args.a_min)),
            ("a_max", Json::Num(args.a_max)),
            ("a_star", Json::Num(a_star)),
            ("closed_form", Json::Num(closed_form)),
            ("deviation", Json::Num(deviation)),
        ]);
        write_text(out, &doc.render())?;
    }
    Ok(EXIT_SUCCESS)
}

fn cmd_verify_critical(argv: &[String], args: &VerifyCriticalArgs) -> CmdResult {
    let family = CriticalFamily::new(args.n, args.s).map_err(usage)?;
    let m = args.m.unwrap_or(2 * args.l + 2);
    if m < args.l + 1 {
        return Err(Failure::Usage(format!(
            "--m {m} is below L + 1 = {}",
            args.l + 1
        )));
    }
    let tail = family.truncation_tail(args.l);
    if tail > 1e-14 {
        eprintln!(
            "warning: coefficient tail s^(L+1) = {tail:.3e} exceeds 1e-14; raise --L for full accuracy"
        );
    }

    write_manifest(
        "verify-critical",
        argv,
        ManifestParams {
            n: Some(args.n),
            s: Some(args.s),
            l: Some(args.l),
            m: Some(m),
            seed: Some(args.seed),
            ..ManifestParams::default()
        },
        args.out.as_deref(),
    )?;

    let params = family.params();
    let f = family.trace(args.l);

    let res_scaled = residual_scaled(&f, &params).map_err(classify)?;
    let rule = build_rule(args.n, m).map_err(classify)?;
    let pohozaev = pohozaev_report(&f, &params, &rule).map_err(classify)?;
    let er_max = er_residual_max(&f, &params, 100);
    let gap = beckner_gap(&f, params.q).map_err(classify)?;
    let curvature_dev = (0..=32)
        .map(|i| -1.0 + i as f64 / 16.0)
        .map(|t| {
            mean_curvature(&f, &params, t)
                .map(|h| (h - 1.0).abs())
                .unwrap_or(f64::NAN)
        })
        .fold(0.0f64, f64::max);

    let spec = ProbeSpec {
        seed: args.seed,
        ..ProbeSpec::default()
    };
    let v = |x: &crate::halfspace::HalfSpacePoint| trace_to_halfspace(&f, x).unwrap_or(f64::NAN);
    let mut reflections = Vec::new();
    for lambda in [0.25, 1.0, 4.0] {
        let probe = reflection_probe(&v, lambda, &spec, args.n).map_err(classify)?;
        reflections.push((lambda, probe.min_difference));
    }

    let checks: Vec<(&str, f64, f64, bool)> = {
        let mut list = vec![
            ("residual_scaled", res_scaled, 1e-8, res_scaled <= 1e-8),
            (
                "pohozaev_scaled",
                pohozaev.scaled,
                1e-8,
                pohozaev.scaled.abs() <= 1e-8,
            ),
            ("er_residual_max", er_max, 1e-6, er_max <= 1e-6),
            ("beckner_gap", gap, -1e-10, gap >= -1e-10),
            (
                "mean_curvature_max_deviation",
                curvature_dev,
                1e-8,
                curvature_dev <= 1e-8,
            ),
        ];
        let names = [
            "reflection_min[lambda=0.25]",
            "reflection_min[lambda=1]",
            "reflection_min[lambda=4]",
        ];
        for (name, &(_, min_diff)) in names.iter().zip(&reflections) {
            list.push((name, min_diff, -1e-10, min_diff >= -1e-10));
        }
        list
    };

    let mut all_pass = true;
    for (name, value, bound, pass) in &checks {
        all_pass &= *pass;
        println!(
            "verify-critical: {name} = {value:.6e} (bound {bound:.1e}) {}",
            if *pass { "pass" } else { "FAIL" }
        );
    }

    if let Some(out) = &args.out {
        let reflection_json = Json::Arr(
            reflections
                .iter()
                .map(|&(lambda, min_diff)| {
                    Json::Obj(vec![
                        ("lambda", Json::Num(lambda)),
                        ("min_difference", Json::Num(min_diff)),
                    ])
                })
                .collect(),
        );
        let doc = Json::Obj(vec![
            ("command", Json::Str("verify-critical".to_string())),
            ("n", Json::Int(args.n as i64)),
            ("s", Json::Num(args.s)),
            ("L", Json::Int(args.l as i64)),
            ("m", Json::Int(m as i64)),
            ("a", Json::Num(params.a)),
            ("q", Json::Num(params.q)),
            ("truncation_tail", Json::Num(tail)),
            ("residual_scaled", Json::Num(res_scaled)),
            ("pohozaev_raw", Json::Num(pohozaev.raw)),
            ("pohozaev_scaled", Json::Num(pohozaev.scaled)),
            ("er_residual_max", Json::Num(er_max)),
            ("beckner_gap", Json::Num(gap)),
            ("mean_curvature_max_deviation", Json::Num(curvature_dev)),
            ("reflection", reflection_json),
            ("passed", Json::Bool(all_pass)),
            ("solution", solution_json(&f)),
        ]);
        write_text(out, &doc.render())?;
    }

    if all_pass {
        Ok(EXIT_SUCCESS)
    } else {
        Err(Failure::Numeric(
            "one or more critical-family checks failed".to_string(),
        ))
    }
}

fn cmd_identities(argv: &[String], args: &IdentitiesArgs) -> CmdResult {
    let params = ProblemParams::new(args.n, args.a, args.q).map_err(usage)?;
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".to_string()));
    }
    // Read the stored solution before numerics so a bad path exits early.
    let stored = match &args.input {
        Some(path) => Some((path.clone(), read_trace_file(path)?)),
        None => None,
    };

    write_manifest(
        "identities",
        argv,
        ManifestParams {
            n: Some(args.n),
            q: Some(args.q),
            a: Some(args.a),
            trials: Some(args.trials),
            seed: Some(args.seed),
            ..ManifestParams::default()
        },
        args.out.as_deref(),
    )?;

    let report = beckner_verify(&params, args.trials, args.seed).map_err(classify)?;
    let beckner_pass = report.min_gap >= -1e-10;
    println!(
        "identities: beckner min gap = {:.6e} (trial {}) max gap = {:.6e} over {} trials {}",
        report.min_gap,
        report.min_gap_trial,
        report.max_gap,
        report.trials,
        if beckner_pass { "pass" } else { "FAIL" }
    );

    let mut kws_json = None;
    let mut kws_pass = true;
    if let Some((path, stored)) = &stored {
        let file_params = ProblemParams::new(
            stored.f.geom.n,
            stored.a.unwrap_or(args.a),
            stored.q.unwrap_or(args.q),
        )
        .map_err(usage)?;
        let rule = build_rule(file_params.n(), 2 * stored.f.truncation() + 2).map_err(classify)?;
        let flux = pohozaev_report(&stored.f, &file_params, &rule).map_err(classify)?;
        kws_pass = flux.scaled.abs() <= 1e-6;
        println!(
            "identities: pohozaev scaled = {:.6e} on {} {}",
            flux.scaled,
            path.display(),
            if kws_pass { "pass" } else { "FAIL" }
        );
        kws_json = Some(Json::Obj(vec![
            ("file", Json::Str(path.display().to_string())),
            ("a", Json::Num(file_params.a)),
            ("q", Json::Num(file_params.q)),
            ("pohozaev_raw", Json::Num(flux.raw)),
            ("pohozaev_scaled", Json::Num(flux.scaled)),
            ("passed", Json::Bool(kws_pass)),
        ]));
    }

    let all_pass = beckner_pass && kws_pass;
    if let Some(out) = &args.out {
        let mut fields = vec![
            ("command", Json::Str("identities".to_string())),
            ("n", Json::Int(args.n as i64)),
            ("q", Json::Num(args.q)),
            ("a", Json::Num(args.a)),
            ("trials", Json::Int(args.trials as i64)),
            ("seed", Json::Int(args.seed as i64)),
            (
                "beckner",
                Json::Obj(vec![
                    ("min_gap", Json::Num(report.min_gap)),
                    ("min_gap_trial", Json::Int(report.min_gap_trial as i64)),
                    ("max_gap", Json::Num(report.max_gap)),
                    ("passed", Json::Bool(beckner_pass)),
                ]),
            ),
        ];
        if let Some(kws) = kws_json {
            fields.push(("kazdan_warner", kws));
        }
        fields.push(("passed", Json::Bool(all_pass)));
        write_text(out, &Json::Obj(fields).render())?;
    }

    if all_pass {
        Ok(EXIT_SUCCESS)
    } else {
        Err(Failure::Numeric(
            "identity checks reported a violation".to_string(),
        ))
    }
}
