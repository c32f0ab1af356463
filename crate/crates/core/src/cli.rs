//! Command-line front end.
//!
//! Every command writes one JSON [`RunRecord`] (or CSV for sweeps) to the
//! output stream and returns a process exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success / POVM certified optimal          |
//! | 1    | validation failure                        |
//! | 2    | unreadable file or malformed input        |
//! | 3    | infeasible inconclusive-rate target       |
//! | 4    | singular average state                    |
//! | 5    | POVM not certified optimal                |

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::max_relative_success;
use crate::certificate::{self, Certificate, DEFAULT_TOL_EXTREMAL, DEFAULT_TOL_POSITIVITY};
use crate::ensemble::{symmetric_qubit_pair, StateEnsemble};
use crate::io::{self, EnsembleFile, FormatError, PovmFile};
use crate::qubit_analytic::{analytic_povm, envelope_prs, phi_for_pi, SymmetricQubitProblem};
use crate::solver::{self, Acceleration, SolveResult, SolverConfig};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;
pub const EXIT_NOT_OPTIMAL: i32 = 5;

/// Header of the sweep CSV.
pub const TRADEOFF_HEADER: [&str; 7] = [
    "pi",
    "ps",
    "prs",
    "iterations",
    "residual",
    "certified",
    "status",
];

#[derive(Debug, Parser)]
#[command(
    name = "povmlab",
    version,
    about = "Optimal POVMs for discriminating mixed states with a fixed inconclusive rate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an ensemble file and report every violation.
    Validate { ensemble: PathBuf },
    /// Optimal POVM at one inconclusive rate.
    Solve {
        ensemble: PathBuf,
        /// Target inconclusive rate P_I in [0, 1).
        #[arg(long)]
        pi: f64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Include the POVM elements in the output.
        #[arg(long)]
        emit_povm: bool,
    },
    /// Sweep P_I over a grid and write CSV.
    Tradeoff {
        ensemble: PathBuf,
        /// `start:stop:steps`, endpoints included.
        #[arg(long)]
        pi_grid: PiGrid,
        #[command(flatten)]
        solver: SolverArgs,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Maximal relative success rate over all inconclusive rates.
    Bound { ensemble: PathBuf },
    /// Check a candidate POVM for optimality.
    Certify {
        ensemble: PathBuf,
        povm: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL_EXTREMAL)]
        tol_extremal: f64,
        #[arg(long, default_value_t = DEFAULT_TOL_POSITIVITY)]
        tol_positivity: f64,
    },
    /// Trade-off curves of the symmetric mixed-qubit pair, numeric next to
    /// the closed form, as CSV.
    Fig1 {
        #[arg(long, value_delimiter = ',', default_values_t = [0.7, 0.8, 0.9, 1.0])]
        eta: Vec<f64>,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
        #[arg(long, default_value = "0:0.9:25")]
        pi_grid: PiGrid,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the symmetric mixed-qubit pair as an ensemble file.
    Pair {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
    },
    /// Write the closed-form POVM of the symmetric pair as a POVM file.
    AnalyticPovm {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
        /// Angle of the conclusive directions, in [pi/2, pi).
        #[arg(long, conflicts_with = "pi", required_unless_present = "pi")]
        phi: Option<f64>,
        /// Pick the angle that gives this inconclusive rate.
        #[arg(long)]
        pi: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum AccelerationArg {
    #[default]
    None,
    Squarem,
}

#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    /// Stop when no POVM element changes by more than this in one sweep.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = crate::hermitian::DEFAULT_PINV_CUTOFF)]
    pub pinv_cutoff: f64,
    #[arg(long, value_enum, default_value_t = AccelerationArg::None)]
    pub accelerate: AccelerationArg,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            max_iterations: self.max_iter,
            povm_tolerance: self.tol,
            pinv_cutoff: self.pinv_cutoff,
            acceleration: match self.accelerate {
                AccelerationArg::None => Acceleration::None,
                AccelerationArg::Squarem => Acceleration::Squarem,
            },
            ..SolverConfig::default()
        }
    }
}

/// `start:stop:steps`; `steps` evenly spaced points including both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl FromStr for PiGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts[..] else {
            return Err(format!("expected start:stop:steps, got {s:?}"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let grid = PiGrid {
            start: num(start)?,
            stop: num(stop)?,
            steps: steps
                .trim()
                .parse()
                .map_err(|e| format!("{steps:?}: {e}"))?,
        };
        if grid.steps == 0 {
            return Err("steps must be >= 1".into());
        }
        for x in [grid.start, grid.stop] {
            if !(0.0..1.0).contains(&x) {
                return Err(format!("grid endpoints must lie in [0, 1), got {x}"));
            }
        }
        if grid.stop < grid.start {
            return Err("stop must be >= start".into());
        }
        Ok(grid)
    }
}

impl PiGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + h * k as f64
                }
            })
            .collect()
    }
}

/// Self-describing record of one command invocation.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    /// SHA-256 of every input file, keyed by role.
    pub input_digest: BTreeMap<String, String>,
    pub config: Value,
    pub result: Value,
    pub duration_seconds: f64,
    pub iterations: Option<usize>,
}

struct Recorder {
    command: &'static str,
    started: Instant,
    inputs: BTreeMap<String, String>,
    config: Value,
}

impl Recorder {
    fn new(command: &'static str, config: Value) -> Self {
        Self {
            command,
            started: Instant::now(),
            inputs: BTreeMap::new(),
            config,
        }
    }

    fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = io::read_bytes(path)?;
        self.inputs.insert(role.to_string(), io::digest(&bytes));
        Ok(bytes)
    }

    fn finish(&self, result: Value, iterations: Option<usize>) -> RunRecord {
        RunRecord {
            command: self.command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: self.inputs.clone(),
            config: self.config.clone(),
            result,
            duration_seconds: self.started.elapsed().as_secs_f64(),
            iterations,
        }
    }
}

/// A command that did not succeed: exit code, diagnostic, and an optional
/// record still worth printing.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub record: Option<Box<RunRecord>>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            record: None,
        }
    }

    fn with_record(mut self, record: RunRecord) -> Self {
        self.record = Some(Box::new(record));
        self
    }
}

/// Exit code for a numerical error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InfeasibleTarget { .. } => EXIT_INFEASIBLE,
        Error::SingularAverageState(_) => EXIT_SINGULAR,
        _ => EXIT_VALIDATION,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(exit_code(&err), err.to_string())
    }
}

impl From<FormatError> for Failure {
    fn from(err: FormatError) -> Self {
        match err {
            FormatError::Content(e) => e.into(),
            other => Failure::new(EXIT_PARSE, other.to_string()),
        }
    }
}

fn json_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn load_ensemble(rec: &mut Recorder, path: &Path) -> Result<StateEnsemble, Failure> {
    let bytes = rec.read("ensemble", path)?;
    Ok(io::parse_ensemble(&bytes)?.to_ensemble()?)
}

/// Parses the arguments and runs. Returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match cli.command {
        Command::Validate { ensemble } => cmd_validate(&ensemble).map(Output::Record),
        Command::Solve {
            ensemble,
            pi,
            solver,
            emit_povm,
        } => cmd_solve(&ensemble, pi, &solver.config(), emit_povm).map(Output::Record),
        Command::Tradeoff {
            ensemble,
            pi_grid,
            solver,
            jobs,
        } => cmd_tradeoff(&ensemble, &pi_grid, &solver.config(), jobs).map(Output::Text),
        Command::Bound { ensemble } => cmd_bound(&ensemble).map(Output::Record),
        Command::Certify {
            ensemble,
            povm,
            tol_extremal,
            tol_positivity,
        } => cmd_certify(&ensemble, &povm, tol_extremal, tol_positivity).map(Output::Record),
        Command::Fig1 {
            eta,
            theta,
            pi_grid,
            solver,
            jobs,
        } => cmd_fig1(&eta, theta, &pi_grid, &solver.config(), jobs).map(Output::Text),
        Command::Pair { eta, theta } => cmd_pair(eta, theta).map(Output::Text),
        Command::AnalyticPovm {
            eta,
            theta,
            phi,
            pi,
        } => cmd_analytic_povm(eta, theta, phi, pi).map(Output::Text),
    };
    match outcome {
        Ok(output) => match output.write(out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                EXIT_PARSE
            }
        },
        Err(failure) => {
            if let Some(record) = &failure.record {
                let _ = Output::Record((**record).clone()).write(out);
            }
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

enum Output {
    Record(RunRecord),
    Text(String),
}

impl Output {
    fn write(self, out: &mut dyn Write) -> std::io::Result<()> {
        match self {
            Output::Record(r) => out.write_all(io::to_json_string(&r)?.as_bytes()),
            Output::Text(t) => out.write_all(t.as_bytes()),
        }
    }
}

pub fn cmd_validate(path: &Path) -> Result<RunRecord, Failure> {
    let mut rec = Recorder::new("validate", json!({ "ensemble": path }));
    let bytes = rec.read("ensemble", path)?;
    let file = io::parse_ensemble(&bytes)?;
    let ensemble = match file.to_unchecked() {
        Ok(e) => e,
        Err(FormatError::Content(e)) => {
            let record = rec.finish(json!({ "valid": false, "error": e.to_string() }), None);
            return Err(Failure::new(EXIT_VALIDATION, e.to_string()).with_record(record));
        }
        Err(other) => return Err(other.into()),
    };
    let report = ensemble.validate();
    let record = rec.finish(
        json!({
            "valid": report.is_valid(),
            "violations": json_value(&report.violations),
            "message": report.to_string(),
        }),
        None,
    );
    if report.is_valid() {
        Ok(record)
    } else {
        Err(
            Failure::new(EXIT_VALIDATION, format!("invalid ensemble: {report}"))
                .with_record(record),
        )
    }
}

fn certificate_summary(c: &Result<Certificate, Error>) -> Value {
    match c {
        Ok(c) => json!({
            "optimal": c.optimal,
            "max_extremal_residual": c.max_extremal_residual(),
            "min_positivity_margin": c.min_positivity_margin(),
            "dual_bound": c.dual_bound,
            "duality_gap": c.duality_gap(),
        }),
        Err(e) => json!({ "optimal": false, "error": e.to_string() }),
    }
}

fn solve_config_echo(cfg: &SolverConfig, extra: Value) -> Value {
    let mut v = extra;
    v["solver"] = json_value(cfg);
    v
}

pub fn cmd_solve(
    path: &Path,
    target_pi: f64,
    cfg: &SolverConfig,
    emit_povm: bool,
) -> Result<RunRecord, Failure> {
    let mut rec = Recorder::new(
        "solve",
        solve_config_echo(
            cfg,
            json!({ "ensemble": path, "target_pi": target_pi, "emit_povm": emit_povm }),
        ),
    );
    let e = load_ensemble(&mut rec, path)?;
    let r = match solver::solve(&e, target_pi, cfg) {
        Ok(r) => r,
        Err(err @ Error::InfeasibleTarget { target, supremum }) => {
            let record = rec.finish(
                json!({ "status": "infeasible", "target": target, "supremum": supremum }),
                None,
            );
            return Err(Failure::from(err).with_record(record));
        }
        Err(err) => return Err(err.into()),
    };
    if !r.converged {
        log::warn!(
            "no convergence after {} iterations (last change {:e})",
            r.iterations,
            r.final_change
        );
    }
    let cert = certificate::check_default(&e, &r.povm);
    let mut result = json!({
        "status": if r.converged { "ok" } else { "not_converged" },
        "success_rate": r.success_rate,
        "inconclusive_rate": r.inconclusive_rate,
        "relative_success_rate": r.relative_success_rate,
        "iterations": r.iterations,
        "final_change": r.final_change,
        "converged": r.converged,
        "a": r.a,
        "lambda_trace": r.lambda.trace(),
        "certificate": certificate_summary(&cert),
    });
    if emit_povm {
        result["povm"] = json_value(&PovmFile::from_povm(&r.povm));
    }
    Ok(rec.finish(result, Some(r.iterations)))
}

/// One row of a sweep; metrics are `None` when the point failed.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub pi: f64,
    pub result: Option<SolveResult>,
    pub residual: Option<f64>,
    pub certified: Option<bool>,
    pub status: String,
}

fn sweep_point(e: &StateEnsemble, pi: f64, cfg: &SolverConfig) -> SweepRow {
    match solver::solve(e, pi, cfg) {
        Ok(r) => {
            let cert = certificate::check_default(e, &r.povm).ok();
            SweepRow {
                pi,
                residual: cert.as_ref().map(Certificate::max_extremal_residual),
                certified: Some(cert.is_some_and(|c| c.optimal)),
                status: if r.converged { "ok" } else { "not_converged" }.to_string(),
                result: Some(r),
            }
        }
        Err(err) => {
            log::info!("P_I = {pi}: {err}");
            SweepRow {
                pi,
                result: None,
                residual: None,
                certified: None,
                status: match err {
                    Error::InfeasibleTarget { .. } => "infeasible",
                    _ => "error",
                }
                .to_string(),
            }
        }
    }
}

/// Solves every grid point on a pool of `jobs` threads; rows come back in
/// grid order.
pub fn sweep(
    e: &StateEnsemble,
    grid: &[f64],
    cfg: &SolverConfig,
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>, Failure> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::new(EXIT_VALIDATION, format!("cannot start workers: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(|&pi| sweep_point(e, pi, cfg)).collect()))
}

fn opt(x: Option<f64>) -> String {
    x.map(io::format_f64).unwrap_or_default()
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        let r = self.result.as_ref();
        vec![
            io::format_f64(self.pi),
            opt(r.map(|r| r.success_rate)),
            opt(r.map(|r| r.relative_success_rate)),
            r.map(|r| r.iterations.to_string()).unwrap_or_default(),
            opt(self.residual),
            self.certified.map(|c| c.to_string()).unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

fn csv_text(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::new(EXIT_PARSE, format!("cannot write CSV: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

pub fn cmd_tradeoff(
    path: &Path,
    grid: &PiGrid,
    cfg: &SolverConfig,
    jobs: Option<usize>,
) -> Result<String, Failure> {
    let mut rec = Recorder::new("tradeoff", json!({}));
    let e = load_ensemble(&mut rec, path)?;
    let rows = sweep(&e, &grid.points(), cfg, jobs)?;
    csv_text(&TRADEOFF_HEADER, rows.iter().map(SweepRow::fields))
}

pub fn cmd_bound(path: &Path) -> Result<RunRecord, Failure> {
    let mut rec = Recorder::new("bound", json!({ "ensemble": path }));
    let e = load_ensemble(&mut rec, path)?;
    let bound = max_relative_success(&e)?;
    Ok(rec.finish(json_value(&bound), None))
}

pub fn cmd_certify(
    path: &Path,
    povm_path: &Path,
    tol_extremal: f64,
    tol_positivity: f64,
) -> Result<RunRecord, Failure> {
    let mut rec = Recorder::new(
        "certify",
        json!({
            "ensemble": path,
            "povm": povm_path,
            "tol_extremal": tol_extremal,
            "tol_positivity": tol_positivity,
        }),
    );
    let e = load_ensemble(&mut rec, path)?;
    let bytes = rec.read("povm", povm_path)?;
    let povm = io::parse_povm(&bytes)?.to_unchecked()?;

    let mut report = povm.check()?;
    if povm.dim() != e.dim() {
        report.violations.push(format!(
            "POVM dimension {} differs from ensemble dimension {}",
            povm.dim(),
            e.dim()
        ));
    }
    if povm.elements().len() != e.len() + 1 {
        report.violations.push(format!(
            "expected {} elements (inconclusive first), got {}",
            e.len() + 1,
            povm.elements().len()
        ));
    }
    if !report.violations.is_empty() {
        let record = rec.finish(
            json!({ "valid": false, "report": json_value(&report) }),
            None,
        );
        return Err(Failure::new(EXIT_VALIDATION, report.violations.join("; ")).with_record(record));
    }

    match certificate::check(&e, &povm, tol_extremal, tol_positivity) {
        Ok(c) => {
            let mut result = json_value(&c);
            result["max_extremal_residual"] = json!(c.max_extremal_residual());
            result["min_positivity_margin"] = json!(c.min_positivity_margin());
            result["duality_gap"] = json!(c.duality_gap());
            let record = rec.finish(result, None);
            if c.optimal {
                Ok(record)
            } else {
                Err(Failure::new(
                    EXIT_NOT_OPTIMAL,
                    format!(
                        "not optimal: max extremal residual {:e}, min positivity margin {:e}",
                        c.max_extremal_residual(),
                        c.min_positivity_margin()
                    ),
                )
                .with_record(record))
            }
        }
        // no multipliers exist for this candidate, so it cannot be certified
        Err(err @ (Error::SingularMultiplier { .. } | Error::EigenFailure)) => {
            let record = rec.finish(json!({ "optimal": false, "error": err.to_string() }), None);
            Err(Failure::new(EXIT_NOT_OPTIMAL, err.to_string()).with_record(record))
        }
        Err(err) => Err(err.into()),
    }
}

/// Header of the `fig1` CSV.
pub const FIG1_HEADER: [&str; 10] = [
    "eta",
    "theta",
    "pi",
    "ps",
    "prs",
    "prs_analytic",
    "iterations",
    "residual",
    "certified",
    "status",
];

pub fn cmd_fig1(
    etas: &[f64],
    theta: f64,
    grid: &PiGrid,
    cfg: &SolverConfig,
    jobs: Option<usize>,
) -> Result<String, Failure> {
    let points = grid.points();
    let mut rows = Vec::new();
    for &eta in etas {
        let problem = SymmetricQubitProblem::new(eta, theta)?;
        let e = problem.ensemble()?;
        for row in sweep(&e, &points, cfg, jobs)? {
            let analytic = envelope_prs(&problem, row.pi).ok();
            let mut fields = vec![io::format_f64(eta), io::format_f64(theta)];
            let rest = row.fields();
            fields.extend_from_slice(&rest[..3]);
            fields.push(opt(analytic));
            fields.extend_from_slice(&rest[3..]);
            rows.push(fields);
        }
    }
    csv_text(&FIG1_HEADER, rows)
}

pub fn cmd_pair(eta: f64, theta: f64) -> Result<String, Failure> {
    let e = symmetric_qubit_pair(eta, theta)?;
    io::to_json_string(&EnsembleFile::from_ensemble(&e))
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

pub fn cmd_analytic_povm(
    eta: f64,
    theta: f64,
    phi: Option<f64>,
    pi: Option<f64>,
) -> Result<String, Failure> {
    let problem = SymmetricQubitProblem::new(eta, theta)?;
    let phi = match (phi, pi) {
        (Some(phi), _) => phi,
        (None, Some(pi)) => phi_for_pi(&problem, pi)?,
        (None, None) => return Err(Failure::new(EXIT_PARSE, "one of --phi or --pi is required")),
    };
    let povm = analytic_povm(&problem, phi)?;
    io::to_json_string(&PovmFile::from_povm(&povm))
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: PiGrid = "0:0.9:4".parse().unwrap();
        for (x, y) in g.points().iter().zip([0.0, 0.3, 0.6, 0.9]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(g.points().len(), 4);
        assert_eq!(g.points()[3], 0.9);
        assert_eq!("0.2:0.2:1".parse::<PiGrid>().unwrap().points(), vec![0.2]);
        for bad in [
            "0:1:3",
            "0:0.5",
            "0.5:0.1:3",
            "0:0.5:0",
            "a:0.5:3",
            "-0.1:0.5:2",
        ] {
            assert!(bad.parse::<PiGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::InfeasibleTarget {
                target: 0.9,
                supremum: 0.8
            }),
            3
        );
        assert_eq!(exit_code(&Error::SingularAverageState(0.0)), 4);
        assert_eq!(exit_code(&Error::NotHermitian(1.0)), 1);
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run_from(["povmlab", "solve"], &mut out, &mut err),
            EXIT_PARSE
        );
        assert_eq!(
            run_from(["povmlab", "nope"], &mut out, &mut err),
            EXIT_PARSE
        );
        let mut out = Vec::new();
        assert_eq!(run_from(["povmlab", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("tradeoff"));
    }

    #[test]
    fn pair_then_bound_in_memory() {
        let text = cmd_pair(0.9, FRAC_PI_4).unwrap();
        let e = io::parse_ensemble(text.as_bytes())
            .unwrap()
            .to_ensemble()
            .unwrap();
        assert_eq!(e, symmetric_qubit_pair(0.9, FRAC_PI_4).unwrap());
    }
}
