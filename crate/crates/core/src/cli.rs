//! Problem files, command dispatch and JSON reports for the `newton-infinity` binary.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{self, Attainment};
use crate::conditions::{self, CheckStatus, InfinityCertificate, ProblemInstance, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{is_convenient, newton_polyhedron};
use crate::numeric::{self, SolverConfig};
use crate::poly::{parse, Polynomial};

pub const TOOL: &str = "newton-infinity";
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

/// Minimize `objective` subject to `constraints[i] ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub objective: String,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default = "yes")]
    pub assume_bounded_below: bool,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn yes() -> bool {
    true
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax { pos: e.column(), msg: format!("problem file: {e}") })
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        if self.variables.is_empty() {
            return Err(Error::InvalidProblem("at least one variable is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.variables {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || !seen.insert(v) {
                return Err(Error::InvalidProblem(format!("bad or repeated variable name `{v}`")));
            }
        }
        let objective = parse(&self.objective, &self.variables)?;
        let constraints = self.constraints.iter().map(|c| parse(c, &self.variables)).collect::<Result<Vec<_>>>()?;
        ProblemInstance::new(objective, constraints)
    }
}

/// Certificate file for `certify`: the certificate plus the claimed optimal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub certificate: InfinityCertificate,
    pub f_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Newton polyhedra, Newton boundary, bad faces and convenience.
    Newton,
    /// Non-degeneracy at infinity of the objective.
    CheckNdg,
    /// The Mangasarian–Fromovitz property at infinity.
    CheckMf,
    /// Infimum of an unconstrained objective from critical values.
    Infimum,
    /// Attainability from convenience and (MF)∞.
    Attain,
    /// Verify a minimizer-at-infinity certificate (needs --certificate).
    Certify,
    /// Search for a minimizer-at-infinity certificate.
    Search,
    /// Run every applicable analysis and merge the payloads.
    Analyze,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Newton => "newton",
            Command::CheckNdg => "check-ndg",
            Command::CheckMf => "check-mf",
            Command::Infimum => "infimum",
            Command::Attain => "attain",
            Command::Certify => "certify",
            Command::Search => "search",
            Command::Analyze => "analyze",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "newton-infinity", version, about = "Newton polyhedra at infinity and optimality conditions at infinity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Certificate file (JSON), for `certify`.
    #[arg(long, global = true)]
    pub certificate: Option<PathBuf>,
    /// Seed for every random start.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Half-width of the search box.
    #[arg(long = "box", global = true)]
    pub box_radius: Option<f64>,
    /// Starting points per axis.
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Tolerance for merging critical values.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// Command-line overrides applied on top of the problem file's solver block.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub box_radius: Option<f64>,
    pub starts: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(r) = self.box_radius {
            cfg.box_radius = r;
        }
        if let Some(k) = self.starts {
            cfg.starts_per_axis = k;
        }
        if let Some(t) = self.tol {
            cfg.value_merge_tol = t;
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::HoldsVerified | Verdict::HoldsHeuristic => EXIT_OK,
        Verdict::Fails => EXIT_FAILS,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistent(_) => EXIT_INCONSISTENT,
        Error::NoFeasiblePoint => EXIT_UNKNOWN,
        _ => EXIT_INPUT,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::InvalidExponent { .. } => "parse",
        Error::Inconsistent(_) => "inconsistent",
        Error::NoFeasiblePoint => "no_feasible_point",
        _ => "invalid_input",
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn newton_payload(prob: &ProblemInstance) -> Result<Value> {
    let mut polys = Vec::new();
    for (i, f) in prob.polys().into_iter().enumerate() {
        let gamma = newton_polyhedron(f)?;
        polys.push(json!({
            "role": if i == 0 { "objective".to_string() } else { format!("constraint {i}") },
            "polynomial": f.to_string(),
            "convenient": is_convenient(f),
            "newton_boundary": gamma.newton_boundary().iter().map(|f| f.id).collect::<Vec<_>>(),
            "bad_faces": gamma.bad_faces().iter().map(|f| f.id).collect::<Vec<_>>(),
            "polyhedron": to_value(&gamma),
        }));
    }
    Ok(json!({ "polyhedra": polys }))
}

fn infimum_payload(p: &Polynomial, bounded: bool, cfg: &SolverConfig) -> Result<(Value, i32)> {
    let mut report = analysis::unconstrained_infimum(p, cfg)?;
    report.assumptions.bounded_below_assumed = bounded;
    let fermat = analysis::fermat_witness_from(p, &report, cfg)?;
    let code = if report.attainment == Attainment::Inconclusive && report.f_star.is_none() { EXIT_UNKNOWN } else { EXIT_OK };
    Ok((json!({ "report": to_value(&report), "fermat_witness": to_value(&fermat) }), code))
}

fn search_payload(prob: &ProblemInstance, cfg: &SolverConfig) -> Result<Value> {
    let profile = numeric::escape_profile(&prob.objective, &prob.constraints, cfg)?;
    let (radius, best) =
        profile.into_iter().min_by(|a, b| a.1.value.total_cmp(&b.1.value)).expect("four radii");
    let outcome = analysis::search_minimizer_at_infinity(prob, best.value, cfg)?;
    Ok(json!({
        "estimate_source": { "kind": "grid_oracle", "radius": radius, "value": best.value, "point": best.point },
        "outcome": to_value(&outcome),
    }))
}

fn check_payload(status: &CheckStatus) -> (Value, i32) {
    (to_value(status), verdict_code(status.verdict))
}

fn payload(cmd: Command, file: &ProblemFile, cfg: &SolverConfig, cert: Option<&CertificateFile>) -> Result<(Value, i32)> {
    let prob = file.instance()?;
    cfg.validate()?;
    match cmd {
        Command::Newton => Ok((newton_payload(&prob)?, EXIT_OK)),
        Command::CheckNdg => Ok(check_payload(&conditions::check_nondegenerate(&prob.objective, cfg)?)),
        Command::CheckMf => Ok(check_payload(&conditions::check_mf_infinity(&prob, cfg)?)),
        Command::Infimum => {
            if !prob.constraints.is_empty() {
                return Err(Error::InvalidProblem("infimum handles unconstrained problems only".into()));
            }
            infimum_payload(&prob.objective, file.assume_bounded_below, cfg)
        }
        Command::Attain => Ok((to_value(&analysis::frank_wolfe(&prob, cfg)?), EXIT_OK)),
        Command::Certify => {
            let cert = cert.ok_or_else(|| Error::InvalidProblem("certify needs --certificate".into()))?;
            Ok(check_payload(&conditions::verify_certificate(&prob, &cert.certificate, cert.f_star)))
        }
        Command::Search => Ok((search_payload(&prob, cfg)?, EXIT_OK)),
        Command::Analyze => {
            let ndg = conditions::check_nondegenerate(&prob.objective, cfg)?;
            let mf = conditions::check_mf_infinity(&prob, cfg)?;
            let mut out = serde_json::Map::new();
            out.insert("newton".into(), newton_payload(&prob)?);
            out.insert("check_ndg".into(), to_value(&ndg));
            out.insert("check_mf".into(), to_value(&mf));
            if prob.constraints.is_empty() {
                out.insert("infimum".into(), infimum_payload(&prob.objective, file.assume_bounded_below, cfg)?.0);
            }
            out.insert("attain".into(), to_value(&analysis::frank_wolfe(&prob, cfg)?));
            Ok((Value::Object(out), EXIT_OK))
        }
    }
}

/// Runs one command on an already-read problem file. The report is complete
/// except for `timings`, which the caller may fill in.
pub fn run(cmd: Command, file: &ProblemFile, overrides: &Overrides, cert: Option<&CertificateFile>) -> Outcome {
    let mut cfg = file.solver.clone();
    overrides.apply(&mut cfg);
    let mut echo = file.clone();
    echo.solver = cfg.clone();
    let started = Instant::now();
    let result = payload(cmd, file, &cfg, cert);
    let seconds = started.elapsed().as_secs_f64();
    let mut report = json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "input": to_value(&echo),
        "seed": cfg.rng_seed,
    });
    let exit_code = match result {
        Ok((payload, code)) => {
            report["payload"] = payload;
            if let Some(c) = cert {
                report["certificate"] = to_value(c);
            }
            code
        }
        Err(e) => {
            report["error"] = json!({ "kind": error_kind(&e), "message": e.to_string() });
            error_code(&e)
        }
    };
    report["timings"] = json!({ "total_seconds": seconds });
    Outcome { report, exit_code }
}

/// Report for input that could not be read or parsed at all.
pub fn input_error(cmd: Command, message: String) -> Outcome {
    let report = json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "error": { "kind": "parse", "message": message },
        "timings": { "total_seconds": 0.0 },
    });
    Outcome { report, exit_code: EXIT_INPUT }
}

/// Serialized report with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("json");
    s.push('\n');
    s
}

/// Reads the files named on the command line and runs the command.
pub fn execute(cli: &Cli) -> Outcome {
    let cmd = cli.command;
    let Some(path) = &cli.input else {
        return input_error(cmd, "--input is required".into());
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(cmd, format!("{}: {e}", path.display())),
    };
    let file = match ProblemFile::from_json(&text) {
        Ok(f) => f,
        Err(e) => return input_error(cmd, e.to_string()),
    };
    let cert = match &cli.certificate {
        Some(p) => {
            let parsed = std::fs::read_to_string(p)
                .map_err(|e| format!("{}: {e}", p.display()))
                .and_then(|t| serde_json::from_str::<CertificateFile>(&t).map_err(|e| format!("certificate file: {e}")));
            match parsed {
                Ok(c) => Some(c),
                Err(m) => return input_error(cmd, m),
            }
        }
        None => None,
    };
    let overrides = Overrides { seed: cli.seed, box_radius: cli.box_radius, starts: cli.starts, tol: cli.tol };
    run(cmd, &file, &overrides, cert.as_ref())
}
