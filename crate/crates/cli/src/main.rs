//! `powerplan`: feasibility checks, minimal power solves, projections,
//! bargaining runs and gamma sweeps over scenario files.
//!
//! Exit codes are a stable contract: 0 success/feasible, 1 error,
//! 2 infeasible, 3 boundary, 4 projection requested on an already
//! feasible instance.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use powerplan_core::bargain::{nbs_solve, BargainProblem, Objective};
use powerplan_core::error::Error;
use powerplan_core::link_model::{build_link_model, PowerVector};
use powerplan_core::projection::{balance_infeasible, DEFAULT_MAX_CYCLES};
use powerplan_core::region::{
    min_power_point_with, normalize, FeasibilityStatus, NormalizedSystem,
};
use powerplan_core::scenario_io::{self, ObjectiveSpec, ScenarioDoc, Strictness};
use powerplan_core::spectral::{DEFAULT_MAX_ITER, DEFAULT_TOL};

use report::RunReport;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BOUNDARY: u8 = 3;
const EXIT_ALREADY_FEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "powerplan", about = "Multiuser CDMA power control solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON, schema_version "1").
    scenario: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Spectral/solver tolerance.
    #[arg(long, env = "POWERPLAN_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Iteration cap for spectral estimation and projections.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Accept unknown scenario fields with a warning instead of an error.
    #[arg(long)]
    lenient: bool,
    /// Attach wall time to the report.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility of the SIR targets.
    Check(Common),
    /// Compute the componentwise minimal power allocation.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Objective to evaluate at the solution: sum, lq:<q>, or nash.
        #[arg(long)]
        objective: Option<String>,
    },
    /// Project the minimal point onto the viable power set.
    Project(Common),
    /// Compute the Nash bargaining solution under the power caps.
    Nbs(Common),
    /// Scale the targets over a range and emit one CSV row per scale.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Range of scale factors as min:max:steps, e.g. 0.5:5:50.
        #[arg(long, value_name = "MIN:MAX:STEPS")]
        gamma_scale: String,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Loaded {
    doc: ScenarioDoc,
    sys: NormalizedSystem<f64>,
    digest: String,
}

fn load(common: &Common) -> Result<Loaded, Error> {
    let text = std::fs::read_to_string(&common.scenario)?;
    let strictness = if common.lenient {
        Strictness::Lenient
    } else {
        Strictness::Strict
    };
    let (doc, warnings) = scenario_io::load_str_with(&text, strictness)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let digest = {
        let canonical = scenario_io::to_canonical_string(&doc)?;
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    };
    let model = build_link_model(&doc.scenario)?;
    let sys = normalize(&model, doc.scenario.sigma2, &doc.scenario.gamma)?;
    Ok(Loaded { doc, sys, digest })
}

fn status_exit(status: FeasibilityStatus) -> u8 {
    match status {
        FeasibilityStatus::Feasible => EXIT_OK,
        FeasibilityStatus::Infeasible => EXIT_INFEASIBLE,
        FeasibilityStatus::Boundary => EXIT_BOUNDARY,
    }
}

fn parse_objective(
    flag: Option<&str>,
    file: Option<ObjectiveSpec>,
    loaded: &Loaded,
) -> Result<Option<(String, Objective<f64>)>, Error> {
    let spec = match flag {
        Some(s) => Some(match s {
            "sum" => ObjectiveSpec::Sum,
            "nash" | "nash_game" => ObjectiveSpec::NashGame,
            other => {
                let q = other
                    .strip_prefix("lq:")
                    .and_then(|q| q.parse::<f64>().ok())
                    .ok_or_else(|| Error::Validation {
                        field: "--objective".into(),
                        reason: format!("expected sum, lq:<q> or nash, got `{other}`"),
                    })?;
                ObjectiveSpec::Lq { q }
            }
        }),
        None => file,
    };
    let k = loaded.sys.user_count();
    Ok(match spec {
        None => None,
        Some(ObjectiveSpec::Sum) => Some(("sum".into(), Objective::Sum)),
        Some(ObjectiveSpec::Lq { q }) => Some((format!("lq:{q}"), Objective::Lq { q })),
        Some(ObjectiveSpec::NashGame) => {
            let caps = loaded
                .doc
                .scenario
                .constraints
                .as_ref()
                .and_then(|cs| cs.box_caps(k))
                .ok_or_else(|| Error::Validation {
                    field: "objective".into(),
                    reason: "nash_game objective needs per-user power caps in constraints".into(),
                })?;
            Some(("nash_game".into(), Objective::NashGame { pmax: caps }))
        }
    })
}

fn cmd_check(common: &Common) -> Result<(RunReport, u8), Error> {
    let loaded = load(common)?;
    let rep = min_power_point_with(&loaded.sys, common.tol, common.max_iter)?;
    let mut out = RunReport::new("check", loaded.digest, &rep.status.to_string());
    out.rho = Some(rep.rho);
    Ok((out, status_exit(rep.status)))
}

fn cmd_solve(common: &Common, objective: Option<&str>) -> Result<(RunReport, u8), Error> {
    let loaded = load(common)?;
    let rep = min_power_point_with(&loaded.sys, common.tol, common.max_iter)?;
    let mut out = RunReport::new("solve", loaded.digest.clone(), &rep.status.to_string());
    out.rho = Some(rep.rho);
    let Some(pi) = rep.min_point else {
        out.message = Some("SIR targets are not jointly achievable".into());
        return Ok((out, EXIT_INFEASIBLE));
    };
    if let Some(cs) = &loaded.doc.scenario.constraints {
        if !cs.contains(&pi, common.tol) {
            out.status = "constrained-infeasible".into();
            out.powers = Some(pi.to_vec());
            out.message =
                Some("minimal point violates the power constraints; use `powerplan project`".into());
            return Ok((out, EXIT_INFEASIBLE));
        }
    }
    let sir = loaded.sys.achieved_sir(&pi)?;
    if let Some((kind, obj)) = parse_objective(objective, loaded.doc.objective, &loaded)? {
        out.objective_value = Some(powerplan_core::bargain::evaluate_objective(&obj, &pi)?);
        out.objective_kind = Some(kind);
    }
    out.powers = Some(pi.into_vec());
    out.sir = Some(sir);
    out.sir_targets = Some(loaded.sys.gamma.clone());
    Ok((out, EXIT_OK))
}

fn cmd_project(common: &Common) -> Result<(RunReport, u8), Error> {
    let loaded = load(common)?;
    let cs = loaded
        .doc
        .scenario
        .constraints
        .as_ref()
        .ok_or_else(|| Error::Validation {
            field: "constraints".into(),
            reason: "projection needs a viable power set".into(),
        })?;
    match balance_infeasible(&loaded.sys, cs, common.tol, DEFAULT_MAX_CYCLES) {
        Ok(sol) => {
            let mut out = RunReport::new("project", loaded.digest, "projected");
            out.powers = Some(sol.power.to_vec());
            out.sir = Some(sol.sir.clone());
            out.sir_targets = Some(loaded.sys.gamma.clone());
            out.shortfall = Some(sol.shortfall);
            out.message = Some(format!(
                "minimal point {:?} is not viable; projected onto the power constraints",
                sol.min_point.as_slice()
            ));
            Ok((out, EXIT_OK))
        }
        Err(Error::AlreadyFeasible) => {
            let mut out = RunReport::new("project", loaded.digest, "already-feasible");
            out.message = Some("minimal point satisfies the constraints; use `powerplan solve`".into());
            Ok((out, EXIT_ALREADY_FEASIBLE))
        }
        Err(Error::RegionEmpty) => {
            let mut out = RunReport::new("project", loaded.digest, "region-empty");
            out.message = Some("SIR targets are not jointly achievable at any power".into());
            Ok((out, EXIT_INFEASIBLE))
        }
        Err(e) => Err(e),
    }
}

fn cmd_nbs(common: &Common) -> Result<(RunReport, u8), Error> {
    let loaded = load(common)?;
    let k = loaded.sys.user_count();
    let caps = loaded
        .doc
        .scenario
        .constraints
        .as_ref()
        .and_then(|cs| cs.box_caps(k))
        .ok_or_else(|| Error::Validation {
            field: "constraints".into(),
            reason: "bargaining needs per-user power caps".into(),
        })?;
    let prob = BargainProblem::new(loaded.sys.clone(), caps)?;
    match nbs_solve(&prob) {
        Ok(sol) => {
            // same code path as `solve`, so the equality check is structural
            let rep = min_power_point_with(&loaded.sys, common.tol, common.max_iter)?;
            let equals = rep
                .min_point
                .map(|p: PowerVector<f64>| p.as_slice() == sol.power.as_slice())
                .unwrap_or(false);
            let mut out = RunReport::new("nbs", loaded.digest, "feasible");
            out.sir = Some(loaded.sys.achieved_sir(&sol.power)?);
            out.sir_targets = Some(loaded.sys.gamma.clone());
            out.powers = Some(sol.power.into_vec());
            out.nash_product = Some(sol.certificate.nash_product);
            out.equals_min_power = Some(equals);
            Ok((out, EXIT_OK))
        }
        Err(Error::RegionEmpty) | Err(Error::Infeasible) => {
            let mut out = RunReport::new("nbs", loaded.digest, "infeasible");
            out.message = Some("no power allocation meets all targets under the caps".into());
            Ok((out, EXIT_INFEASIBLE))
        }
        Err(e) => Err(e),
    }
}

fn parse_range(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || Error::Validation {
        field: "--gamma-scale".into(),
        reason: format!("expected min:max:steps with positive bounds, got `{spec}`"),
    };
    let [min, max, steps] = parts[..] else { return Err(err()) };
    let min: f64 = min.parse().map_err(|_| err())?;
    let max: f64 = max.parse().map_err(|_| err())?;
    let steps: usize = steps.parse().map_err(|_| err())?;
    if !(min > 0.0 && max >= min && steps >= 1) {
        return Err(err());
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| min + step * i as f64).collect())
}

fn cmd_sweep(common: &Common, gamma_scale: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    let loaded = load(common)?;
    let scales = parse_range(gamma_scale)?;
    let k = loaded.sys.user_count();
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let mut header = vec!["s".to_string(), "rho".to_string(), "status".to_string()];
    header.extend((1..=k).map(|i| format!("p_{i}")));
    header.push("total".to_string());
    writer
        .write_record(&header)
        .map_err(|e| Error::InvalidScenario(e.to_string()))?;
    for s in scales {
        let scaled_gamma: Vec<f64> = loaded.sys.gamma.iter().map(|g| g * s).collect();
        let sys = NormalizedSystem::new(loaded.sys.b.clone(), loaded.sys.tau.clone(), scaled_gamma)?;
        let rep = min_power_point_with(&sys, common.tol, common.max_iter)?;
        let mut row = vec![
            format!("{s}"),
            format!("{}", rep.rho),
            rep.status.to_string(),
        ];
        match &rep.min_point {
            Some(p) => {
                row.extend(p.iter().map(|v| format!("{v}")));
                row.push(format!("{}", p.total()));
            }
            None => {
                row.extend(std::iter::repeat(String::new()).take(k + 1));
            }
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::InvalidScenario(e.to_string()))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidScenario(e.to_string()))?;
    Ok(())
}

fn emit(report: &mut RunReport, common: &Common, started: Instant) {
    if common.verbose {
        report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    match common.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let run = |common: &Common, result: Result<(RunReport, u8), Error>| -> u8 {
        match result {
            Ok((mut report, code)) => {
                emit(&mut report, common, started);
                code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        }
    };
    let code = match &cli.command {
        Command::Check(common) => run(common, cmd_check(common)),
        Command::Solve { common, objective } => {
            run(common, cmd_solve(common, objective.as_deref()))
        }
        Command::Project(common) => run(common, cmd_project(common)),
        Command::Nbs(common) => run(common, cmd_nbs(common)),
        Command::Sweep {
            common,
            gamma_scale,
            out,
        } => match cmd_sweep(common, gamma_scale, out.as_ref()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    };
    ExitCode::from(code)
}
