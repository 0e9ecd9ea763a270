//! `flowknots`: knot invariants and asymptotic flow invariants from the
//! command line. Exit codes: 0 success, 1 numerical check failed, 2 bad
//! input.

mod manifest;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use flowknots::asymptotics::{
    asymptotic_i_d, bounds_from_survey, csv_rows, pair_survey, write_csv, AsymptoticEstimate, ConvergenceReport,
    Normalization, PairQuantity, SurveyConfig, TLadder,
};
use flowknots::confint::{integral_i_d, linking_number, v2, writhe, QuadratureConfig};
use flowknots::curves::{read_knot_file, ShortPathSystem};
use flowknots::diagrams::{parse_diagrams, TrivalentDiagram};
use flowknots::fields::{read_field_config, VectorField};
use flowknots::selftest::{Budget, Suite};
use flowknots::Curve;

use manifest::RunManifest;
use output::write_atomic;

#[derive(Parser, Debug)]
#[command(name = "flowknots", version, about = "Finite-type knot invariants and asymptotic invariants of flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Linking number, writhe, v2 or a raw diagram integral of a knot file.
    Invariant(InvariantArgs),
    /// Helicity along a T ladder (CSV).
    Helicity(LadderArgs),
    /// Quadratic helicity along a T ladder (CSV).
    Qhelicity(LadderArgs),
    /// Asymptotic crossing number, or an asymptotic diagram integral with --diagram (CSV).
    Asymptotic(AsymptoticArgs),
    /// Energy and helicity inequality report (JSON).
    Bounds(BoundsArgs),
    /// Convergence diagnostics of an asymptotic quantity along the ladder (JSON).
    Converge(ConvergeArgs),
    /// The acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Which {
    Lk,
    Writhe,
    V2,
    #[value(name = "ID")]
    #[serde(rename = "ID")]
    Id,
}

#[derive(Args, Debug, Serialize)]
struct InvariantArgs {
    #[arg(long)]
    knot: PathBuf,
    #[arg(long, value_enum)]
    which: Which,
    /// Diagram file for --which ID; the first diagram is used.
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Points per component after resampling; 0 keeps the file's vertices.
    #[arg(long, default_value_t = 0)]
    points: usize,
    /// Monte Carlo samples for free vertices.
    #[arg(long, default_value_t = 100_000)]
    mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct FlowArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Comma-separated flow times.
    #[arg(long = "T", value_delimiter = ',', default_value = "25,50,100,200")]
    t: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct LadderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    flow: FlowArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct AsymptoticArgs {
    #[command(flatten)]
    #[serde(flatten)]
    flow: FlowArgs,
    /// Diagram file; the first diagram's integral is scaled by 1/T^order.
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Defaults to the diagram's number of circle vertices.
    #[arg(long)]
    order: Option<usize>,
    /// Polygon size for closed orbits in diagram integrals.
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long, default_value_t = 20_000)]
    mc: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    flow: FlowArgs,
    #[arg(long, default_value_t = 1_000_000)]
    energy_samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Quantity {
    Helicity,
    Qhelicity,
    Crossing,
}

#[derive(Args, Debug, Serialize)]
struct ConvergeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    flow: FlowArgs,
    #[arg(long, value_enum, default_value = "helicity")]
    quantity: Quantity,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SelftestArgs {
    #[arg(long, default_value = "small")]
    budget: Budget,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures sorted by exit code.
enum Failure {
    Input(String),
    Compute(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Whether every numerical check behind a command passed.
type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match threads().and_then(|n| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Failure::Compute(e.to_string()))
    }) {
        Ok(p) => p,
        Err(f) => return report(Err(f)),
    };
    let argv: Vec<String> = std::env::args().collect();
    report(pool.install(|| dispatch(&cli.command, &argv)))
}

fn report(r: Outcome) -> ExitCode {
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("flowknots: numerical check failed");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("flowknots: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("flowknots: {m}");
            ExitCode::from(2)
        }
    }
}

/// Worker count: `AI_THREADS` when set, else hardware parallelism.
fn threads() -> Result<usize, Failure> {
    match std::env::var("AI_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(input(format!("AI_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn dispatch(cmd: &Command, argv: &[String]) -> Outcome {
    let start = Instant::now();
    match cmd {
        Command::Invariant(a) => invariant(a, argv, start),
        Command::Helicity(a) => ladder_csv(a, PairQuantity::Helicity, argv, start),
        Command::Qhelicity(a) => ladder_csv(a, PairQuantity::QuadraticHelicity, argv, start),
        Command::Asymptotic(a) => asymptotic(a, argv, start),
        Command::Bounds(a) => bounds(a, argv, start),
        Command::Converge(a) => converge(a, argv, start),
        Command::Selftest(a) => selftest(a, argv, start),
    }
}

fn knot(path: &Path) -> Result<Vec<Curve>, Failure> {
    read_knot_file::<f64>(path).map_err(|e| input(format!("cannot read knot file: {e}")))
}

fn diagram(path: &Path) -> Result<TrivalentDiagram, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read diagram file {}: {e}", path.display())))?;
    let ds = parse_diagrams(&text).map_err(|e| input(format!("malformed diagram file {}: {e}", path.display())))?;
    ds.into_iter().next().ok_or_else(|| input(format!("diagram file {} is empty", path.display())))
}

fn field(path: &Path) -> Result<VectorField<f64>, Failure> {
    let cfg = read_field_config(path).map_err(input)?;
    cfg.build().map_err(input)
}

fn file_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_default()
}

fn ladder(f: &FlowArgs) -> Result<TLadder, Failure> {
    TLadder::new(f.t.clone(), f.dt).map_err(input)
}

fn one_component(comps: Vec<Curve>, what: &str) -> Result<Curve, Failure> {
    match <[Curve; 1]>::try_from(comps) {
        Ok([k]) => Ok(k),
        Err(v) => Err(input(format!("{what} needs a knot with one component, the file has {}", v.len()))),
    }
}

fn invariant(a: &InvariantArgs, argv: &[String], start: Instant) -> Outcome {
    let comps = knot(&a.knot)?;
    let q = QuadratureConfig::default().with_points(a.points).with_samples(a.mc).with_seed(a.seed);
    let mut inputs = vec![file_bytes(&a.knot)];
    let est = match a.which {
        Which::Lk => match comps.as_slice() {
            [k1, k2] => linking_number(k1, k2, &q)?,
            _ => return Err(input(format!("lk needs a link with two components, the file has {}", comps.len()))),
        },
        Which::Writhe => writhe(&one_component(comps, "writhe")?, &q)?,
        Which::V2 => v2(&one_component(comps, "v2")?, &q)?,
        Which::Id => {
            let path = a.diagram.as_ref().ok_or_else(|| input("--which ID needs --diagram"))?;
            let d = diagram(path)?;
            inputs.push(file_bytes(path));
            integral_i_d(&one_component(comps, "ID")?, &d, &q)?
        }
    };
    let m = RunManifest::new(argv, a, &inputs, a.seed, json!({ "confint": { "points": a.points, "mc": a.mc } }), start);
    let body = json!({
        "which": a.which,
        "value": est.value,
        "std_error": est.std_error,
        "samples": est.samples,
        "rejections": est.rejections,
        "method": est.method,
        "warning": est.warning,
        "config": q,
        "manifest": m,
    });
    emit_json(&body, a.out.as_deref())?;
    Ok(true)
}

fn survey_budgets(f: &FlowArgs) -> Value {
    json!({ "asymptotics": { "pairs": f.pairs, "T": f.t, "dt": f.dt } })
}

fn survey(f: &FlowArgs, x: &VectorField<f64>) -> Result<flowknots::asymptotics::PairSurvey, Failure> {
    if f.pairs < 30 {
        return Err(input(format!("--pairs must be at least 30, got {}", f.pairs)));
    }
    Ok(pair_survey(x, &SurveyConfig::new(ladder(f)?, f.pairs, f.seed))?)
}

fn emit_ladder(est: &AsymptoticEstimate, f: &FlowArgs, out: Option<&Path>, m: &RunManifest) -> Result<(), Failure> {
    let csv = write_csv(&csv_rows(est, f.dt, f.seed));
    match out {
        Some(p) => {
            write_atomic(p, csv.as_bytes()).map_err(input)?;
            let side = manifest::sidecar(p);
            write_atomic(&side, pretty(&json!(m))?.as_bytes()).map_err(input)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn ladder_csv(a: &LadderArgs, q: PairQuantity, argv: &[String], start: Instant) -> Outcome {
    let x = field(&a.flow.field)?;
    let s = survey(&a.flow, &x)?;
    let est = s.estimate(q, Normalization::Raw);
    let m = RunManifest::new(argv, a, &[file_bytes(&a.flow.field)], a.flow.seed, survey_budgets(&a.flow), start);
    emit_ladder(&est, &a.flow, a.out.as_deref(), &m)?;
    Ok(true)
}

fn asymptotic(a: &AsymptoticArgs, argv: &[String], start: Instant) -> Outcome {
    let x = field(&a.flow.field)?;
    let mut inputs = vec![file_bytes(&a.flow.field)];
    let est = match &a.diagram {
        None => survey(&a.flow, &x)?.estimate(PairQuantity::CrossingNumber, Normalization::Raw),
        Some(path) => {
            let d = diagram(path)?;
            inputs.push(file_bytes(path));
            let q = QuadratureConfig::default().with_points(a.points).with_samples(a.mc).with_seed(a.flow.seed);
            let r = asymptotic_i_d(&x, &d, a.order, &ladder(&a.flow)?, a.flow.pairs, a.flow.seed, &ShortPathSystem::Straight, &q)?;
            AsymptoticEstimate {
                quantity: format!("I_D/T^{}", r.order),
                normalization: Normalization::Raw,
                value: r.value,
                std_error: r.std_error,
                t_max: a.flow.t.iter().copied().fold(0.0, f64::max),
                n_pairs: a.flow.pairs,
                rungs: r.rungs,
            }
        }
    };
    let mut budgets = survey_budgets(&a.flow);
    budgets["confint"] = json!({ "points": a.points, "mc": a.mc });
    let m = RunManifest::new(argv, a, &inputs, a.flow.seed, budgets, start);
    emit_ladder(&est, &a.flow, a.out.as_deref(), &m)?;
    Ok(true)
}

fn bounds(a: &BoundsArgs, argv: &[String], start: Instant) -> Outcome {
    let x = field(&a.flow.field)?;
    let s = survey(&a.flow, &x)?;
    let r = bounds_from_survey(&x, &s, a.energy_samples);
    let mut budgets = survey_budgets(&a.flow);
    budgets["fields"] = json!({ "energy_samples": a.energy_samples });
    let m = RunManifest::new(argv, a, &[file_bytes(&a.flow.field)], a.flow.seed, budgets, start);
    let holds = r.canonical_holds();
    let canonical: Vec<_> = r.canonical().into_iter().cloned().collect();
    let body = json!({ "holds": holds, "canonical": canonical, "report": r, "manifest": m });
    emit_json(&body, a.out.as_deref())?;
    Ok(holds)
}

fn converge(a: &ConvergeArgs, argv: &[String], start: Instant) -> Outcome {
    let x = field(&a.flow.field)?;
    let s = survey(&a.flow, &x)?;
    let q = match a.quantity {
        Quantity::Helicity => PairQuantity::Helicity,
        Quantity::Qhelicity => PairQuantity::QuadraticHelicity,
        Quantity::Crossing => PairQuantity::CrossingNumber,
    };
    let est = s.estimate(q, Normalization::Raw);
    let mut flags = Vec::new();
    if s.jittered > 0 {
        flags.push(format!("{} pairs had rungs jittered by one step", s.jittered));
    }
    let r = ConvergenceReport::from_rungs(&est.quantity, 2, est.rungs, flags);
    let stabilized = r.stabilized();
    let m = RunManifest::new(argv, a, &[file_bytes(&a.flow.field)], a.flow.seed, survey_budgets(&a.flow), start);
    let body = json!({ "stabilized": stabilized, "report": r, "manifest": m });
    emit_json(&body, a.out.as_deref())?;
    Ok(stabilized != Some(false) && !r.growing)
}

fn selftest(a: &SelftestArgs, argv: &[String], start: Instant) -> Outcome {
    let suite = Suite::new(a.budget);
    let results = suite.run_all();
    for r in &results {
        println!("{} criterion {}: {} ({:.1}s)", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.seconds);
        for d in &r.details {
            println!("    {d}");
        }
    }
    let passed = results.iter().all(|r| r.passed);
    if let Some(p) = &a.out {
        let m = RunManifest::new(argv, a, &[], 0, json!(suite.sizes), start);
        emit_json(&json!({ "passed": passed, "criteria": results, "manifest": m }), Some(p))?;
    }
    Ok(passed)
}

fn pretty(v: &Value) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn emit_json(v: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = pretty(v)?;
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(input),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
