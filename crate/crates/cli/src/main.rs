mod grid;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convexroof::data::DataConstraint;
use convexroof::fisher::{qfi_lower_bound, variance_upper_bound, SpinEnsemble};
use convexroof::oracles::{state_family, FAMILIES};
use convexroof::roof::measures::{
    assistance_upper, elin_data_program, elin_extension, elin_ppt, gme_mixer, meyer_wallach_roof, schmidt_r, tangle_ppt,
    TangleOptions,
};
use convexroof::roof::objective::linear_entropy_objective;
use convexroof::roof::{ProgramOptions, RoofResult};
use convexroof::steering::{noisy_singlet_assemblage, steering_bound, SteeringOptions, WordSet};
use convexroof::tensor::{random_density, DensityOp, HermitianOp, ProductSpace};
use convexroof::witness::{extract_witness_for, extract_witness_restricted, verify_witness};
use convexroof::RoofError;
use convexroof_sdp::Status;
use rand::SeedableRng;

/// Exit codes: 0 success, 1 usage or input error, 2 infeasible data, 3 solver or capacity failure.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<RoofError> for Failure {
    fn from(e: RoofError) -> Self {
        let code = match &e {
            RoofError::Infeasible => 2,
            RoofError::InvalidInput(_)
            | RoofError::DimensionMismatch(_)
            | RoofError::NotHermitian(_)
            | RoofError::NotDensity(_)
            | RoofError::Json(_)
            | RoofError::Io(_) => 1,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "convexroof", version, about = "Certified bounds on convex-roof entanglement measures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Duality-gap and feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Seed for random states.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to the logical core count.
    #[arg(long, global = true, env = "CONVEXROOF_WORKERS")]
    workers: Option<usize>,
    /// Log solver progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args, Clone)]
struct Source {
    /// Density matrix JSON file `{"dims": [..], "re": [[..]], "im": [[..]]}`.
    #[arg(long, conflicts_with = "family")]
    state: Option<PathBuf>,
    /// Named state family.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Parties on one side of the bipartition, comma separated.
    #[arg(long, default_value = "0", value_delimiter = ',')]
    cut: Vec<usize>,
    /// Extension level n of the n:1 hierarchy.
    #[arg(long, default_value_t = 2)]
    level: usize,
    /// Schmidt-rank order r.
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Impose qubit-permutation invariance in the tangle program.
    #[arg(long)]
    permutation_invariant: bool,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Constraint list `[{"obs": matrix, "value": v}, ..]`.
    #[arg(long)]
    constraints: PathBuf,
    /// Generator matrix JSON.
    #[arg(long, conflicts_with = "spin")]
    generator: Option<PathBuf>,
    /// Collective spin component as generator.
    #[arg(long, value_enum)]
    spin: Option<Axis>,
    /// Qubit count for the collective spin.
    #[arg(long, default_value_t = 3)]
    qubits: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Measure {
    Elin,
    Extend,
    Assist,
    Schmidt,
    Mw,
    Tangle,
    Gme,
}

#[derive(Subcommand)]
enum Command {
    /// Two-copy PPT lower bound on the linear entropy of entanglement.
    Elin(Single),
    /// n:1 symmetric-extension lower bound (`--level n`).
    Extend(Single),
    /// Upper bound on the linear entanglement of assistance.
    Assist(Single),
    /// Lower bound on the Schmidt-rank quantity R_r (`--r r`).
    Schmidt(Single),
    /// Lower bound on the Meyer-Wallach roof.
    Mw(Single),
    /// Lower bound on the three-tangle.
    Tangle(Single),
    /// Genuine multipartite entanglement mixer value.
    Gme(Single),
    /// Quantum Fisher information lower bound from data.
    Qfi(DataArgs),
    /// Variance upper bound from data.
    Varmax(DataArgs),
    /// Witness JSON from the two-copy PPT linear entropy program.
    Witness(WitnessArgs),
    /// Steering lower bound for the noisy singlet over a grid of p_D.
    Steer(SteerArgs),
    /// Emit a state family as matrix JSON.
    State(StateArgs),
    /// Evaluate a measure over a parameter grid of a family.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Single {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    measure: MeasureArgs,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    source: Source,
    /// Build the witness from these data instead of the full state.
    #[arg(long)]
    constraints: Option<PathBuf>,
    #[arg(long, default_value = "0", value_delimiter = ',')]
    cut: Vec<usize>,
}

#[derive(Args)]
struct SteerArgs {
    /// Measurement settings of the untrusted side, 2 or 3.
    #[arg(long, default_value_t = 2)]
    settings: usize,
    /// Grid of p_D as start:stop:step.
    #[arg(long = "pd-grid", default_value = "0:1:0.05")]
    pd_grid: String,
    /// Word level of the moment matrix, 1 or 2.
    #[arg(long = "word-level", default_value_t = 1)]
    word_level: usize,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    measure: Measure,
    #[arg(long)]
    family: String,
    /// Fixed family parameter `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Swept parameter `name=start:stop:step`; `--name start:stop:step` is accepted too.
    #[arg(long = "axis", value_parser = parse_axis)]
    axes: Vec<(String, String)>,
    #[command(flatten)]
    measure_args: MeasureArgs,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad value in {s:?}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_axis(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=start:stop:step, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Status label; `optimal` only when the gap is within the tolerance.
fn label(status: Status, gap: f64, tol: f64) -> String {
    match status {
        Status::Optimal if gap <= tol => "optimal".into(),
        Status::Optimal => "inaccurate".into(),
        other => other.to_string(),
    }
}

/// Families accepted on the command line: the library families plus `random`.
fn family_params(name: &str) -> Option<Vec<&'static str>> {
    if name == "random" {
        return Some(vec!["da", "db", "rank"]);
    }
    FAMILIES.iter().find(|(n, _)| *n == name).map(|(_, p)| p.to_vec())
}

fn build_family(name: &str, params: &BTreeMap<String, f64>, seed: u64) -> Result<DensityOp, RoofError> {
    if name != "random" {
        return state_family(name, params);
    }
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    let as_count = |k: &str, v: f64| -> Result<usize, RoofError> {
        if v.fract() != 0.0 || v < 1.0 || v > 16.0 {
            return Err(RoofError::InvalidInput(format!("{k} = {v} must be an integer in 1..=16")));
        }
        Ok(v as usize)
    };
    for k in params.keys() {
        if !["da", "db", "rank"].contains(&k.as_str()) {
            return Err(RoofError::InvalidInput(format!("family random has no parameter {k}")));
        }
    }
    let (da, db) = (as_count("da", get("da", 2.0))?, as_count("db", get("db", 2.0))?);
    let rank = as_count("rank", get("rank", (da * db) as f64))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_density(&ProductSpace::bipartite(da, db), rank, &mut rng)
}

fn read_json(path: &Path) -> Outcome<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_state(source: &Source, seed: u64) -> Outcome<(Vec<(String, f64)>, DensityOp)> {
    match (&source.state, &source.family) {
        (Some(path), _) => {
            if !source.params.is_empty() {
                return Err(Failure::usage("--param applies to --family only"));
            }
            Ok((Vec::new(), DensityOp::from_json(&read_json(path)?)?))
        }
        (None, Some(name)) => {
            let params: BTreeMap<String, f64> = source.params.iter().cloned().collect();
            let rho = build_family(name, &params, seed)?;
            Ok((params.into_iter().collect(), rho))
        }
        (None, None) => Err(Failure::usage("give --state FILE or --family NAME")),
    }
}

fn load_constraints(path: &Path) -> Outcome<Vec<DataConstraint>> {
    let v = read_json(path)?;
    let list = v.as_array().ok_or_else(|| Failure::usage("constraints must be a JSON list"))?;
    list.iter()
        .map(|item| {
            let obs = item.get("obs").ok_or_else(|| Failure::usage("constraint without \"obs\""))?;
            let value = item
                .get("value")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| Failure::usage("constraint without numeric \"value\""))?;
            Ok(DataConstraint::raw(HermitianOp::from_json(obs)?, value))
        })
        .collect()
}

struct Row {
    params: Vec<f64>,
    value: f64,
    gap: f64,
    status: String,
    seconds: f64,
}

fn write_csv(out: Option<&Path>, names: &[String], rows: &[Row]) -> Outcome<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<String> = names.to_vec();
    header.extend(["value", "gap", "status", "seconds"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.params.iter().map(|v| v.to_string()).collect();
        rec.push(r.value.to_string());
        rec.push(r.gap.to_string());
        rec.push(r.status.clone());
        rec.push(format!("{:.3}", r.seconds));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(out: Option<&Path>, v: &serde_json::Value) -> Outcome<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(std::io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn evaluate(measure: Measure, rho: &DensityOp, args: &MeasureArgs, opts: ProgramOptions) -> Result<RoofResult, RoofError> {
    match measure {
        Measure::Elin => elin_ppt(rho, &args.cut, opts),
        Measure::Extend => elin_extension(rho, &args.cut, args.level, opts),
        Measure::Assist => assistance_upper(rho, &args.cut, opts),
        Measure::Schmidt => schmidt_r(rho, &args.cut, args.r, opts),
        Measure::Mw => meyer_wallach_roof(rho, opts),
        Measure::Tangle => tangle_ppt(rho, TangleOptions { permutation_invariant: args.permutation_invariant }, opts),
        Measure::Gme => gme_mixer(rho, opts),
    }
}

fn row_of(params: Vec<f64>, r: &RoofResult, tol: f64) -> Row {
    Row { params, value: r.value, gap: r.gap, status: label(r.status, r.gap, tol), seconds: r.seconds }
}

fn run_single(measure: Measure, s: &Single, g: &Global) -> Outcome<()> {
    let (params, rho) = load_state(&s.source, g.seed)?;
    let r = evaluate(measure, &rho, &s.measure, ProgramOptions::with_tol(g.tol))?;
    let names: Vec<String> = params.iter().map(|(k, _)| k.clone()).collect();
    let row = row_of(params.iter().map(|(_, v)| *v).collect(), &r, g.tol);
    write_csv(g.out.as_deref(), &names, &[row])
}

fn run_data(a: &DataArgs, g: &Global, max: bool) -> Outcome<()> {
    let constraints = load_constraints(&a.constraints)?;
    let generator = match (&a.generator, a.spin) {
        (Some(p), _) => HermitianOp::from_json(&read_json(p)?)?,
        (None, Some(axis)) => {
            let s = SpinEnsemble::new(a.qubits)?;
            match axis {
                Axis::X => s.jx,
                Axis::Y => s.jy,
                Axis::Z => s.jz,
            }
        }
        (None, None) => return Err(Failure::usage("give --generator FILE or --spin AXIS")),
    };
    let opts = ProgramOptions::with_tol(g.tol);
    let b = if max { variance_upper_bound(&generator, constraints, opts)? } else { qfi_lower_bound(&generator, constraints, opts)? };
    let r = &b.result;
    let row = Row { params: Vec::new(), value: b.value, gap: r.gap, status: label(r.status, r.gap, g.tol), seconds: r.seconds };
    write_csv(g.out.as_deref(), &[], &[row])
}

fn run_witness(a: &WitnessArgs, g: &Global) -> Outcome<()> {
    let opts = ProgramOptions::with_tol(g.tol);
    let (w, program_space) = match &a.constraints {
        None => {
            let (_, rho) = load_state(&a.source, g.seed)?;
            let r = elin_ppt(&rho, &a.cut, opts)?;
            (extract_witness_for(&r, &rho)?, rho.space().clone())
        }
        Some(path) => {
            let data = load_constraints(path)?;
            let space = data
                .first()
                .map(|d| d.observable.space().clone())
                .ok_or_else(|| Failure::usage("restricted witnesses need at least one constraint"))?;
            let obs: Vec<HermitianOp> = data.iter().map(|d| d.observable.clone()).collect();
            let program = elin_data_program(&space, &a.cut, data, opts)?;
            let r = program.solve()?;
            (extract_witness_restricted(&program, &r, &obs)?, space)
        }
    };
    let m = linear_entropy_objective(&program_space, &a.cut).to_hermitian(&program_space)?;
    let report = verify_witness(&w, &m)?;
    let mut v = w.to_json();
    v["verification"] = serde_json::json!({
        "passed": report.passed,
        "decomposition_residual": report.decomposition_residual,
        "min_eig_p": report.min_eig_p,
        "min_eig_q": report.min_eig_q,
        "min_eig_remainder": report.min_eig_remainder,
    });
    write_json(g.out.as_deref(), &v)?;
    if !report.passed {
        return Err(Failure { code: 3, message: "witness certificate failed verification".into() });
    }
    Ok(())
}

fn workers(g: &Global) -> usize {
    g.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
}

fn run_steer(a: &SteerArgs, g: &Global) -> Outcome<()> {
    let grid = grid::parse_grid(&a.pd_grid).map_err(Failure::usage)?;
    let words = WordSet::level(a.settings, 2, a.word_level)?;
    noisy_singlet_assemblage(0.0, a.settings)?;
    let opts = SteeringOptions { program: ProgramOptions::with_tol(g.tol), ..SteeringOptions::default() };
    let results = grid::run_ordered(grid.len(), workers(g), |k| {
        let start = Instant::now();
        noisy_singlet_assemblage(grid[k], a.settings).and_then(|asm| steering_bound(&asm, &words, opts)).map(|r| Row {
            params: vec![grid[k]],
            value: r.value,
            gap: r.gap,
            status: label(r.status, r.gap, g.tol),
            seconds: start.elapsed().as_secs_f64(),
        })
    });
    collect_rows(g, &["p_d".to_string()], results, grid.len())
}

/// Writes successful rows; failed points become `nan` rows labeled with the error class.
fn collect_rows(g: &Global, names: &[String], results: Vec<Result<Row, RoofError>>, width: usize) -> Outcome<()> {
    let mut worst: Option<Failure> = None;
    let mut rows = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                let f = Failure::from(e);
                eprintln!("point {k}: {}", f.message);
                rows.push(Row {
                    params: vec![f64::NAN; width.min(names.len())],
                    value: f64::NAN,
                    gap: f64::NAN,
                    status: if f.code == 2 { "infeasible".into() } else { "error".into() },
                    seconds: 0.0,
                });
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
            }
        }
    }
    write_csv(g.out.as_deref(), names, &rows)?;
    match worst {
        Some(f) => Err(Failure { code: f.code, message: format!("some grid points failed; last error: {}", f.message) }),
        None => Ok(()),
    }
}

fn run_sweep(a: &SweepArgs, g: &Global) -> Outcome<()> {
    let allowed = family_params(&a.family).ok_or_else(|| Failure::usage(format!("unknown family {}", a.family)))?;
    let mut names = Vec::new();
    let mut axes = Vec::new();
    for (name, spec) in &a.axes {
        if !allowed.contains(&name.as_str()) {
            return Err(Failure::usage(format!("family {} has no parameter {name}", a.family)));
        }
        if names.contains(name) || a.params.iter().any(|(k, _)| k == name) {
            return Err(Failure::usage(format!("parameter {name} given twice")));
        }
        names.push(name.clone());
        axes.push(grid::parse_grid(spec).map_err(Failure::usage)?);
    }
    if axes.is_empty() {
        return Err(Failure::usage("sweep needs at least one --NAME start:stop:step axis"));
    }
    let points = grid::cartesian(&axes);
    let opts = ProgramOptions::with_tol(g.tol);
    let results = grid::run_ordered(points.len(), workers(g), |k| {
        let mut params: BTreeMap<String, f64> = a.params.iter().cloned().collect();
        for (n, v) in names.iter().zip(&points[k]) {
            params.insert(n.clone(), *v);
        }
        match build_family(&a.family, &params, g.seed.wrapping_add(k as u64)) {
            Ok(rho) => Some(evaluate(a.measure, &rho, &a.measure_args, opts).map(|r| row_of(points[k].clone(), &r, g.tol))),
            Err(RoofError::InvalidInput(msg)) => {
                log::info!("skipping point {k}: {msg}");
                None
            }
            Err(e) => Some(Err(e)),
        }
    });
    let kept: Vec<Result<Row, RoofError>> = results.into_iter().flatten().collect();
    let skipped = points.len() - kept.len();
    if skipped > 0 {
        eprintln!("skipped {skipped} grid points outside the family's parameter range");
    }
    let mut all_names = names.clone();
    let fixed: Vec<(String, f64)> = a.params.clone();
    all_names.extend(fixed.iter().map(|(k, _)| k.clone()));
    let kept = kept
        .into_iter()
        .map(|r| {
            r.map(|mut row| {
                row.params.extend(fixed.iter().map(|(_, v)| *v));
                row
            })
        })
        .collect();
    collect_rows(g, &all_names, kept, all_names.len())
}

fn run(cli: Cli) -> Outcome<()> {
    let g = &cli.global;
    if !(g.tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    match &cli.command {
        Command::Elin(s) => run_single(Measure::Elin, s, g),
        Command::Extend(s) => run_single(Measure::Extend, s, g),
        Command::Assist(s) => run_single(Measure::Assist, s, g),
        Command::Schmidt(s) => run_single(Measure::Schmidt, s, g),
        Command::Mw(s) => run_single(Measure::Mw, s, g),
        Command::Tangle(s) => run_single(Measure::Tangle, s, g),
        Command::Gme(s) => run_single(Measure::Gme, s, g),
        Command::Qfi(a) => run_data(a, g, false),
        Command::Varmax(a) => run_data(a, g, true),
        Command::Witness(a) => run_witness(a, g),
        Command::Steer(a) => run_steer(a, g),
        Command::State(a) => {
            let (_, rho) = load_state(&a.source, g.seed)?;
            write_json(g.out.as_deref(), &rho.to_json())
        }
        Command::Sweep(a) => run_sweep(a, g),
    }
}

/// Rewrites `sweep ... --NAME spec` for family parameters into `--axis NAME=spec`.
fn rewrite_sweep_axes(args: Vec<String>) -> Vec<String> {
    let Some(pos) = args.iter().position(|a| a == "sweep") else {
        return args;
    };
    let family = args[pos..]
        .windows(2)
        .find(|w| w[0] == "--family")
        .map(|w| w[1].clone())
        .or_else(|| args[pos..].iter().find_map(|a| a.strip_prefix("--family=").map(String::from)));
    let Some(params) = family.as_deref().and_then(family_params) else {
        return args;
    };
    let mut out: Vec<String> = args[..=pos].to_vec();
    let mut it = args[pos + 1..].iter().peekable();
    while let Some(a) = it.next() {
        let flag = a.strip_prefix("--").unwrap_or("");
        let (name, inline) = match flag.split_once('=') {
            Some((n, v)) => (n, Some(v.to_string())),
            None => (flag, None),
        };
        if !name.is_empty() && params.contains(&name) {
            let spec = match inline {
                Some(v) => Some(v),
                None => it.next().cloned(),
            };
            if let Some(spec) = spec {
                out.push("--axis".into());
                out.push(format!("{name}={spec}"));
                continue;
            }
        }
        out.push(a.clone());
    }
    out
}

fn main() -> ExitCode {
    let args = rewrite_sweep_axes(std::env::args().collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn sweep_axes_are_rewritten() {
        let out = rewrite_sweep_axes(s(&["cr", "sweep", "elin", "--family", "horodecki", "--a", "0:1:0.5", "--p=0:1:0.5", "--tol", "1e-6"]));
        assert_eq!(out, s(&["cr", "sweep", "elin", "--family", "horodecki", "--axis", "a=0:1:0.5", "--axis", "p=0:1:0.5", "--tol", "1e-6"]));
    }

    #[test]
    fn other_commands_untouched() {
        let args = s(&["cr", "elin", "--family", "horodecki", "--param", "a=0.5"]);
        assert_eq!(rewrite_sweep_axes(args.clone()), args);
    }

    #[test]
    fn status_labels() {
        assert_eq!(label(Status::Optimal, 1e-9, 1e-7), "optimal");
        assert_eq!(label(Status::Optimal, 1e-5, 1e-7), "inaccurate");
        assert_eq!(label(Status::MaxIter, 1e-5, 1e-7), "max_iter");
    }

    #[test]
    fn random_family_is_seeded() {
        let p = BTreeMap::new();
        let a = build_family("random", &p, 3).unwrap();
        let b = build_family("random", &p, 3).unwrap();
        assert_eq!(a, b);
        assert!(build_family("random", &[("rank".to_string(), 0.0)].into_iter().collect(), 3).is_err());
    }
}
