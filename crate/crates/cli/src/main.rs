use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde_json::{json, Value};

use rwcut::bench::{brute_force_maxcut, gen_planted, greedy_cut, random_cut, MAX_BRUTE_FORCE};
use rwcut::graph::load_graph;
use rwcut::local::{ls_curves_csv, run_cut_or_bound, CutOrBoundPlan};
use rwcut::solver::quality::tradeoff_point;
use rwcut::solver::{balance_solve, simple_solve, SolveReport, SolverConfig};
use rwcut::spectral::trevisan_baseline;
use rwcut::threshold::AlgoParams;
use rwcut::walk::{run_walks, WalkConfig};
use rwcut::{Error, Partition, WeightedGraph};

/// Random-walk MaxCut approximation toolkit.
///
/// Logging goes to stderr and is controlled by RWCUT_LOG (quiet, info, debug).
#[derive(Parser)]
#[command(name = "rwcut", version)]
struct Cli {
    /// Worker threads for walk sampling; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve MaxCut on an edge-list graph; prints a JSON report.
    Solve(SolveArgs),
    /// Generate a planted-bipartition instance plus a metadata sidecar.
    Gen(GenArgs),
    /// Score a partition file against a graph and the baselines.
    Evaluate(EvaluateArgs),
    /// Guaranteed ratio against runtime exponent, as CSV.
    Tradeoff(TradeoffArgs),
    /// Run one local partitioning call; prints a JSON report.
    Cutbound(CutboundArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Simple,
    Balance,
    Trevisan,
    Greedy,
    Random,
    Exact,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Simple => "simple",
            Algo::Balance => "balance",
            Algo::Trevisan => "trevisan",
            Algo::Greedy => "greedy",
            Algo::Random => "random",
            Algo::Exact => "exact",
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Classification slack multiplier
    #[arg(long, default_value_t = AlgoParams::default().kappa)]
    kappa: f64,
    /// Mixing accuracy used for the walk length
    #[arg(long, default_value_t = AlgoParams::default().delta)]
    delta: f64,
    /// Threshold and deficit sweep granularity
    #[arg(long, default_value_t = AlgoParams::default().gamma)]
    gamma: f64,
    /// Total walk-step budget; exhausted levels fall back to greedy
    #[arg(long, default_value_t = SolverConfig::default().step_budget)]
    budget: u64,
    /// Probe starts per level [default: ceil(ln n)]
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// Input graph (edge list)
    #[arg(long = "in")]
    input: PathBuf,
    /// Partition output [default: <in>.part]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algo::Simple)]
    algo: Algo,
    /// Walk-length exponent for simple
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Runtime exponent for balance
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Free parameter for balance [default: the ratio-optimal value for b]
    #[arg(long)]
    mu1: Option<f64>,
    /// Deficit assumed by balance's threshold rounds [default: 1 - 0.75^(mu1/(1+mu1))]
    #[arg(long)]
    eps1: Option<f64>,
    /// Random seed; a fresh one is drawn and printed when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Independent runs with seeds seed, seed+1, ...; the best is kept
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[command(flatten)]
    walk: WalkArgs,
}

#[derive(Args)]
struct GenArgs {
    /// Vertex count (even)
    #[arg(long)]
    n: usize,
    /// Fraction of edges placed inside a half
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Average degree
    #[arg(long, default_value_t = 8.0)]
    deg: f64,
    /// Random seed; a fresh one is drawn and printed when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list output [default: planted_n<n>_s<seed>.el]; metadata goes to <out>.meta.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input graph (edge list)
    #[arg(long = "in")]
    input: PathBuf,
    /// Partition file to score
    #[arg(long)]
    part: PathBuf,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Runtime exponents, comma separated (each > 1.5)
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.6, 2.0, 3.0])]
    b: Vec<f64>,
}

#[derive(Args)]
struct CutboundArgs {
    /// Input graph (edge list)
    #[arg(long = "in")]
    input: PathBuf,
    /// Start vertex [default: drawn by degree from the seed]
    #[arg(long)]
    start: Option<usize>,
    /// Target bound exponent: alpha = m^-tau
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Walk-length rate: length = ceil(ln m / zeta)
    #[arg(long, default_value_t = 0.5)]
    zeta: f64,
    /// Random seed; a fresh one is drawn and printed when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Write the empirical sweep curves of every length as CSV
    #[arg(long)]
    dump_curves: Option<PathBuf>,
}

/// Failure with its exit code: 1 for unreadable input, 2 for bad parameters.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn params(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn file(path: &Path, err: impl std::fmt::Display) -> Self {
        Failure { code: 1, msg: format!("{}: {err}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParams(_) | Error::Resource(_) => 2,
            _ => 1,
        };
        Failure { code, msg: err.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = init_logging() {
        eprintln!("error: {}", f.msg);
        return ExitCode::from(f.code);
    }
    let outcome = configure_threads(cli.threads).and_then(|_| match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Tradeoff(a) => cmd_tradeoff(a),
        Command::Cutbound(a) => cmd_cutbound(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn init_logging() -> CliResult<()> {
    let level = match std::env::var("RWCUT_LOG").as_deref() {
        Err(_) | Ok("quiet") => log::LevelFilter::Error,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(Failure::params(format!("RWCUT_LOG must be quiet, info or debug, not {other:?}"))),
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    Ok(())
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Failure::params("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::params(format!("thread pool: {e}")))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn read_graph(path: &Path) -> CliResult<WeightedGraph> {
    let file = File::open(path).map_err(|e| Failure::file(path, e))?;
    load_graph(BufReader::new(file)).map_err(|e| Failure::file(path, e))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::file(path, e))
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn solver_config(w: &WalkArgs) -> CliResult<SolverConfig> {
    let cfg = SolverConfig {
        params: AlgoParams { kappa: w.kappa, delta: w.delta, gamma: w.gamma, ..AlgoParams::default() },
        probes: w.probes,
        step_budget: w.budget,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Report for the baselines, which do no walks.
fn baseline_report(g: &WeightedGraph, algo: Algo, partition: Partition, started: Instant) -> SolveReport {
    SolveReport {
        algorithm: algo.name().to_string(),
        cut_value: partition.value(g),
        eps: None,
        candidates: Vec::new(),
        levels: Vec::new(),
        walks: 0,
        steps: 0,
        greedy_value: greedy_cut(g).value(g),
        used_greedy: false,
        partition,
        wall_time: started.elapsed(),
    }
}

fn run_once(g: &WeightedGraph, a: &SolveArgs, cfg: &SolverConfig, mu1: Option<f64>, seed: u64) -> CliResult<SolveReport> {
    let started = Instant::now();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let report = match a.algo {
        Algo::Simple => simple_solve(g, a.mu, cfg, seed)?,
        Algo::Balance => balance_solve(g, a.b, mu1.expect("resolved for balance"), a.eps1, cfg, seed)?,
        Algo::Trevisan => baseline_report(g, a.algo, trevisan_baseline(g, None, &mut rng), started),
        Algo::Greedy => baseline_report(g, a.algo, greedy_cut(g), started),
        Algo::Random => baseline_report(g, a.algo, random_cut(g, &mut rng), started),
        Algo::Exact => {
            let (_, left) = brute_force_maxcut(g)?;
            baseline_report(g, a.algo, Partition::new(left.mask().to_vec()), started)
        }
    };
    Ok(report)
}

fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    if a.reps == 0 {
        return Err(Failure::params("--reps must be at least 1"));
    }
    let cfg = solver_config(&a.walk)?;
    let g = read_graph(&a.input)?;
    if a.algo == Algo::Exact && g.vertex_count() > MAX_BRUTE_FORCE {
        return Err(Failure::params(format!("exact search handles at most {MAX_BRUTE_FORCE} vertices")));
    }
    let mu1 = match (a.algo, a.mu1) {
        (Algo::Balance, Some(mu1)) => Some(mu1),
        (Algo::Balance, None) => Some(tradeoff_point(a.b)?.mu1),
        _ => None,
    };
    let seed = resolve_seed(a.seed);

    let mut runs = Vec::with_capacity(a.reps);
    let mut wall = Duration::ZERO;
    for r in 0..a.reps {
        let report = run_once(&g, &a, &cfg, mu1, seed.wrapping_add(r as u64))?;
        wall += report.wall_time;
        runs.push(report);
    }
    let best = (0..runs.len())
        .max_by(|&i, &j| runs[i].cut_value.total_cmp(&runs[j].cut_value).then(j.cmp(&i)))
        .expect("at least one run");
    let mut values: Vec<f64> = runs.iter().map(|r| r.cut_value).collect();
    values.sort_by(f64::total_cmp);

    let out = a.out.clone().unwrap_or_else(|| {
        let mut p = a.input.clone().into_os_string();
        p.push(".part");
        PathBuf::from(p)
    });
    write_file(&out, &runs[best].partition.to_text())?;

    let report = json!({
        "algorithm": a.algo.name(),
        "input": a.input.display().to_string(),
        "partition": out.display().to_string(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "seed": seed,
        "mu": (a.algo == Algo::Simple).then_some(a.mu),
        "b": (a.algo == Algo::Balance).then_some(a.b),
        "mu1": mu1,
        "cut_value": runs[best].cut_value,
        "median_cut_value": values[values.len() / 2],
        "walks": runs.iter().map(|r| r.walks).sum::<u64>(),
        "steps": runs.iter().map(|r| r.steps).sum::<u64>(),
        "best_run": best,
        "runs": runs,
    });
    print_json(&report);
    eprintln!("wall time: {:.3} s", wall.as_secs_f64());
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed);
    let inst = gen_planted(a.n, a.eps, a.deg, seed)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("planted_n{}_s{seed}.el", a.n)));
    let mut meta_path = out.clone().into_os_string();
    meta_path.push(".meta.json");
    let meta_path = PathBuf::from(meta_path);

    write_file(&out, &inst.graph.to_edge_list())?;
    let meta = serde_json::to_string_pretty(&inst.meta()).expect("metadata serializes");
    write_file(&meta_path, &(meta + "\n"))?;
    print_json(&json!({
        "graph": out.display().to_string(),
        "meta": meta_path.display().to_string(),
        "vertices": inst.graph.vertex_count(),
        "edges": inst.graph.edge_count(),
        "planted_value": inst.planted_value,
    }));
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> CliResult<()> {
    let g = read_graph(&a.input)?;
    let text = fs::read_to_string(&a.part).map_err(|e| Failure::file(&a.part, e))?;
    let part = Partition::parse(&text).map_err(|e| Failure::file(&a.part, e))?;
    if part.len() != g.vertex_count() {
        return Err(Failure::file(
            &a.part,
            format!("partition has {} vertices, graph has {}", part.len(), g.vertex_count()),
        ));
    }
    let exact = if g.vertex_count() <= MAX_BRUTE_FORCE { Some(brute_force_maxcut(&g)?.0) } else { None };
    print_json(&json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "cut_weight": part.cut_weight(&g),
        "edge_weight": g.edge_weight(),
        "cut_value": part.value(&g),
        "greedy_value": greedy_cut(&g).value(&g),
        "exact_value": exact,
    }));
    Ok(())
}

fn cmd_tradeoff(a: TradeoffArgs) -> CliResult<()> {
    if a.b.is_empty() {
        return Err(Failure::params("--b needs at least one value"));
    }
    let mut csv = String::from("b,mu1,tau,mu2,ratio,algorithm\n");
    for &b in &a.b {
        let p = tradeoff_point(b)?;
        let algo = match p.algorithm {
            rwcut::solver::quality::TradeoffAlgorithm::Simple => "simple",
            rwcut::solver::quality::TradeoffAlgorithm::Balance => "balance",
        };
        csv.push_str(&format!("{},{:.6},{:.6},{:.6},{:.6},{algo}\n", p.b, p.mu1, p.tau, p.mu2, p.ratio));
    }
    print!("{csv}");
    Ok(())
}

fn cmd_cutbound(a: CutboundArgs) -> CliResult<()> {
    let g = read_graph(&a.input)?;
    let plan = CutOrBoundPlan::new(&g, a.tau, a.zeta)?;
    let seed = resolve_seed(a.seed);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let start = match a.start {
        Some(s) if s >= g.vertex_count() => {
            return Err(Failure::params(format!("start {s} out of range for {} vertices", g.vertex_count())))
        }
        Some(s) => s,
        None => g.sample_vertex_by_degree(&mut rng)?,
    };
    let started = Instant::now();
    let report = run_cut_or_bound(&g, start, &plan, seed)?;
    if let Some(path) = &a.dump_curves {
        // Same seed and plan, so this replays the walks of the call above.
        let cfg = WalkConfig::new(plan.walk_length, plan.walks, seed).per_length();
        let tally = run_walks(&g, start, &cfg)?;
        write_file(path, &ls_curves_csv(&g, &tally)?)?;
    }
    let value = json!({ "seed": seed, "report": report });
    print_json(&value);
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    Ok(())
}
