//! Command-line front end: generate instances, solve the LPs, build the
//! permutation distributions, simulate strategies, and verify exact bounds.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use stochmatch::decomp::{build_distribution_poi, build_distribution_qc, output_probability_item};
use stochmatch::gen;
use stochmatch::harness::{
    coupled_free_info, export_csv, prepare_approx_poi, prepare_approx_qc, prepare_greedy_qc,
    simulate, trial_rng, PreparedStrategy, SimulationReport,
};
use stochmatch::lp::{solve_lp_poi, solve_lp_qc, Caps, ItemGraph, LPSolution, LpError, Side};
use stochmatch::model::{
    parse_instance, poi_to_surrogate, scale_probabilities, scale_probabilities_poi,
    serialize_instance, Instance, SurrogateInstance,
};
use stochmatch::oracles::{
    brute_force_opt_poi, brute_force_opt_qc, exact_expected_offline_poi, expected_greedy_qc,
};
use stochmatch::rational::{format_rat, parse_rat, Rat};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "stochmatch", version, about = "Stochastic bipartite matching pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Figure1,
    K22,
    RandomQc,
    RandomPoi,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Approx,
    Greedy,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Master seed for all randomized work.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials per simulation.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Probability scaling parameter as a rational in (0, 1); applied
    /// automatically as 1/1000000 when an instance has a certain edge.
    #[arg(long)]
    gamma: Option<String>,
    /// Max items incident to one vertex for subset enumeration.
    #[arg(long, default_value_t = 20)]
    cap_degree: usize,
    /// Max per-vertex lattice family size.
    #[arg(long, default_value_t = 65_536)]
    cap_lattice: usize,
}

impl CommonFlags {
    fn caps(&self) -> Caps {
        Caps { subset_items: self.cap_degree, lattice_sets: self.cap_lattice }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Gen {
        family: Family,
        #[arg(long, default_value_t = 3)]
        left: usize,
        #[arg(long, default_value_t = 3)]
        right: usize,
        #[arg(long, default_value_t = 5)]
        edges: usize,
        #[arg(long, default_value_t = 3)]
        max_support: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the matching LP and print the solution as JSON.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the per-left-vertex permutation distributions as JSON.
    Decompose {
        instance: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo run of one strategy.
    Simulate {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyName::Approx)]
        strategy: StrategyName,
        #[command(flatten)]
        flags: CommonFlags,
        /// Write per-trial JSONL traces here (runs trials sequentially).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the threshold strategy and greedy side by side (QC only).
    Compare {
        instance: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check exact bounds and marginal identities; exit 1 on any failure.
    Verify {
        instance: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full run: scale, solve, decompose, simulate, verify, export.
    Pipeline {
        instance: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        /// Output directory for artifacts.
        #[arg(long, default_value = "pipeline-out")]
        out: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Verification(String),
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Cap(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn from_lp(e: LpError) -> CliError {
    // Cap errors name the flag that raises the limit.
    match &e {
        LpError::CapExceeded { .. } => {
            CliError::Cap(format!("{e} (raise --cap-degree / --cap-lattice)"))
        }
    }
}

fn from_harness(e: stochmatch::harness::HarnessError) -> CliError {
    use stochmatch::decomp::DecompError;
    use stochmatch::harness::HarnessError;
    match e {
        HarnessError::Lp(e) | HarnessError::Decomp(DecompError::Lp(e)) => from_lp(e),
        HarnessError::Decomp(e) => CliError::Usage(e.to_string()),
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(usage)
}

/// Applies the requested or automatic certain-edge scaling.
fn scaled(instance: Instance, gamma: &Option<String>) -> Result<Instance, CliError> {
    let gamma = match gamma {
        Some(text) => {
            let g = parse_rat(text).map_err(usage)?;
            if g <= Rat::new(0.into(), 1.into()) || g >= Rat::new(1.into(), 1.into()) {
                return Err(usage("--gamma must lie strictly between 0 and 1"));
            }
            Some(g)
        }
        None => None,
    };
    let has_certain = match &instance {
        Instance::Qc(i) => i.has_certain_edge(),
        Instance::Poi(i) => i.has_certain_edge(),
    };
    let gamma = match (gamma, has_certain) {
        (Some(g), _) => g,
        (None, true) => {
            eprintln!("notice: certain edge present; scaling probabilities by gamma = 1/1000000");
            Rat::new(1.into(), 1_000_000.into())
        }
        (None, false) => return Ok(instance),
    };
    Ok(match instance {
        Instance::Qc(i) => Instance::Qc(scale_probabilities(&i, &gamma).map_err(usage)?),
        Instance::Poi(i) => Instance::Poi(scale_probabilities_poi(&i, &gamma).map_err(usage)?),
    })
}

/// LP input for either model: the item graph plus, for PoI, the surrogate.
struct Solved {
    graph: ItemGraph,
    solution: LPSolution,
    surrogate: Option<SurrogateInstance>,
}

fn solve(instance: &Instance, caps: &Caps) -> Result<Solved, CliError> {
    match instance {
        Instance::Qc(i) => {
            let (graph, solution) = solve_lp_qc(i, caps).map_err(from_lp)?;
            Ok(Solved { graph, solution, surrogate: None })
        }
        Instance::Poi(i) => {
            let surrogate = poi_to_surrogate(i).map_err(usage)?;
            let (graph, solution) = solve_lp_poi(&surrogate, caps).map_err(from_lp)?;
            Ok(Solved { graph, solution, surrogate: Some(surrogate) })
        }
    }
}

fn solution_artifact(solved: &Solved, seed: u64) -> serde_json::Value {
    serde_json::json!({
        "tool_version": VERSION,
        "seed": seed,
        "solution": solved.solution.to_json(&solved.graph),
        "dropped_edges": solved.surrogate.as_ref().map(|s| s.dropped.clone()),
    })
}

fn decomposition_artifact(
    instance: &Instance,
    solved: &Solved,
    caps: &Caps,
    seed: u64,
) -> Result<serde_json::Value, CliError> {
    let mut per_vertex = Vec::new();
    for a in 0..solved.graph.left_names.len() {
        let dist = match instance {
            Instance::Qc(_) => build_distribution_qc(&solved.graph, a, &solved.solution, caps),
            Instance::Poi(_) => build_distribution_poi(&solved.graph, a, &solved.solution, caps),
        }
        .map_err(|e| from_harness(e.into()))?;
        per_vertex.push(serde_json::json!({
            "vertex": solved.graph.left_names[a],
            "distribution": dist.to_json(&solved.graph),
        }));
    }
    Ok(serde_json::json!({
        "tool_version": VERSION,
        "seed": seed,
        "vertices": per_vertex,
    }))
}

fn prepare(instance: &Instance, solved: &Solved, caps: &Caps) -> Result<PreparedStrategy, CliError> {
    match instance {
        Instance::Qc(i) => prepare_approx_qc(i, caps).map_err(from_harness),
        Instance::Poi(_) => {
            prepare_approx_poi(solved.surrogate.as_ref().unwrap(), caps).map_err(from_harness)
        }
    }
}

fn oracle_value(instance: &Instance, solved: &Solved) -> Option<Rat> {
    match instance {
        Instance::Qc(i) => brute_force_opt_qc(i, 12).ok(),
        Instance::Poi(i) => {
            let _ = solved;
            brute_force_opt_poi(i, 8).ok()
        }
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run_simulation(
    strategy: &PreparedStrategy,
    id: &str,
    flags: &CommonFlags,
    oracle: Option<Rat>,
    trace: Option<&PathBuf>,
) -> Result<SimulationReport, CliError> {
    if let Some(path) = trace {
        let mut file = std::fs::File::create(path)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        let graph = match strategy {
            PreparedStrategy::ApproxQc { graph, .. }
            | PreparedStrategy::ApproxPoi { graph, .. } => Some(graph.clone()),
            PreparedStrategy::GreedyQc { instance, .. } => Some(ItemGraph::from_qc(instance)),
            PreparedStrategy::NeverQuery => None,
        };
        for t in 0..flags.trials {
            let mut rng = trial_rng(flags.seed, t);
            let rec = strategy.run(&mut rng);
            if let Some(g) = &graph {
                writeln!(file, "{}", rec.to_json(g)).map_err(usage)?;
            }
        }
    }
    Ok(simulate(strategy, id, flags.trials, flags.seed, oracle))
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn verify_checks(instance: &Instance, solved: &Solved, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    // Exact marginal identity: the analytic output probability of every item
    // under the built distributions equals its LP value.
    for a in 0..solved.graph.left_names.len() {
        let dist = match instance {
            Instance::Qc(_) => build_distribution_qc(&solved.graph, a, &solved.solution, caps),
            Instance::Poi(_) => build_distribution_poi(&solved.graph, a, &solved.solution, caps),
        }
        .map_err(|e| from_harness(e.into()))?;
        let mut ok = true;
        let mut detail = String::from("output probabilities equal the LP solution");
        for &item in solved.graph.items_at(Side::Left, a) {
            let got = output_probability_item(&solved.graph, &dist, item);
            if got != solved.solution.x[item] {
                ok = false;
                detail = format!(
                    "item {}: output probability {} != x {}",
                    solved.graph.item_key(item),
                    format_rat(&got),
                    format_rat(&solved.solution.x[item]),
                );
                break;
            }
        }
        checks.push(Check {
            name: format!("marginals[{}]", solved.graph.left_names[a]),
            pass: ok,
            detail,
        });
    }
    // Oracle sandwich where the brute-force caps allow it.
    match instance {
        Instance::Qc(i) => {
            if let Ok(opt) = brute_force_opt_qc(i, 12) {
                checks.push(Check {
                    name: "opt-below-lp".into(),
                    pass: opt <= solved.solution.objective,
                    detail: format!(
                        "opt {} vs lp {}",
                        format_rat(&opt),
                        format_rat(&solved.solution.objective)
                    ),
                });
            }
            if let Ok(g) = expected_greedy_qc(i, 1 << 16) {
                checks.push(Check {
                    name: "greedy-below-lp".into(),
                    pass: g <= solved.solution.objective,
                    detail: format!(
                        "greedy {} vs lp {}",
                        format_rat(&g),
                        format_rat(&solved.solution.objective)
                    ),
                });
            }
        }
        Instance::Poi(i) => {
            let s = solved.surrogate.as_ref().unwrap();
            let offline = exact_expected_offline_poi(s, 1 << 16).ok();
            if let Some(off) = &offline {
                checks.push(Check {
                    name: "offline-below-lp".into(),
                    pass: *off <= solved.solution.objective,
                    detail: format!(
                        "offline {} vs lp {}",
                        format_rat(off),
                        format_rat(&solved.solution.objective)
                    ),
                });
            }
            if let (Ok(opt), Some(off)) = (brute_force_opt_poi(i, 8), &offline) {
                checks.push(Check {
                    name: "opt-below-offline".into(),
                    pass: opt <= *off,
                    detail: format!("opt {} vs offline {}", format_rat(&opt), format_rat(off)),
                });
            }
        }
    }
    Ok(checks)
}

fn checks_artifact(checks: &[Check], seed: u64) -> serde_json::Value {
    serde_json::json!({
        "tool_version": VERSION,
        "seed": seed,
        "checks": checks.iter().map(|c| serde_json::json!({
            "name": c.name,
            "pass": c.pass,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { family, left, right, edges, max_support, seed, out } => {
            let instance = match family {
                Family::Figure1 => Instance::Qc(gen::figure1()),
                Family::K22 => Instance::Qc(gen::k22()),
                Family::RandomQc => {
                    if edges > left * right {
                        return Err(usage("--edges exceeds the number of vertex pairs"));
                    }
                    Instance::Qc(gen::random_qc(left, right, edges, seed))
                }
                Family::RandomPoi => {
                    if edges > left * right {
                        return Err(usage("--edges exceeds the number of vertex pairs"));
                    }
                    Instance::Poi(gen::random_poi(left, right, edges, max_support, seed))
                }
            };
            write_or_print(&out, &serialize_instance(&instance))
        }
        Command::Solve { instance, flags, out } => {
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let solved = solve(&inst, &flags.caps())?;
            write_or_print(&out, &pretty(&solution_artifact(&solved, flags.seed)))
        }
        Command::Decompose { instance, flags, out } => {
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let solved = solve(&inst, &flags.caps())?;
            let artifact = decomposition_artifact(&inst, &solved, &flags.caps(), flags.seed)?;
            write_or_print(&out, &pretty(&artifact))
        }
        Command::Simulate { instance, strategy, flags, trace, out } => {
            let id = instance_id(&instance);
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let solved = solve(&inst, &flags.caps())?;
            let prepared = match (strategy, &inst) {
                (StrategyName::Approx, _) => prepare(&inst, &solved, &flags.caps())?,
                (StrategyName::Greedy, Instance::Qc(i)) => prepare_greedy_qc(i),
                (StrategyName::Greedy, Instance::Poi(_)) => {
                    return Err(usage("greedy is defined for query-commit instances"));
                }
            };
            let oracle = oracle_value(&inst, &solved);
            let report = run_simulation(&prepared, &id, &flags, oracle, trace.as_ref())?;
            write_or_print(&out, &export_csv(std::slice::from_ref(&report)))
        }
        Command::Compare { instance, flags, out } => {
            let id = instance_id(&instance);
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let Instance::Qc(qc) = &inst else {
                return Err(usage("compare is defined for query-commit instances"));
            };
            let solved = solve(&inst, &flags.caps())?;
            let oracle = oracle_value(&inst, &solved);
            let approx = prepare(&inst, &solved, &flags.caps())?;
            let greedy = prepare_greedy_qc(qc);
            let mut reports =
                vec![run_simulation(&approx, &id, &flags, oracle.clone(), None)?];
            let mut greedy_report = run_simulation(&greedy, &id, &flags, oracle, None)?;
            greedy_report.lp_bound = Some(solved.solution.objective.clone());
            reports.push(greedy_report);
            write_or_print(&out, &export_csv(&reports))
        }
        Command::Verify { instance, flags, out } => {
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let solved = solve(&inst, &flags.caps())?;
            let checks = verify_checks(&inst, &solved, &flags.caps())?;
            write_or_print(&out, &pretty(&checks_artifact(&checks, flags.seed)))?;
            if checks.iter().any(|c| !c.pass) {
                return Err(CliError::Verification("verification checks failed".into()));
            }
            Ok(())
        }
        Command::Pipeline { instance, flags, out } => {
            let id = instance_id(&instance);
            let inst = scaled(load_instance(&instance)?, &flags.gamma)?;
            let caps = flags.caps();
            let solved = solve(&inst, &caps)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| usage(format!("cannot create {}: {e}", out.display())))?;
            let write = |name: &str, content: &str| {
                write_or_print(&Some(out.join(name)), content)
            };
            write("solution.json", &pretty(&solution_artifact(&solved, flags.seed)))?;
            write(
                "decomposition.json",
                &pretty(&decomposition_artifact(&inst, &solved, &caps, flags.seed)?),
            )?;

            let oracle = oracle_value(&inst, &solved);
            let approx = prepare(&inst, &solved, &caps)?;
            let mut reports = vec![run_simulation(&approx, &id, &flags, oracle.clone(), None)?];
            if let Instance::Qc(qc) = &inst {
                let mut greedy = run_simulation(&prepare_greedy_qc(qc), &id, &flags, oracle, None)?;
                greedy.lp_bound = Some(solved.solution.objective.clone());
                reports.push(greedy);
            } else {
                let coupled = coupled_free_info(&approx, flags.trials, flags.seed);
                write(
                    "coupled.json",
                    &pretty(&serde_json::json!({
                        "tool_version": VERSION,
                        "seed": coupled.master_seed,
                        "trials": coupled.trials,
                        "mean_net": format!("{:.12}", coupled.mean_z),
                        "mean_free_info": format!("{:.12}", coupled.mean_z_free),
                        "diff_mean": format!("{:.12}", coupled.diff_mean),
                        "diff_ci_95": format!("{:.12}", coupled.diff_ci_95),
                    })),
                )?;
            }
            write("results.csv", &export_csv(&reports))?;

            let checks = verify_checks(&inst, &solved, &caps)?;
            write("verify.json", &pretty(&checks_artifact(&checks, flags.seed)))?;
            for c in &checks {
                println!("{} {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.pass) {
                return Err(CliError::Verification("pipeline verification failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
