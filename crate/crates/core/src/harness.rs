//! Seeded Monte Carlo engine: strategy preparation, parallel trials with
//! per-trial RNG streams, coupled free-information runs, and CSV export.

use crate::decomp::{
    build_distribution_poi, build_distribution_qc, DecompError, PermutationDistribution,
};
use crate::lp::{solve_lp_poi, solve_lp_qc, Caps, ItemGraph, LPSolution, LpError};
use crate::model::{QCInstance, SurrogateInstance};
use crate::rational::{format_rat, format_rat_decimal, rat_to_f64, Rat};
use crate::strategies::{
    approx_poi, approx_qc, greedy_qc, PoiRealizationSampler, QcRealizationSampler, RunRecord,
};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

/// A strategy with all per-instance work (LP solve, distribution
/// construction, sampler setup) done once, reusable across trials.
pub enum PreparedStrategy {
    ApproxQc {
        graph: ItemGraph,
        solution: LPSolution,
        dists: Vec<PermutationDistribution>,
        sampler: QcRealizationSampler,
    },
    ApproxPoi {
        surrogate: SurrogateInstance,
        graph: ItemGraph,
        solution: LPSolution,
        dists: Vec<PermutationDistribution>,
        sampler: PoiRealizationSampler,
    },
    GreedyQc {
        instance: QCInstance,
        sampler: QcRealizationSampler,
    },
    NeverQuery,
}

impl PreparedStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PreparedStrategy::ApproxQc { .. } => "approx-qc",
            PreparedStrategy::ApproxPoi { .. } => "approx-poi",
            PreparedStrategy::GreedyQc { .. } => "greedy",
            PreparedStrategy::NeverQuery => "never-query",
        }
    }

    pub fn lp_objective(&self) -> Option<&Rat> {
        match self {
            PreparedStrategy::ApproxQc { solution, .. }
            | PreparedStrategy::ApproxPoi { solution, .. } => Some(&solution.objective),
            _ => None,
        }
    }

    pub fn run(&self, rng: &mut ChaCha8Rng) -> RunRecord {
        match self {
            PreparedStrategy::ApproxQc { graph, solution, dists, sampler } => {
                let exists = sampler.sample(rng);
                approx_qc(graph, solution, dists, &exists, rng)
            }
            PreparedStrategy::ApproxPoi { surrogate, graph, solution, dists, sampler } => {
                let realized = sampler.sample(rng);
                approx_poi(graph, surrogate, solution, dists, &realized, rng)
            }
            PreparedStrategy::GreedyQc { instance, sampler } => {
                let exists = sampler.sample(rng);
                greedy_qc(instance, &exists)
            }
            PreparedStrategy::NeverQuery => RunRecord {
                matching: Vec::new(),
                queried: Vec::new(),
                arrival_times: Vec::new(),
                gross_value: Rat::zero(),
                query_cost: Rat::zero(),
                net_value: Rat::zero(),
                surrogate_value: Rat::zero(),
            },
        }
    }
}

pub fn prepare_approx_qc(
    instance: &QCInstance,
    caps: &Caps,
) -> Result<PreparedStrategy, HarnessError> {
    let (graph, solution) = solve_lp_qc(instance, caps)?;
    let dists = (0..graph.left_names.len())
        .map(|a| build_distribution_qc(&graph, a, &solution, caps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PreparedStrategy::ApproxQc {
        graph,
        solution,
        dists,
        sampler: QcRealizationSampler::new(instance),
    })
}

pub fn prepare_approx_poi(
    surrogate: &SurrogateInstance,
    caps: &Caps,
) -> Result<PreparedStrategy, HarnessError> {
    let (graph, solution) = solve_lp_poi(surrogate, caps)?;
    let dists = (0..graph.left_names.len())
        .map(|a| build_distribution_poi(&graph, a, &solution, caps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PreparedStrategy::ApproxPoi {
        surrogate: surrogate.clone(),
        graph,
        solution,
        dists,
        sampler: PoiRealizationSampler::new(&surrogate.base),
    })
}

pub fn prepare_greedy_qc(instance: &QCInstance) -> PreparedStrategy {
    PreparedStrategy::GreedyQc {
        instance: instance.clone(),
        sampler: QcRealizationSampler::new(instance),
    }
}

/// Independent per-trial stream: the seed block is (master_seed, trial).
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub strategy: String,
    pub instance: String,
    pub trials: u64,
    pub mean: f64,
    pub sample_variance: f64,
    pub ci_half_width_95: f64,
    pub master_seed: u64,
    pub lp_bound: Option<Rat>,
    pub oracle_opt: Option<Rat>,
}

fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let ci = 1.96 * (variance / n).sqrt();
    (mean, variance, ci)
}

/// Monte Carlo estimate of the strategy's expected net value. Trials run in
/// parallel but fold in trial-index order, so reports are bitwise
/// reproducible for a given (inputs, seed).
pub fn simulate(
    strategy: &PreparedStrategy,
    instance_id: &str,
    trials: u64,
    master_seed: u64,
    oracle_opt: Option<Rat>,
) -> SimulationReport {
    assert!(trials >= 2, "need at least two trials for a variance");
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            rat_to_f64(&strategy.run(&mut rng).net_value)
        })
        .collect();
    let (mean, sample_variance, ci_half_width_95) = summarize(&values);
    SimulationReport {
        strategy: strategy.name().to_owned(),
        instance: instance_id.to_owned(),
        trials,
        mean,
        sample_variance,
        ci_half_width_95,
        master_seed,
        lp_bound: strategy.lp_objective().cloned(),
        oracle_opt,
    }
}

impl SimulationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "strategy": self.strategy,
            "instance": self.instance,
            "trials": self.trials,
            "mean": format!("{:.12}", self.mean),
            "sample_variance": format!("{:.12}", self.sample_variance),
            "ci_half_width_95": format!("{:.12}", self.ci_half_width_95),
            "master_seed": self.master_seed,
            "lp_bound": self.lp_bound.as_ref().map(format_rat),
            "oracle_opt": self.oracle_opt.as_ref().map(format_rat),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledReport {
    pub trials: u64,
    pub master_seed: u64,
    /// Net value of the paying execution.
    pub mean_z: f64,
    /// Matched surrogate value of the identical cost-free execution.
    pub mean_z_free: f64,
    pub diff_mean: f64,
    pub diff_ci_95: f64,
}

/// Runs the paying execution and reads off its cost-free twin from the same
/// trace: same RNG stream, same draws, so the difference is paired.
pub fn coupled_free_info(
    strategy: &PreparedStrategy,
    trials: u64,
    master_seed: u64,
) -> CoupledReport {
    assert!(
        matches!(strategy, PreparedStrategy::ApproxPoi { .. }),
        "coupled runs are defined for the PoI strategy"
    );
    assert!(trials >= 2);
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let rec = strategy.run(&mut rng);
            (rat_to_f64(&rec.net_value), rat_to_f64(&rec.surrogate_value))
        })
        .collect();
    let z: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
    let zf: Vec<f64> = pairs.iter().map(|(_, b)| *b).collect();
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let (diff_mean, _, diff_ci_95) = summarize(&diffs);
    CoupledReport {
        trials,
        master_seed,
        mean_z: z.iter().sum::<f64>() / trials as f64,
        mean_z_free: zf.iter().sum::<f64>() / trials as f64,
        diff_mean,
        diff_ci_95,
    }
}

fn rat_cell(r: &Option<Rat>) -> String {
    match r {
        Some(r) => format!("{} ({})", format_rat(r), format_rat_decimal(r, 6)),
        None => String::new(),
    }
}

/// Fixed-column CSV: one line per report after the header.
pub fn export_csv(reports: &[SimulationReport]) -> String {
    let mut out = String::from(
        "instance,strategy,trials,mean,variance,ci95,lp_bound,oracle_opt,ratio_mean_over_lp,seed\n",
    );
    for r in reports {
        let ratio = match &r.lp_bound {
            Some(lp) if !lp.is_zero() => format!("{:.12}", r.mean / rat_to_f64(lp)),
            _ => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{:.12},{:.12},{:.12},{},{},{},{}\n",
            r.instance,
            r.strategy,
            r.trials,
            r.mean,
            r.sample_variance,
            r.ci_half_width_95,
            rat_cell(&r.lp_bound),
            rat_cell(&r.oracle_opt),
            ratio,
            r.master_seed,
        ));
    }
    out
}
