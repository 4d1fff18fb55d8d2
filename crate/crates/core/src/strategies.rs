//! Executable query strategies: the single-vertex procedures, the full
//! threshold matchers for both models, and the sorted-by-weight greedy
//! baseline.

use crate::decomp::PermutationDistribution;
use crate::lp::{ItemGraph, LPSolution, Side};
use crate::model::{DiscreteDistribution, PoIInstance, QCInstance, SurrogateInstance};
use crate::rational::{format_rat, rat_to_f64, Rat};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// One sampled world: per-edge existence flags (QC) or realized weights
/// (PoI, `None` = edge absent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    Qc(Vec<bool>),
    Poi(Vec<Option<Rat>>),
}

/// Precomputed exact-integer draw for one Bernoulli outcome.
#[derive(Debug, Clone)]
enum Draw {
    Small { cum: Vec<u64>, den: u64 },
    Big { cum: Vec<BigUint>, den: BigUint },
}

impl Draw {
    /// Cumulative thresholds over outcome indices; a draw landing past the
    /// last threshold means "absent".
    fn new(probs: &[Rat]) -> Self {
        let mut den = BigUint::one();
        for p in probs {
            den = den.lcm(&p.denom().to_biguint().expect("positive denominator"));
        }
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = BigUint::zero();
        for p in probs {
            acc += p.numer().to_biguint().expect("nonnegative probability")
                * (&den / p.denom().to_biguint().unwrap());
            cum.push(acc.clone());
        }
        debug_assert!(acc <= den);
        match den.to_u64() {
            Some(d) => Draw::Small {
                cum: cum.iter().map(|c| c.to_u64().unwrap()).collect(),
                den: d,
            },
            None => Draw::Big { cum, den },
        }
    }

    /// Index of the realized outcome, or `None` for the deficit mass.
    fn sample(&self, rng: &mut impl Rng) -> Option<usize> {
        match self {
            Draw::Small { cum, den } => {
                let u = rng.gen_range(0..*den);
                let idx = cum.partition_point(|c| *c <= u);
                (idx < cum.len()).then_some(idx)
            }
            Draw::Big { cum, den } => {
                let u = rng.gen_biguint_below(den);
                let idx = cum.partition_point(|c| *c <= u);
                (idx < cum.len()).then_some(idx)
            }
        }
    }
}

/// Exact per-edge realization sampler for a QC instance.
#[derive(Debug, Clone)]
pub struct QcRealizationSampler {
    draws: Vec<Draw>,
}

impl QcRealizationSampler {
    pub fn new(instance: &QCInstance) -> Self {
        Self {
            draws: instance
                .edges
                .iter()
                .map(|e| Draw::new(std::slice::from_ref(&e.p)))
                .collect(),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<bool> {
        self.draws.iter().map(|d| d.sample(rng).is_some()).collect()
    }
}

/// Exact per-edge realization sampler for a PoI instance (draws `X_e`).
#[derive(Debug, Clone)]
pub struct PoiRealizationSampler {
    draws: Vec<Draw>,
    values: Vec<Vec<Rat>>,
}

impl PoiRealizationSampler {
    pub fn new(instance: &PoIInstance) -> Self {
        Self {
            draws: instance
                .edges
                .iter()
                .map(|e| Draw::new(&e.dist.support().iter().map(|(_, p)| p.clone()).collect::<Vec<_>>()))
                .collect(),
            values: instance
                .edges
                .iter()
                .map(|e| e.dist.support().iter().map(|(v, _)| v.clone()).collect())
                .collect(),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<Option<Rat>> {
        self.draws
            .iter()
            .zip(&self.values)
            .map(|(d, vals)| d.sample(rng).map(|i| vals[i].clone()))
            .collect()
    }
}

/// Single exact draw from a discrete distribution (used for the lazy `z_e`
/// draws of the surrogate walk).
pub fn sample_discrete(dist: &DiscreteDistribution, rng: &mut impl Rng) -> Option<Rat> {
    let probs: Vec<Rat> = dist.support().iter().map(|(_, p)| p.clone()).collect();
    Draw::new(&probs)
        .sample(rng)
        .map(|i| dist.support()[i].0.clone())
}

/// Trace of one strategy run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Matched edges with the committed surrogate value (PoI) or `None` (QC).
    pub matching: Vec<(usize, Option<Rat>)>,
    /// Edge indices in first-query order.
    pub queried: Vec<usize>,
    /// Per left vertex, or empty for strategies without arrival times.
    pub arrival_times: Vec<f64>,
    /// Matched weight: `sum w(e)` (QC) or `sum X_e` (PoI).
    pub gross_value: Rat,
    pub query_cost: Rat,
    pub net_value: Rat,
    /// `sum min(X_e, tau_e)` over the matching; equals `gross_value` in QC.
    /// This is the free-information payoff of the identical coupled run.
    pub surrogate_value: Rat,
}

impl RunRecord {
    pub fn to_json(&self, graph: &ItemGraph) -> serde_json::Value {
        serde_json::json!({
            "matching": self.matching.iter().map(|(e, v)| serde_json::json!({
                "edge": graph.edge_ids[*e],
                "value": v.as_ref().map(format_rat),
            })).collect::<Vec<_>>(),
            "queried": self.queried.iter().map(|&e| graph.edge_ids[e].clone()).collect::<Vec<_>>(),
            "arrival_times": self.arrival_times,
            "gross_value": format_rat(&self.gross_value),
            "query_cost": format_rat(&self.query_cost),
            "net_value": format_rat(&self.net_value),
        })
    }

    fn assert_valid_matching(&self, graph: &ItemGraph) {
        let mut seen_left = std::collections::BTreeSet::new();
        let mut seen_right = std::collections::BTreeSet::new();
        for (e, _) in &self.matching {
            let (a, b) = graph.edge_endpoints[*e];
            assert!(seen_left.insert(a), "two matched edges share a left vertex");
            assert!(seen_right.insert(b), "two matched edges share a right vertex");
            assert!(self.queried.contains(e), "matched edge was never queried");
        }
    }
}

/// Algorithm that queries the edges at one vertex in a sampled order and
/// returns the first one that exists.
pub fn single_vertex_query_qc(
    graph: &ItemGraph,
    dist: &PermutationDistribution,
    exists: &[bool],
    rng: &mut impl Rng,
) -> Option<usize> {
    let sigma = dist.sample(rng);
    sigma
        .iter()
        .map(|&item| graph.items[item].edge)
        .find(|&e| exists[e])
}

/// PoI single-vertex walk with the memoized draw `z_e ~ Y_e`: returns the
/// first pair whose memoized value matches.
pub fn single_vertex_query_poi(
    graph: &ItemGraph,
    surrogate: &SurrogateInstance,
    dist: &PermutationDistribution,
    rng: &mut impl Rng,
) -> Option<(usize, Rat)> {
    let sigma = dist.sample(rng);
    let mut memo: Vec<Option<Option<Rat>>> = vec![None; surrogate.base.edges.len()];
    for &item in sigma {
        let it = &graph.items[item];
        let v = it.value.clone().expect("PoI items carry values");
        let z = memo[it.edge]
            .get_or_insert_with(|| sample_discrete(&surrogate.y[it.edge], rng))
            .clone();
        if z == Some(v.clone()) {
            return Some((it.edge, v));
        }
    }
    None
}

fn arrival_order(n_left: usize, rng: &mut impl Rng) -> (Vec<f64>, Vec<usize>) {
    // 53-bit mantissa uniforms; float ties broken by vertex id.
    let times: Vec<f64> = (0..n_left).map(|_| rng.gen::<f64>()).collect();
    let mut order: Vec<usize> = (0..n_left).collect();
    order.sort_by(|&i, &j| times[i].partial_cmp(&times[j]).unwrap().then(i.cmp(&j)));
    (times, order)
}

fn alpha(t: f64) -> f64 {
    1.0 - (t - 1.0).exp()
}

/// Base prices `c_b = sum over items at b of x* . weight`, as floats for the
/// threshold comparison.
fn base_prices(graph: &ItemGraph, solution: &LPSolution) -> Vec<f64> {
    (0..graph.right_names.len())
        .map(|b| {
            let c: Rat = graph
                .items_at(Side::Right, b)
                .iter()
                .map(|&i| &solution.x[i] * &graph.items[i].weight)
                .sum();
            rat_to_f64(&c)
        })
        .collect()
}

/// The query-commit threshold matcher.
///
/// Left vertices arrive at uniform times; each walks a sampled permutation
/// and really queries an edge only when its weight clears the dynamic
/// threshold and the right endpoint is free. The else branch consumes the
/// same existence draw without querying, so downstream appearance marginals
/// are unchanged.
pub fn approx_qc(
    graph: &ItemGraph,
    solution: &LPSolution,
    dists: &[PermutationDistribution],
    exists: &[bool],
    rng: &mut impl Rng,
) -> RunRecord {
    assert_eq!(dists.len(), graph.left_names.len(), "one distribution per left vertex");
    let prices = base_prices(graph, solution);
    let (times, order) = arrival_order(graph.left_names.len(), rng);
    let mut matched_right = vec![false; graph.right_names.len()];
    let mut record = RunRecord {
        matching: Vec::new(),
        queried: Vec::new(),
        arrival_times: times.clone(),
        gross_value: Rat::zero(),
        query_cost: Rat::zero(),
        net_value: Rat::zero(),
        surrogate_value: Rat::zero(),
    };
    for &a in &order {
        let sigma = dists[a].sample(rng);
        let bar = alpha(times[a]);
        for &item in sigma {
            let it = &graph.items[item];
            let e = it.edge;
            if rat_to_f64(&it.weight) >= bar * prices[it.right] && !matched_right[it.right] {
                record.queried.push(e);
                if exists[e] {
                    matched_right[it.right] = true;
                    record.matching.push((e, None));
                    record.gross_value += &it.weight;
                    break;
                }
            } else {
                // Simulated query: consume the same draw, match nothing.
                if exists[e] {
                    break;
                }
            }
        }
    }
    record.net_value = record.gross_value.clone();
    record.surrogate_value = record.gross_value.clone();
    record.assert_valid_matching(graph);
    record
}

/// The price-of-information threshold matcher.
///
/// Identical skeleton over edge-value pairs; `pi_e` is paid once, at the
/// first real query of the edge, which the permutation structure guarantees
/// is the `(e, tau_e)` step.
pub fn approx_poi(
    graph: &ItemGraph,
    surrogate: &SurrogateInstance,
    solution: &LPSolution,
    dists: &[PermutationDistribution],
    realized: &[Option<Rat>],
    rng: &mut impl Rng,
) -> RunRecord {
    assert_eq!(dists.len(), graph.left_names.len(), "one distribution per left vertex");
    let prices = base_prices(graph, solution);
    let (times, order) = arrival_order(graph.left_names.len(), rng);
    let mut matched_right = vec![false; graph.right_names.len()];
    let mut z: Vec<Option<Option<Rat>>> = vec![None; surrogate.base.edges.len()];
    let mut record = RunRecord {
        matching: Vec::new(),
        queried: Vec::new(),
        arrival_times: times.clone(),
        gross_value: Rat::zero(),
        query_cost: Rat::zero(),
        net_value: Rat::zero(),
        surrogate_value: Rat::zero(),
    };
    for &a in &order {
        let sigma = dists[a].sample(rng);
        let bar = alpha(times[a]);
        for &item in sigma {
            let it = &graph.items[item];
            let e = it.edge;
            let v = it.value.clone().expect("PoI items carry values");
            let y_of = |x: &Option<Rat>| -> Option<Rat> {
                x.as_ref().map(|x| x.min(&surrogate.tau[e]).clone())
            };
            if rat_to_f64(&v) >= bar * prices[it.right] && !matched_right[it.right] {
                if z[e].is_none() {
                    // First real query pays the cost; the permutation
                    // ordering guarantees this is the top-value pair.
                    assert_eq!(v, surrogate.tau[e], "first query must be at (e, tau_e)");
                    record.query_cost += &surrogate.base.edges[e].cost;
                    record.queried.push(e);
                    z[e] = Some(realized[e].clone());
                }
                if y_of(z[e].as_ref().unwrap()) == Some(v.clone()) {
                    matched_right[it.right] = true;
                    let x_val = z[e].as_ref().unwrap().clone().expect("matched value exists");
                    record.gross_value += &x_val;
                    record.surrogate_value += &v;
                    record.matching.push((e, Some(v)));
                    break;
                }
            } else {
                if z[e].is_none() {
                    z[e] = Some(realized[e].clone());
                }
                if y_of(z[e].as_ref().unwrap()) == Some(v.clone()) {
                    break;
                }
            }
        }
    }
    record.net_value = &record.gross_value - &record.query_cost;
    record.assert_valid_matching(graph);
    record
}

/// The baseline: sort edges by decreasing weight (ties by ascending edge
/// id), query whenever both endpoints are free, commit on existence.
pub fn greedy_qc(instance: &QCInstance, exists: &[bool]) -> RunRecord {
    let mut order: Vec<usize> = (0..instance.edges.len()).collect();
    order.sort_by(|&i, &j| {
        instance.edges[j]
            .w
            .cmp(&instance.edges[i].w)
            .then(instance.edges[i].id.cmp(&instance.edges[j].id))
    });
    let mut matched_left = vec![false; instance.left.len()];
    let mut matched_right = vec![false; instance.right.len()];
    let mut record = RunRecord {
        matching: Vec::new(),
        queried: Vec::new(),
        arrival_times: Vec::new(),
        gross_value: Rat::zero(),
        query_cost: Rat::zero(),
        net_value: Rat::zero(),
        surrogate_value: Rat::zero(),
    };
    for e in order {
        let edge = &instance.edges[e];
        if matched_left[edge.a_idx] || matched_right[edge.b_idx] {
            continue;
        }
        record.queried.push(e);
        if exists[e] {
            matched_left[edge.a_idx] = true;
            matched_right[edge.b_idx] = true;
            record.matching.push((e, None));
            record.gross_value += &edge.w;
        }
    }
    record.net_value = record.gross_value.clone();
    record.surrogate_value = record.gross_value.clone();
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{build_distribution_qc, output_probability};
    use crate::lp::{solve_lp_qc, Caps};
    use crate::model::{parse_instance, Instance};
    use crate::rational::{rat, rat_int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qc(doc: &str) -> QCInstance {
        match parse_instance(doc).unwrap() {
            Instance::Qc(i) => i,
            _ => panic!(),
        }
    }

    fn single_edge() -> QCInstance {
        qc(r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"1"}]}"#)
    }

    #[test]
    fn single_vertex_query_returns_first_existing() {
        let inst = single_edge();
        let (graph, sol) = solve_lp_qc(&inst, &Caps::default()).unwrap();
        let dist = build_distribution_qc(&graph, 0, &sol, &Caps::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(single_vertex_query_qc(&graph, &dist, &[true], &mut rng), Some(0));
        assert_eq!(single_vertex_query_qc(&graph, &dist, &[false], &mut rng), None);
    }

    #[test]
    fn figure1_marginals_via_analytics_not_sampling() {
        let inst = qc(r#"{"model":"qc","left":["u"],"right":["b2","b3"],
            "edges":[{"id":"e2","a":"u","b":"b2","p":"1/2","w":"1"},
                     {"id":"e3","a":"u","b":"b3","p":"1/3","w":"1"}]}"#);
        let graph = crate::lp::ItemGraph::from_qc(&inst);
        let sol = crate::lp::LPSolution {
            x: vec![rat(4, 9), rat(2, 9)],
            objective: rat(2, 3),
            tight: vec![],
        };
        let dist = build_distribution_qc(&graph, 0, &sol, &Caps::default()).unwrap();
        assert_eq!(output_probability(&graph, &dist, 0), rat(4, 9));
        assert_eq!(output_probability(&graph, &dist, 1), rat(2, 9));
    }

    #[test]
    fn approx_qc_single_edge_mean() {
        // Threshold (1 - e^{t-1})/2 < 1 always, so the edge is always queried;
        // the mean over trials must approach the LP value 1/2.
        let inst = single_edge();
        let (graph, sol) = solve_lp_qc(&inst, &Caps::default()).unwrap();
        let dist = vec![build_distribution_qc(&graph, 0, &sol, &Caps::default()).unwrap()];
        let sampler = QcRealizationSampler::new(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 20_000;
        let mut total = 0f64;
        for _ in 0..trials {
            let exists = sampler.sample(&mut rng);
            let rec = approx_qc(&graph, &sol, &dist, &exists, &mut rng);
            assert!(rec.queried.len() == 1, "threshold never binds here");
            total += rat_to_f64(&rec.net_value);
        }
        let mean = total / trials as f64;
        // 4 sigma for 20k Bernoulli(1/2) trials.
        assert!((mean - 0.5).abs() < 0.015, "mean = {mean}");
    }

    #[test]
    fn approx_qc_zero_weights_yield_zero_value() {
        let inst = qc(r#"{"model":"qc","left":["a1","a2"],"right":["b"],
            "edges":[{"id":"e1","a":"a1","b":"b","p":"1/2","w":"0"},
                     {"id":"e2","a":"a2","b":"b","p":"1/2","w":"0"}]}"#);
        let (graph, sol) = solve_lp_qc(&inst, &Caps::default()).unwrap();
        let dists: Vec<_> = (0..2)
            .map(|a| build_distribution_qc(&graph, a, &sol, &Caps::default()).unwrap())
            .collect();
        let sampler = QcRealizationSampler::new(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let exists = sampler.sample(&mut rng);
            let rec = approx_qc(&graph, &sol, &dists, &exists, &mut rng);
            assert_eq!(rec.net_value, rat_int(0));
        }
    }

    #[test]
    fn greedy_prefers_heavier_edge() {
        let inst = qc(r#"{"model":"qc","left":["a"],"right":["b1","b2"],
            "edges":[{"id":"e1","a":"a","b":"b1","p":"1/2","w":"2"},
                     {"id":"e2","a":"a","b":"b2","p":"1/2","w":"1"}]}"#);
        let rec = greedy_qc(&inst, &[true, true]);
        assert_eq!(rec.matching, vec![(0, None)]);
        assert_eq!(rec.gross_value, rat_int(2));
        // The lighter edge is never queried: its left endpoint is taken.
        assert_eq!(rec.queried, vec![0]);
    }

    #[test]
    fn greedy_single_existing_edge_matches() {
        let inst = single_edge();
        let rec = greedy_qc(&inst, &[true]);
        assert_eq!(rec.matching.len(), 1);
    }

    #[test]
    fn realization_sampler_is_calibrated() {
        let inst = single_edge();
        let sampler = QcRealizationSampler::new(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hits = (0..40_000)
            .filter(|_| sampler.sample(&mut rng)[0])
            .count();
        let frac = hits as f64 / 40_000.0;
        assert!((frac - 0.5).abs() < 0.02, "frac = {frac}");
    }
}
