//! Instance data model: validation, JSON I/O, probability scaling, and the
//! reduction from price-of-information instances to capped surrogate
//! instances.

use crate::rational::{format_rat, parse_rat, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("semantic error: {0}")]
    Semantic(String),
}

fn semantic(msg: impl Into<String>) -> ModelError {
    ModelError::Semantic(msg.into())
}

/// A weighted edge that exists independently with probability `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCEdge {
    pub id: String,
    pub a: String,
    pub b: String,
    /// Index of `a` in `left`, resolved at validation.
    pub a_idx: usize,
    /// Index of `b` in `right`, resolved at validation.
    pub b_idx: usize,
    pub w: Rat,
    pub p: Rat,
}

/// Query-commit instance: bipartite graph with per-edge existence
/// probability and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCInstance {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub edges: Vec<QCEdge>,
}

/// Finite distribution over strictly positive values, sorted by strictly
/// decreasing value. Mass may sum to less than 1; the deficit is the
/// "edge absent" outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDistribution {
    support: Vec<(Rat, Rat)>,
}

impl DiscreteDistribution {
    /// Builds a distribution from (value, probability) pairs. Zero values are
    /// folded into the absent deficit; values must otherwise be distinct and
    /// positive, probabilities strictly positive and summing to at most 1.
    pub fn new(pairs: Vec<(Rat, Rat)>) -> Result<Self, ModelError> {
        let mut total = Rat::zero();
        let mut support: Vec<(Rat, Rat)> = Vec::new();
        for (v, p) in pairs {
            if p <= Rat::zero() {
                return Err(semantic(format!(
                    "distribution probability {} must be positive",
                    format_rat(&p)
                )));
            }
            if v < Rat::zero() {
                return Err(semantic(format!(
                    "distribution value {} must be nonnegative",
                    format_rat(&v)
                )));
            }
            total += &p;
            if v.is_zero() {
                continue; // deficit mass
            }
            if support.iter().any(|(sv, _)| *sv == v) {
                return Err(semantic(format!(
                    "duplicate distribution value {}",
                    format_rat(&v)
                )));
            }
            support.push((v, p));
        }
        if total > Rat::one() {
            return Err(semantic(format!(
                "distribution mass {} exceeds 1",
                format_rat(&total)
            )));
        }
        if support.is_empty() {
            return Err(semantic("distribution has no positive-value support"));
        }
        support.sort_by(|(a, _), (b, _)| b.cmp(a));
        Ok(Self { support })
    }

    /// Support as (value, probability), values strictly decreasing.
    pub fn support(&self) -> &[(Rat, Rat)] {
        &self.support
    }

    /// Probability that any positive value realizes.
    pub fn total_mass(&self) -> Rat {
        self.support.iter().map(|(_, p)| p.clone()).sum()
    }

    /// E[X] with the absent outcome contributing 0.
    pub fn expectation(&self) -> Rat {
        self.support.iter().map(|(v, p)| v * p).sum()
    }

    pub fn max_value(&self) -> &Rat {
        &self.support[0].0
    }
}

/// An edge whose weight is random; paying `cost` reveals it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoIEdge {
    pub id: String,
    pub a: String,
    pub b: String,
    pub a_idx: usize,
    pub b_idx: usize,
    pub dist: DiscreteDistribution,
    pub cost: Rat,
}

/// Price-of-information instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoIInstance {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub edges: Vec<PoIEdge>,
}

/// PoI instance after the threshold reduction: per-edge `tau` and the capped
/// distribution of `Y = min(X, tau)`. Edges whose cost cannot be recovered
/// are dropped and recorded in `dropped`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurrogateInstance {
    pub base: PoIInstance,
    /// Parallel to `base.edges`.
    pub tau: Vec<Rat>,
    /// Parallel to `base.edges`: distribution of `Y = min(X, tau)`.
    pub y: Vec<DiscreteDistribution>,
    /// Ids of edges removed because querying them has nonpositive value.
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Qc(QCInstance),
    Poi(PoIInstance),
}

fn check_graph<'a>(
    left: &[String],
    right: &[String],
    endpoints: impl Iterator<Item = (&'a String, &'a String, &'a String)>,
) -> Result<Vec<(usize, usize)>, ModelError> {
    let left_idx: BTreeMap<&str, usize> = left.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let right_idx: BTreeMap<&str, usize> = right.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    if left_idx.len() != left.len() {
        return Err(semantic("duplicate left vertex name"));
    }
    if right_idx.len() != right.len() {
        return Err(semantic("duplicate right vertex name"));
    }
    let mut seen_pairs = BTreeSet::new();
    let mut seen_ids = BTreeSet::new();
    let mut resolved = Vec::new();
    for (id, a, b) in endpoints {
        let &ai = left_idx
            .get(a.as_str())
            .ok_or_else(|| semantic(format!("edge {id}: unknown left vertex {a}")))?;
        let &bi = right_idx
            .get(b.as_str())
            .ok_or_else(|| semantic(format!("edge {id}: unknown right vertex {b}")))?;
        if !seen_pairs.insert((ai, bi)) {
            return Err(semantic(format!("duplicate edge between {a} and {b}")));
        }
        if !seen_ids.insert(id.clone()) {
            return Err(semantic(format!("duplicate edge id {id}")));
        }
        resolved.push((ai, bi));
    }
    Ok(resolved)
}

impl QCInstance {
    pub fn new(
        left: Vec<String>,
        right: Vec<String>,
        edges: Vec<(String, String, String, Rat, Rat)>,
    ) -> Result<Self, ModelError> {
        let resolved = check_graph(&left, &right, edges.iter().map(|(id, a, b, _, _)| (id, a, b)))?;
        let mut out = Vec::with_capacity(edges.len());
        for ((id, a, b, w, p), (a_idx, b_idx)) in edges.into_iter().zip(resolved) {
            if w < Rat::zero() {
                return Err(semantic(format!("edge {id}: negative weight")));
            }
            if p <= Rat::zero() || p > Rat::one() {
                return Err(semantic(format!(
                    "edge {id}: probability {} outside (0, 1]",
                    format_rat(&p)
                )));
            }
            out.push(QCEdge { id, a, b, a_idx, b_idx, w, p });
        }
        Ok(Self { left, right, edges: out })
    }

    /// Indices of edges incident to left vertex `a_idx`.
    pub fn edges_at_left(&self, a_idx: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.a_idx == a_idx)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_certain_edge(&self) -> bool {
        self.edges.iter().any(|e| e.p == Rat::one())
    }
}

impl PoIInstance {
    pub fn new(
        left: Vec<String>,
        right: Vec<String>,
        edges: Vec<(String, String, String, DiscreteDistribution, Rat)>,
    ) -> Result<Self, ModelError> {
        let resolved = check_graph(&left, &right, edges.iter().map(|(id, a, b, _, _)| (id, a, b)))?;
        let mut out = Vec::with_capacity(edges.len());
        for ((id, a, b, dist, cost), (a_idx, b_idx)) in edges.into_iter().zip(resolved) {
            if cost < Rat::zero() {
                return Err(semantic(format!("edge {id}: negative query cost")));
            }
            out.push(PoIEdge { id, a, b, a_idx, b_idx, dist, cost });
        }
        Ok(Self { left, right, edges: out })
    }

    pub fn has_certain_edge(&self) -> bool {
        self.edges.iter().any(|e| e.dist.total_mass() == Rat::one())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawValueProb {
    v: String,
    p: String,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: String,
    a: String,
    b: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<RawValueProb>>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    model: String,
    left: Vec<String>,
    right: Vec<String>,
    edges: Vec<RawEdge>,
}

fn parse_field(edge_id: &str, field: &str, text: &str) -> Result<Rat, ModelError> {
    parse_rat(text).map_err(|e| ModelError::Syntax(format!("edge {edge_id}, field {field}: {e}")))
}

/// Parses and validates a UTF-8 JSON instance document.
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    match raw.model.as_str() {
        "qc" => {
            let mut edges = Vec::new();
            for e in raw.edges {
                let p = e
                    .p
                    .as_deref()
                    .ok_or_else(|| semantic(format!("edge {}: missing field p", e.id)))?;
                let w = e
                    .w
                    .as_deref()
                    .ok_or_else(|| semantic(format!("edge {}: missing field w", e.id)))?;
                let p = parse_field(&e.id, "p", p)?;
                let w = parse_field(&e.id, "w", w)?;
                edges.push((e.id, e.a, e.b, w, p));
            }
            Ok(Instance::Qc(QCInstance::new(raw.left, raw.right, edges)?))
        }
        "poi" => {
            let mut edges = Vec::new();
            for e in raw.edges {
                let cost = e
                    .cost
                    .as_deref()
                    .ok_or_else(|| semantic(format!("edge {}: missing field cost", e.id)))?;
                let cost = parse_field(&e.id, "cost", cost)?;
                let raw_dist = e
                    .dist
                    .ok_or_else(|| semantic(format!("edge {}: missing field dist", e.id)))?;
                let mut pairs = Vec::new();
                for vp in raw_dist {
                    pairs.push((
                        parse_field(&e.id, "dist.v", &vp.v)?,
                        parse_field(&e.id, "dist.p", &vp.p)?,
                    ));
                }
                let dist = DiscreteDistribution::new(pairs)
                    .map_err(|err| semantic(format!("edge {}: {err}", e.id)))?;
                edges.push((e.id, e.a, e.b, dist, cost));
            }
            Ok(Instance::Poi(PoIInstance::new(raw.left, raw.right, edges)?))
        }
        other => Err(semantic(format!("unknown model {other:?}"))),
    }
}

pub fn serialize_instance(instance: &Instance) -> String {
    let raw = match instance {
        Instance::Qc(qc) => RawInstance {
            model: "qc".into(),
            left: qc.left.clone(),
            right: qc.right.clone(),
            edges: qc
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    a: e.a.clone(),
                    b: e.b.clone(),
                    p: Some(format_rat(&e.p)),
                    w: Some(format_rat(&e.w)),
                    cost: None,
                    dist: None,
                })
                .collect(),
        },
        Instance::Poi(poi) => RawInstance {
            model: "poi".into(),
            left: poi.left.clone(),
            right: poi.right.clone(),
            edges: poi
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    a: e.a.clone(),
                    b: e.b.clone(),
                    p: None,
                    w: None,
                    cost: Some(format_rat(&e.cost)),
                    dist: Some(
                        e.dist
                            .support()
                            .iter()
                            .map(|(v, p)| RawValueProb {
                                v: format_rat(v),
                                p: format_rat(p),
                            })
                            .collect(),
                    ),
                })
                .collect(),
        },
    };
    serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Scaling and the surrogate reduction
// ---------------------------------------------------------------------------

fn check_gamma(gamma: &Rat) -> Result<(), ModelError> {
    if *gamma <= Rat::zero() || *gamma >= Rat::one() {
        return Err(semantic(format!(
            "gamma {} outside (0, 1)",
            format_rat(gamma)
        )));
    }
    Ok(())
}

/// Replaces every existence probability by `(1 - gamma) * p` exactly.
pub fn scale_probabilities(instance: &QCInstance, gamma: &Rat) -> Result<QCInstance, ModelError> {
    check_gamma(gamma)?;
    let factor = Rat::one() - gamma;
    let mut out = instance.clone();
    for e in &mut out.edges {
        e.p = &e.p * &factor;
    }
    Ok(out)
}

/// PoI analogue: scales every value mass by `(1 - gamma)`, growing the absent
/// deficit so that strict-mass assumptions hold.
pub fn scale_probabilities_poi(
    instance: &PoIInstance,
    gamma: &Rat,
) -> Result<PoIInstance, ModelError> {
    check_gamma(gamma)?;
    let factor = Rat::one() - gamma;
    let mut out = instance.clone();
    for e in &mut out.edges {
        let pairs = e
            .dist
            .support()
            .iter()
            .map(|(v, p)| (v.clone(), p * &factor))
            .collect();
        e.dist = DiscreteDistribution::new(pairs).expect("scaling preserves validity");
    }
    Ok(out)
}

/// Solves `sum_v p_v * max(v - tau, 0) = cost` for `tau` on `[0, max value]`.
///
/// The left side is piecewise linear and non-increasing in `tau`, so the
/// answer is found by walking the support segments and dividing exactly.
pub fn compute_threshold(dist: &DiscreteDistribution, cost: &Rat) -> Result<Rat, ModelError> {
    if *cost < Rat::zero() {
        return Err(semantic("query cost is negative"));
    }
    if *cost > dist.expectation() {
        return Err(semantic(format!(
            "query cost {} exceeds expected value {}",
            format_rat(cost),
            format_rat(&dist.expectation())
        )));
    }
    if cost.is_zero() {
        return Ok(dist.max_value().clone());
    }
    // Walk segments [v_{k+1}, v_k] (support is sorted decreasing). On that
    // segment g(tau) = s_k - m_k * tau with m_k, s_k the cumulative mass and
    // cumulative value of the top k points.
    let mut mass = Rat::zero();
    let mut value = Rat::zero();
    let support = dist.support();
    for (k, (v, p)) in support.iter().enumerate() {
        mass += p;
        value += &(v * p);
        let lower = if k + 1 < support.len() {
            support[k + 1].0.clone()
        } else {
            Rat::zero()
        };
        // g(lower) = value - mass * lower is the largest g on this segment.
        if &value - &mass * &lower >= *cost {
            return Ok((&value - cost) / &mass);
        }
    }
    unreachable!("cost <= E[X] guarantees a segment hit");
}

/// Evaluates `sum_v p_v * max(v - tau, 0)` for cross-checks.
pub fn expected_excess(dist: &DiscreteDistribution, tau: &Rat) -> Rat {
    dist.support()
        .iter()
        .filter(|(v, _)| v > tau)
        .map(|(v, p)| (v - tau) * p)
        .sum()
}

/// Builds the surrogate instance: per-edge `tau` and capped `Y` distribution.
///
/// Edges with `cost >= E[X]` are dropped: at `cost = E[X]` the threshold is 0
/// and the capped distribution has no positive support, and above it the
/// threshold equation has no nonnegative solution.
pub fn poi_to_surrogate(instance: &PoIInstance) -> Result<SurrogateInstance, ModelError> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut taus = Vec::new();
    let mut ys = Vec::new();
    for e in &instance.edges {
        if e.dist.total_mass() >= Rat::one() {
            return Err(semantic(format!(
                "edge {}: value masses sum to 1; apply probability scaling first",
                e.id
            )));
        }
        if e.cost >= e.dist.expectation() {
            dropped.push(e.id.clone());
            continue;
        }
        let tau = compute_threshold(&e.dist, &e.cost)?;
        debug_assert_eq!(expected_excess(&e.dist, &tau), e.cost);
        // Cap values at tau and merge collapsed points.
        let mut pairs: Vec<(Rat, Rat)> = Vec::new();
        for (v, p) in e.dist.support() {
            let capped = if v > &tau { tau.clone() } else { v.clone() };
            if capped.is_zero() {
                continue;
            }
            if let Some(slot) = pairs.iter_mut().find(|(cv, _)| *cv == capped) {
                slot.1 += p;
            } else {
                pairs.push((capped, p.clone()));
            }
        }
        let y = DiscreteDistribution::new(pairs)?;
        taus.push(tau);
        ys.push(y);
        kept.push(e.clone());
    }
    let base = PoIInstance {
        left: instance.left.clone(),
        right: instance.right.clone(),
        edges: kept,
    };
    Ok(SurrogateInstance { base, tau: taus, y: ys, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn qc_doc() -> &'static str {
        r#"{"model":"qc","left":["u"],"right":["b2","b3"],
            "edges":[{"id":"e1","a":"u","b":"b2","p":"1/2","w":"1"},
                     {"id":"e2","a":"u","b":"b3","p":"1/3","w":"1"}]}"#
    }

    #[test]
    fn parses_single_edge_qc() {
        let doc = r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"1"}]}"#;
        match parse_instance(doc).unwrap() {
            Instance::Qc(qc) => {
                assert_eq!(qc.edges.len(), 1);
                assert_eq!(qc.edges[0].p, rat(1, 2));
                assert_eq!(qc.edges[0].w, rat_int(1));
            }
            _ => panic!("expected qc"),
        }
    }

    #[test]
    fn parses_figure1_neighborhood() {
        match parse_instance(qc_doc()).unwrap() {
            Instance::Qc(qc) => {
                assert_eq!(qc.edges[0].p, rat(1, 2));
                assert_eq!(qc.edges[1].p, rat(1, 3));
            }
            _ => panic!("expected qc"),
        }
    }

    #[test]
    fn rejects_zero_probability() {
        let doc = r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"0","w":"1"}]}"#;
        assert!(matches!(parse_instance(doc), Err(ModelError::Semantic(_))));
    }

    #[test]
    fn rejects_unknown_vertex_and_duplicate_edge() {
        let doc = r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"zzz","b":"b","p":"1/2","w":"1"}]}"#;
        assert!(parse_instance(doc).is_err());
        let doc = r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e1","a":"a","b":"b","p":"1/2","w":"1"},
                     {"id":"e2","a":"a","b":"b","p":"1/3","w":"1"}]}"#;
        assert!(parse_instance(doc).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let inst = parse_instance(qc_doc()).unwrap();
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn scaling_is_exact_and_composes() {
        let Instance::Qc(qc) = parse_instance(qc_doc()).unwrap() else {
            unreachable!()
        };
        let scaled = scale_probabilities(&qc, &rat(1, 10)).unwrap();
        assert_eq!(scaled.edges[0].p, rat(9, 20));
        let twice = scale_probabilities(&scaled, &rat(1, 4)).unwrap();
        let combined_gamma = Rat::one() - (Rat::one() - rat(1, 10)) * (Rat::one() - rat(1, 4));
        let once = scale_probabilities(&qc, &combined_gamma).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn scaling_rejects_boundary_gamma() {
        let Instance::Qc(qc) = parse_instance(qc_doc()).unwrap() else {
            unreachable!()
        };
        assert!(scale_probabilities(&qc, &rat_int(0)).is_err());
        assert!(scale_probabilities(&qc, &rat_int(1)).is_err());
    }

    #[test]
    fn threshold_boundaries() {
        let d = DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap();
        assert_eq!(compute_threshold(&d, &rat_int(0)).unwrap(), rat_int(2));
        assert_eq!(compute_threshold(&d, &rat_int(1)).unwrap(), rat_int(0));
        assert_eq!(compute_threshold(&d, &rat(1, 4)).unwrap(), rat(3, 2));
        assert!(compute_threshold(&d, &rat(3, 2)).is_err());
        assert!(compute_threshold(&d, &rat(-1, 2)).is_err());
    }

    #[test]
    fn threshold_multi_segment() {
        let d = DiscreteDistribution::new(vec![
            (rat_int(3), rat(1, 4)),
            (rat_int(1), rat(1, 4)),
        ])
        .unwrap();
        let tau = compute_threshold(&d, &rat(1, 8)).unwrap();
        assert_eq!(tau, rat(5, 2));
        assert_eq!(expected_excess(&d, &tau), rat(1, 8));
    }

    #[test]
    fn surrogate_caps_and_merges() {
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![(
                "e".into(),
                "a".into(),
                "b".into(),
                DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap(),
                rat(1, 4),
            )],
        )
        .unwrap();
        let s = poi_to_surrogate(&poi).unwrap();
        assert_eq!(s.tau[0], rat(3, 2));
        assert_eq!(s.y[0].support(), &[(rat(3, 2), rat(1, 2))]);
        assert_eq!(expected_excess(&poi.edges[0].dist, &s.tau[0]), rat(1, 4));
    }

    #[test]
    fn surrogate_zero_cost_is_identity() {
        let d = DiscreteDistribution::new(vec![(rat_int(5), rat(1, 3))]).unwrap();
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![("e".into(), "a".into(), "b".into(), d.clone(), Rat::zero())],
        )
        .unwrap();
        let s = poi_to_surrogate(&poi).unwrap();
        assert_eq!(s.tau[0], rat_int(5));
        assert_eq!(s.y[0], d);
    }

    #[test]
    fn surrogate_drops_unprofitable_edges() {
        let d = DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap();
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![("e".into(), "a".into(), "b".into(), d, rat_int(1))],
        )
        .unwrap();
        let s = poi_to_surrogate(&poi).unwrap();
        assert!(s.base.edges.is_empty());
        assert_eq!(s.dropped, vec!["e".to_string()]);
    }

    #[test]
    fn surrogate_two_point_top_segment() {
        let d = DiscreteDistribution::new(vec![
            (rat_int(3), rat(1, 4)),
            (rat_int(1), rat(1, 4)),
        ])
        .unwrap();
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![("e".into(), "a".into(), "b".into(), d, rat(1, 8))],
        )
        .unwrap();
        let s = poi_to_surrogate(&poi).unwrap();
        assert_eq!(s.tau[0], rat(5, 2));
        assert_eq!(
            s.y[0].support(),
            &[(rat(5, 2), rat(1, 4)), (rat_int(1), rat(1, 4))]
        );
    }

    #[test]
    fn surrogate_requires_scaling_at_full_mass() {
        let d = DiscreteDistribution::new(vec![(rat_int(2), rat_int(1))]).unwrap();
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![("e".into(), "a".into(), "b".into(), d, Rat::zero())],
        )
        .unwrap();
        assert!(poi_to_surrogate(&poi).is_err());
    }
}
