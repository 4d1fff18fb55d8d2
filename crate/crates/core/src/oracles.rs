//! Exact ground truth on small instances: optimal adaptive values by
//! memoized backward induction, offline expectations by realization
//! enumeration, and exact maximum-weight matchings.

use crate::model::{PoIInstance, QCInstance, SurrogateInstance};
use crate::rational::Rat;
use crate::strategies::greedy_qc;
use num_traits::{One, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle cap exceeded: {detail}")]
    CapExceeded { detail: String },
}

fn cap_err(detail: String) -> OracleError {
    OracleError::CapExceeded { detail }
}

/// Exact maximum-weight matching over edges `(a, b, w)` with `w >= 0`.
/// Returns the matched edge indices (sorted) and the total weight; ties
/// break to the lexicographically smallest index set.
pub fn max_weight_matching(edges: &[(usize, usize, Rat)]) -> (Vec<usize>, Rat) {
    fn go(
        edges: &[(usize, usize, Rat)],
        i: usize,
        used_left: u64,
        used_right: u64,
    ) -> (Vec<usize>, Rat) {
        if i == edges.len() {
            return (Vec::new(), Rat::zero());
        }
        let skip = go(edges, i + 1, used_left, used_right);
        let (a, b, w) = &edges[i];
        if used_left >> a & 1 == 1 || used_right >> b & 1 == 1 {
            return skip;
        }
        let (mut set, rest) = go(edges, i + 1, used_left | 1 << a, used_right | 1 << b);
        let take_w = w + rest;
        set.insert(0, i);
        if take_w > skip.1 || (take_w == skip.1 && set < skip.0) {
            (set, take_w)
        } else {
            skip
        }
    }
    assert!(
        edges.iter().all(|(a, b, _)| *a < 64 && *b < 64),
        "vertex indices must fit a 64-bit mask"
    );
    go(edges, 0, 0, 0)
}

/// Optimal adaptive query-commit value by memoized backward induction over
/// (queried edges, matched left vertices, matched right vertices).
pub fn brute_force_opt_qc(instance: &QCInstance, edge_cap: usize) -> Result<Rat, OracleError> {
    let m = instance.edges.len();
    if m > edge_cap {
        return Err(cap_err(format!("{m} edges exceed the brute-force cap {edge_cap}")));
    }
    fn value(
        instance: &QCInstance,
        queried: u32,
        left: u64,
        right: u64,
        memo: &mut HashMap<(u32, u64, u64), Rat>,
    ) -> Rat {
        if let Some(v) = memo.get(&(queried, left, right)) {
            return v.clone();
        }
        let mut best = Rat::zero(); // stopping is always allowed
        for (i, e) in instance.edges.iter().enumerate() {
            if queried >> i & 1 == 1 || left >> e.a_idx & 1 == 1 || right >> e.b_idx & 1 == 1 {
                continue;
            }
            let hit = value(
                instance,
                queried | 1 << i,
                left | 1 << e.a_idx,
                right | 1 << e.b_idx,
                memo,
            );
            let miss = value(instance, queried | 1 << i, left, right, memo);
            let v = &e.p * (&e.w + hit) + (Rat::one() - &e.p) * miss;
            if v > best {
                best = v;
            }
        }
        memo.insert((queried, left, right), best.clone());
        best
    }
    Ok(value(instance, 0, 0, 0, &mut HashMap::new()))
}

/// Exact expectation of the maximum-weight matching over all joint edge
/// realizations of a QC instance.
pub fn exact_expected_offline_qc(
    instance: &QCInstance,
    realization_cap: usize,
) -> Result<Rat, OracleError> {
    let m = instance.edges.len();
    if m >= usize::BITS as usize || (1usize << m) > realization_cap {
        return Err(cap_err(format!(
            "2^{m} realizations exceed the enumeration cap {realization_cap}"
        )));
    }
    let mut total = Rat::zero();
    for mask in 0u64..(1 << m) {
        let mut prob = Rat::one();
        let mut present = Vec::new();
        for (i, e) in instance.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= &e.p;
                present.push((e.a_idx, e.b_idx, e.w.clone()));
            } else {
                prob *= Rat::one() - &e.p;
            }
        }
        if prob.is_zero() {
            continue;
        }
        let (_, w) = max_weight_matching(&present);
        total += prob * w;
    }
    Ok(total)
}

/// Exact expectation of the maximum-weight matching under the surrogate
/// values `Y_e`, enumerating the joint support (plus "absent" per edge).
pub fn exact_expected_offline_poi(
    surrogate: &SurrogateInstance,
    realization_cap: usize,
) -> Result<Rat, OracleError> {
    let mut count: usize = 1;
    for y in &surrogate.y {
        count = count.saturating_mul(y.support().len() + 1);
        if count > realization_cap {
            return Err(cap_err(format!(
                "joint realizations exceed the enumeration cap {realization_cap}"
            )));
        }
    }
    let m = surrogate.y.len();
    let mut counters = vec![0usize; m];
    let mut total = Rat::zero();
    loop {
        let mut prob = Rat::one();
        let mut present = Vec::new();
        for (i, y) in surrogate.y.iter().enumerate() {
            let supp = y.support();
            if counters[i] < supp.len() {
                let (v, p) = &supp[counters[i]];
                prob *= p;
                let e = &surrogate.base.edges[i];
                present.push((e.a_idx, e.b_idx, v.clone()));
            } else {
                prob *= Rat::one() - y.total_mass();
            }
        }
        if !prob.is_zero() {
            let (_, w) = max_weight_matching(&present);
            total += prob * w;
        }
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(total);
            }
            counters[pos] += 1;
            if counters[pos] <= surrogate.y[pos].support().len() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

/// Optimal adaptive price-of-information value by backward induction.
///
/// Unlike the query-commit oracle, commitment is a separate action here:
/// paying `pi_e` reveals `X_e`, and the strategy later chooses which
/// revealed edges to include in the matching. Stopping is always allowed.
pub fn brute_force_opt_poi(
    instance: &PoIInstance,
    support_cap: usize,
) -> Result<Rat, OracleError> {
    let total_support: usize = instance.edges.iter().map(|e| e.dist.support().len()).sum();
    if total_support > support_cap {
        return Err(cap_err(format!(
            "total support size {total_support} exceeds the cap {support_cap}"
        )));
    }
    // Per-edge knowledge: 0 unqueried, 1 revealed-absent, 2+k revealed value k.
    // States pack into a mixed-radix u64 together with the matched masks.
    let radix: Vec<u64> = instance
        .edges
        .iter()
        .map(|e| 2 + e.dist.support().len() as u64)
        .collect();
    fn encode(knowledge: &[u64], radix: &[u64]) -> u64 {
        let mut code = 0u64;
        for (k, r) in knowledge.iter().zip(radix).rev() {
            code = code * r + k;
        }
        code
    }
    #[allow(clippy::too_many_arguments)]
    fn value(
        instance: &PoIInstance,
        radix: &[u64],
        knowledge: &mut Vec<u64>,
        left: u64,
        right: u64,
        memo: &mut HashMap<(u64, u64, u64), Rat>,
    ) -> Rat {
        let key = (encode(knowledge, radix), left, right);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut best = Rat::zero();
        for (i, e) in instance.edges.iter().enumerate() {
            if left >> e.a_idx & 1 == 1 || right >> e.b_idx & 1 == 1 {
                continue;
            }
            match knowledge[i] {
                0 => {
                    // Query: pay the cost, branch on the revealed outcome.
                    let mut v = -&e.cost;
                    let mut absent = Rat::one();
                    for (k, (_, p)) in e.dist.support().iter().enumerate() {
                        knowledge[i] = 2 + k as u64;
                        v += p * value(instance, radix, knowledge, left, right, memo);
                        absent -= p;
                    }
                    if !absent.is_zero() {
                        knowledge[i] = 1;
                        v += absent * value(instance, radix, knowledge, left, right, memo);
                    }
                    knowledge[i] = 0;
                    if v > best {
                        best = v;
                    }
                }
                1 => {}
                k => {
                    // Commit the revealed value.
                    let x = &instance.edges[i].dist.support()[(k - 2) as usize].0;
                    let v = x + value(
                        instance,
                        radix,
                        knowledge,
                        left | 1 << e.a_idx,
                        right | 1 << e.b_idx,
                        memo,
                    );
                    if v > best {
                        best = v;
                    }
                }
            }
        }
        memo.insert(key, best.clone());
        best
    }
    let mut knowledge = vec![0u64; instance.edges.len()];
    Ok(value(
        instance,
        &radix,
        &mut knowledge,
        0,
        0,
        &mut HashMap::new(),
    ))
}

/// Exact expected value of the greedy baseline by realization enumeration.
pub fn expected_greedy_qc(
    instance: &QCInstance,
    realization_cap: usize,
) -> Result<Rat, OracleError> {
    let m = instance.edges.len();
    if m >= usize::BITS as usize || (1usize << m) > realization_cap {
        return Err(cap_err(format!(
            "2^{m} realizations exceed the enumeration cap {realization_cap}"
        )));
    }
    let mut total = Rat::zero();
    for mask in 0u64..(1 << m) {
        let mut prob = Rat::one();
        let exists: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        for (i, e) in instance.edges.iter().enumerate() {
            prob *= if exists[i] { e.p.clone() } else { Rat::one() - &e.p };
        }
        if prob.is_zero() {
            continue;
        }
        total += prob * greedy_qc(instance, &exists).gross_value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_instance, poi_to_surrogate, DiscreteDistribution, Instance};
    use crate::rational::{rat, rat_int};

    fn qc(doc: &str) -> QCInstance {
        match parse_instance(doc).unwrap() {
            Instance::Qc(i) => i,
            _ => panic!(),
        }
    }

    fn poi_one_edge(cost: Rat) -> PoIInstance {
        PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![(
                "e".into(),
                "a".into(),
                "b".into(),
                DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap(),
                cost,
            )],
        )
        .unwrap()
    }

    /// Exhaustive subset enumeration used to cross-check the matching solver.
    fn matching_by_enumeration(edges: &[(usize, usize, Rat)]) -> Rat {
        let m = edges.len();
        let mut best = Rat::zero();
        for mask in 0u64..(1 << m) {
            let mut left = 0u64;
            let mut right = 0u64;
            let mut w = Rat::zero();
            let mut ok = true;
            for (i, (a, b, wi)) in edges.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                if left >> a & 1 == 1 || right >> b & 1 == 1 {
                    ok = false;
                    break;
                }
                left |= 1 << a;
                right |= 1 << b;
                w += wi;
            }
            if ok && w > best {
                best = w;
            }
        }
        best
    }

    #[test]
    fn matching_trivial_cases() {
        assert_eq!(max_weight_matching(&[]), (vec![], rat_int(0)));
        // Path a1 - b1 - a2 with weights 1 and 2: take the heavier edge.
        let edges = vec![(0, 0, rat_int(1)), (1, 0, rat_int(2))];
        assert_eq!(max_weight_matching(&edges), (vec![1], rat_int(2)));
    }

    #[test]
    fn matching_matches_enumeration_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let m = rng.gen_range(1..=10);
            let edges: Vec<(usize, usize, Rat)> = (0..m)
                .map(|_| {
                    (
                        rng.gen_range(0..4usize),
                        rng.gen_range(0..4usize),
                        rat(rng.gen_range(0..20), rng.gen_range(1..5)),
                    )
                })
                .collect();
            assert_eq!(max_weight_matching(&edges).1, matching_by_enumeration(&edges));
        }
    }

    #[test]
    fn opt_qc_single_edge() {
        let inst = qc(r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"3"}]}"#);
        assert_eq!(brute_force_opt_qc(&inst, 12).unwrap(), rat(3, 2));
    }

    #[test]
    fn opt_qc_two_edges_one_vertex() {
        let inst = qc(r#"{"model":"qc","left":["a"],"right":["b1","b2"],
            "edges":[{"id":"e1","a":"a","b":"b1","p":"1/2","w":"1"},
                     {"id":"e2","a":"a","b":"b2","p":"1/2","w":"1"}]}"#);
        assert_eq!(brute_force_opt_qc(&inst, 12).unwrap(), rat(3, 4));
    }

    #[test]
    fn opt_qc_invariant_under_relabeling_and_side_swap() {
        let inst = qc(r#"{"model":"qc","left":["a1","a2"],"right":["b1","b2"],
            "edges":[{"id":"e1","a":"a1","b":"b1","p":"1/2","w":"2"},
                     {"id":"e2","a":"a1","b":"b2","p":"1/3","w":"3"},
                     {"id":"e3","a":"a2","b":"b1","p":"3/4","w":"1"}]}"#);
        let relabeled = qc(r#"{"model":"qc","left":["x2","x1"],"right":["y2","y1"],
            "edges":[{"id":"f3","a":"x1","b":"y1","p":"1/2","w":"2"},
                     {"id":"f2","a":"x1","b":"y2","p":"1/3","w":"3"},
                     {"id":"f1","a":"x2","b":"y1","p":"3/4","w":"1"}]}"#);
        let swapped = qc(r#"{"model":"qc","left":["b1","b2"],"right":["a1","a2"],
            "edges":[{"id":"e1","a":"b1","b":"a1","p":"1/2","w":"2"},
                     {"id":"e2","a":"b2","b":"a1","p":"1/3","w":"3"},
                     {"id":"e3","a":"b1","b":"a2","p":"3/4","w":"1"}]}"#);
        let v = brute_force_opt_qc(&inst, 12).unwrap();
        assert_eq!(brute_force_opt_qc(&relabeled, 12).unwrap(), v);
        assert_eq!(brute_force_opt_qc(&swapped, 12).unwrap(), v);
    }

    #[test]
    fn offline_qc_single_edge_and_caps() {
        let inst = qc(r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"3"}]}"#);
        assert_eq!(exact_expected_offline_qc(&inst, 1 << 16).unwrap(), rat(3, 2));
        assert!(exact_expected_offline_qc(&inst, 1).is_err());
    }

    #[test]
    fn offline_poi_examples() {
        // Single edge Y = {3/2 w.p. 1/2}: expectation 3/4.
        let inst = poi_one_edge(rat(1, 4));
        let s = poi_to_surrogate(&inst).unwrap();
        assert_eq!(s.tau, vec![rat(3, 2)]);
        assert_eq!(exact_expected_offline_poi(&s, 1 << 16).unwrap(), rat(3, 4));

        // Two disjoint copies: values add.
        let two = PoIInstance::new(
            vec!["a1".into(), "a2".into()],
            vec!["b1".into(), "b2".into()],
            vec![
                (
                    "e1".into(),
                    "a1".into(),
                    "b1".into(),
                    DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap(),
                    rat(1, 4),
                ),
                (
                    "e2".into(),
                    "a2".into(),
                    "b2".into(),
                    DiscreteDistribution::new(vec![(rat_int(2), rat(1, 2))]).unwrap(),
                    rat(1, 4),
                ),
            ],
        )
        .unwrap();
        let s2 = poi_to_surrogate(&two).unwrap();
        assert_eq!(exact_expected_offline_poi(&s2, 1 << 16).unwrap(), rat(3, 2));
    }

    #[test]
    fn offline_deterministic_weights_equal_max_matching() {
        // All p = 1: the offline expectation is just the max matching.
        let inst = qc(r#"{"model":"qc","left":["a1","a2"],"right":["b1","b2"],
            "edges":[{"id":"e1","a":"a1","b":"b1","p":"1","w":"2"},
                     {"id":"e2","a":"a1","b":"b2","p":"1","w":"3"},
                     {"id":"e3","a":"a2","b":"b1","p":"1","w":"1"}]}"#);
        let edges: Vec<(usize, usize, Rat)> = inst
            .edges
            .iter()
            .map(|e| (e.a_idx, e.b_idx, e.w.clone()))
            .collect();
        assert_eq!(
            exact_expected_offline_qc(&inst, 1 << 16).unwrap(),
            max_weight_matching(&edges).1
        );
    }

    #[test]
    fn opt_poi_single_edge() {
        assert_eq!(brute_force_opt_poi(&poi_one_edge(rat(1, 4)), 8).unwrap(), rat(3, 4));
    }

    #[test]
    fn opt_poi_expensive_query_is_skipped() {
        // cost 2 > E[X] = 1: never query.
        let inst = poi_one_edge(rat_int(2));
        assert_eq!(brute_force_opt_poi(&inst, 8).unwrap(), rat_int(0));
    }

    #[test]
    fn poi_sandwich_on_a_small_instance() {
        let inst = PoIInstance::new(
            vec!["a".into()],
            vec!["b1".into(), "b2".into()],
            vec![
                (
                    "e1".into(),
                    "a".into(),
                    "b1".into(),
                    DiscreteDistribution::new(vec![(rat_int(3), rat(1, 4)), (rat_int(1), rat(1, 4))])
                        .unwrap(),
                    rat(1, 8),
                ),
                (
                    "e2".into(),
                    "a".into(),
                    "b2".into(),
                    DiscreteDistribution::new(vec![(rat_int(2), rat(1, 3))]).unwrap(),
                    rat(1, 6),
                ),
            ],
        )
        .unwrap();
        let s = poi_to_surrogate(&inst).unwrap();
        let opt = brute_force_opt_poi(&inst, 8).unwrap();
        let offline = exact_expected_offline_poi(&s, 1 << 16).unwrap();
        let (_, lp) = crate::lp::solve_lp_poi(&s, &crate::lp::Caps::default()).unwrap();
        assert!(opt <= offline, "opt {opt} offline {offline}");
        assert!(offline <= lp.objective, "offline {offline} lp {}", lp.objective);
    }

    #[test]
    fn qc_sandwich_on_a_small_instance() {
        let inst = qc(r#"{"model":"qc","left":["a1","a2"],"right":["b1","b2"],
            "edges":[{"id":"e1","a":"a1","b":"b1","p":"1/2","w":"2"},
                     {"id":"e2","a":"a1","b":"b2","p":"1/3","w":"3"},
                     {"id":"e3","a":"a2","b":"b1","p":"3/4","w":"1"},
                     {"id":"e4","a":"a2","b":"b2","p":"1/5","w":"4"}]}"#);
        let opt = brute_force_opt_qc(&inst, 12).unwrap();
        let (_, lp) = crate::lp::solve_lp_qc(&inst, &crate::lp::Caps::default()).unwrap();
        assert!(opt <= lp.objective);
    }

    #[test]
    fn greedy_expectation_single_edge() {
        let inst = qc(r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"3"}]}"#);
        assert_eq!(expected_greedy_qc(&inst, 1 << 16).unwrap(), rat(3, 2));
    }
}
