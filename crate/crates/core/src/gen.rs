//! Deterministic instance generators: the two worked examples and seeded
//! random families for both models.

use crate::model::{DiscreteDistribution, PoIInstance, QCInstance};
use crate::rational::{rat, rat_int};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The two-edge single-left-vertex example: p = 1/2 and 1/3, unit weights.
pub fn figure1() -> QCInstance {
    QCInstance::new(
        vec!["u".into()],
        vec!["b2".into(), "b3".into()],
        vec![
            ("e2".into(), "u".into(), "b2".into(), rat_int(1), rat(1, 2)),
            ("e3".into(), "u".into(), "b3".into(), rat_int(1), rat(1, 3)),
        ],
    )
    .expect("fixed instance is valid")
}

/// Complete 2x2 graph, all p = 1/2, unit weights.
pub fn k22() -> QCInstance {
    let mut edges = Vec::new();
    for a in 1..=2 {
        for b in 1..=2 {
            edges.push((
                format!("e{a}{b}"),
                format!("a{a}"),
                format!("b{b}"),
                rat_int(1),
                rat(1, 2),
            ));
        }
    }
    QCInstance::new(
        vec!["a1".into(), "a2".into()],
        vec!["b1".into(), "b2".into()],
        edges,
    )
    .expect("fixed instance is valid")
}

fn vertex_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn pick_pairs(n_left: usize, n_right: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n_left)
        .flat_map(|a| (0..n_right).map(move |b| (a, b)))
        .collect();
    assert!(m <= pairs.len(), "more edges than vertex pairs");
    pairs.shuffle(rng);
    pairs.truncate(m);
    pairs.sort_unstable();
    pairs
}

/// Seeded random query-commit instance with `m` distinct edges,
/// probabilities strictly inside (0, 1) and small rational weights.
pub fn random_qc(n_left: usize, n_right: usize, m: usize, seed: u64) -> QCInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = pick_pairs(n_left, n_right, m, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let den = rng.gen_range(2..=12i64);
            let p = rat(rng.gen_range(1..den), den);
            let w = rat(rng.gen_range(1..=20), rng.gen_range(1..=4));
            (format!("e{}", i + 1), format!("a{}", a + 1), format!("b{}", b + 1), w, p)
        })
        .collect();
    QCInstance::new(vertex_names("a", n_left), vertex_names("b", n_right), edges)
        .expect("generated instance is valid")
}

/// Like [`random_qc`] but with at least one certain edge (p = 1); each edge
/// independently becomes certain with probability 1/4.
pub fn random_qc_with_certain(n_left: usize, n_right: usize, m: usize, seed: u64) -> QCInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = pick_pairs(n_left, n_right, m, &mut rng);
    let forced = rng.gen_range(0..pairs.len());
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let p = if i == forced || rng.gen_range(0..4) == 0 {
                rat_int(1)
            } else {
                let den = rng.gen_range(2..=12i64);
                rat(rng.gen_range(1..den), den)
            };
            let w = rat(rng.gen_range(1..=20), rng.gen_range(1..=4));
            (format!("e{}", i + 1), format!("a{}", a + 1), format!("b{}", b + 1), w, p)
        })
        .collect();
    QCInstance::new(vertex_names("a", n_left), vertex_names("b", n_right), edges)
        .expect("generated instance is valid")
}

/// Seeded random price-of-information instance. Value masses per edge sum
/// to strictly below 1 and each cost stays below the edge's expected value,
/// so every edge survives the surrogate reduction.
pub fn random_poi(
    n_left: usize,
    n_right: usize,
    m: usize,
    max_support: usize,
    seed: u64,
) -> PoIInstance {
    assert!(max_support >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = pick_pairs(n_left, n_right, m, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let k = rng.gen_range(1..=max_support);
            // Distinct values, masses n/16 with a strict total below 1.
            let mut values: Vec<i64> = (1..=8).collect();
            values.shuffle(&mut rng);
            values.truncate(k);
            values.sort_unstable_by(|x, y| y.cmp(x));
            let mut budget = 15i64;
            let mut support = Vec::new();
            for (idx, v) in values.iter().enumerate() {
                let reserve = (k - idx - 1) as i64; // keep 1/16 per later value
                let n = rng.gen_range(1..=(budget - reserve).min(5));
                budget -= n;
                support.push((rat_int(*v), rat(n, 16)));
            }
            let dist = DiscreteDistribution::new(support).expect("valid support");
            let mean = dist.expectation();
            let cost = mean * rat(rng.gen_range(0..8), 8);
            debug_assert!(cost < dist.expectation() || cost.is_zero());
            (format!("e{}", i + 1), format!("a{}", a + 1), format!("b{}", b + 1), dist, cost)
        })
        .collect();
    PoIInstance::new(vertex_names("a", n_left), vertex_names("b", n_right), edges)
        .expect("generated instance is valid")
}
