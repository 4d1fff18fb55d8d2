//! Per-vertex polytope structure: extreme-point recognition, tight-set chain
//! extraction, constructive Caratheodory decomposition, and assembly of the
//! permutation distributions that drive the query strategies.

use crate::lp::{enumerate_lattice_sets, enumerate_subsets, Caps, ItemGraph, LPSolution, Mode, Side};
use crate::rational::{format_rat, Rat};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error("point is infeasible for the vertex polytope: {0}")]
    Infeasible(String),
    #[error("tight sets are not nested: {0}")]
    NotNested(String),
    #[error("malformed chain increment: {0}")]
    BadIncrement(String),
    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),
}

/// The polytope `P_a` of one left vertex: local coordinates over the
/// vertex's incident items and the explicit constraint family (all subsets
/// for QC, the upward-closed lattice family for PoI).
pub struct VertexPolytope<'a> {
    pub graph: &'a ItemGraph,
    pub vertex: usize,
    /// Local coordinate -> global item index.
    pub items: Vec<usize>,
    /// Family sets in local indices, sorted ascending; includes the empty set.
    pub family: Vec<Vec<usize>>,
    pub mode: Mode,
}

impl<'a> VertexPolytope<'a> {
    pub fn new(
        graph: &'a ItemGraph,
        vertex: usize,
        mode: Mode,
        caps: &Caps,
    ) -> Result<Self, DecompError> {
        let items = graph.items_at(Side::Left, vertex).to_vec();
        let global_family = match mode {
            Mode::AllSubsets => enumerate_subsets(graph, Side::Left, vertex, caps)?,
            Mode::Lattice => enumerate_lattice_sets(graph, vertex, caps)?,
        };
        let to_local = |set: &[usize]| -> Vec<usize> {
            let mut local: Vec<usize> = set
                .iter()
                .map(|g| items.iter().position(|i| i == g).expect("incident item"))
                .collect();
            local.sort_unstable();
            local
        };
        let family = global_family.iter().map(|s| to_local(s)).collect();
        Ok(Self { graph, vertex, items, family, mode })
    }

    pub fn dim(&self) -> usize {
        self.items.len()
    }

    pub fn coverage(&self, local_set: &[usize]) -> Rat {
        let global: Vec<usize> = local_set.iter().map(|&l| self.items[l]).collect();
        self.graph.coverage_of(&global)
    }

    pub fn is_feasible(&self, point: &[Rat]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        if point.iter().any(|v| v < &Rat::zero()) {
            return false;
        }
        self.family.iter().all(|set| {
            let total: Rat = set.iter().map(|&l| point[l].clone()).sum();
            total <= self.coverage(set)
        })
    }

    /// Nonempty family sets whose constraint holds with equality.
    fn tight_sets(&self, point: &[Rat]) -> Vec<Vec<usize>> {
        self.family
            .iter()
            .filter(|set| !set.is_empty())
            .filter(|set| {
                let total: Rat = set.iter().map(|&l| point[l].clone()).sum();
                total == self.coverage(set)
            })
            .cloned()
            .collect()
    }

    /// Rows of the tight-constraint system at `point` (family indicators
    /// plus unit rows for tight nonnegativity constraints).
    fn tight_rows(&self, point: &[Rat]) -> Vec<Vec<Rat>> {
        let k = self.dim();
        let mut rows = Vec::new();
        for set in self.tight_sets(point) {
            let mut row = vec![Rat::zero(); k];
            for l in set {
                row[l] = Rat::one();
            }
            rows.push(row);
        }
        for (l, v) in point.iter().enumerate() {
            if v.is_zero() {
                let mut row = vec![Rat::zero(); k];
                row[l] = Rat::one();
                rows.push(row);
            }
        }
        rows
    }
}

/// Reduces `rows` in place to row echelon form; returns the pivot columns.
fn eliminate(rows: &mut Vec<Vec<Rat>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(pivot_row) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot_row);
        let inv = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v /= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for c in 0..width {
                    let delta = &factor * &rows[r][c];
                    rows[i][c] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// A direction in the null space of `rows`, or `None` when it is trivial.
/// Deterministic: the kernel vector of the smallest free column.
fn null_direction(mut rows: Vec<Vec<Rat>>, width: usize) -> Option<Vec<Rat>> {
    let pivots = eliminate(&mut rows, width);
    if pivots.len() == width {
        return None;
    }
    let free = (0..width).find(|c| !pivots.contains(c)).expect("free column");
    let mut dir = vec![Rat::zero(); width];
    dir[free] = Rat::one();
    for (row_idx, &piv_col) in pivots.iter().enumerate() {
        dir[piv_col] = -rows[row_idx][free].clone();
    }
    Some(dir)
}

/// True iff the tight constraints at `point` (including nonnegativity) have
/// full rank over the coordinate space.
pub fn is_extreme(polytope: &VertexPolytope, point: &[Rat]) -> Result<bool, DecompError> {
    if !polytope.is_feasible(point) {
        return Err(DecompError::Infeasible(format!(
            "vertex {}",
            polytope.graph.vertex_name(Side::Left, polytope.vertex)
        )));
    }
    Ok(null_direction(polytope.tight_rows(point), polytope.dim()).is_none())
}

/// Strictly nested tight sets at an extreme point, with each increment's
/// items in decreasing value order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Local item index sets, strictly nested.
    pub sets: Vec<Vec<usize>>,
    /// `sets[i] \ sets[i-1]`, ordered by decreasing value; exactly one
    /// member has a positive coordinate.
    pub increments: Vec<Vec<usize>>,
}

/// Enumerates all tight sets of the family at an extreme point, asserts
/// pairwise nestedness and the increment structure, and returns the chain.
pub fn extract_chain(polytope: &VertexPolytope, point: &[Rat]) -> Result<Chain, DecompError> {
    if !is_extreme(polytope, point)? {
        return Err(DecompError::Infeasible("point is not an extreme point".into()));
    }
    let mut tight = polytope.tight_sets(point);
    tight.sort_by_key(|s| s.len());
    tight.dedup();

    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
    for pair in tight.windows(2) {
        if !is_subset(&pair[0], &pair[1]) {
            return Err(DecompError::NotNested(format!(
                "{:?} vs {:?}",
                pair[0], pair[1]
            )));
        }
    }

    let positives = point.iter().filter(|v| !v.is_zero()).count();
    if tight.len() != positives {
        return Err(DecompError::BadIncrement(format!(
            "{} tight sets for {} positive coordinates",
            tight.len(),
            positives
        )));
    }

    let mut sets = Vec::new();
    let mut increments = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for set in tight {
        let mut inc: Vec<usize> = set.iter().copied().filter(|l| !prev.contains(l)).collect();
        let pos_in_inc: Vec<usize> = inc
            .iter()
            .copied()
            .filter(|&l| !point[l].is_zero())
            .collect();
        if pos_in_inc.len() != 1 {
            return Err(DecompError::BadIncrement(format!(
                "increment {inc:?} has {} positive coordinates",
                pos_in_inc.len()
            )));
        }
        match polytope.mode {
            Mode::AllSubsets => {
                if inc.len() != 1 {
                    return Err(DecompError::BadIncrement(format!(
                        "QC increment {inc:?} has {} elements",
                        inc.len()
                    )));
                }
            }
            Mode::Lattice => {
                // Extra members share the positive member's edge and carry
                // values at least as large.
                let pos_item = &polytope.graph.items[polytope.items[pos_in_inc[0]]];
                let pos_value = pos_item.value.clone().expect("lattice items carry values");
                for &l in &inc {
                    let it = &polytope.graph.items[polytope.items[l]];
                    let v = it.value.clone().expect("lattice items carry values");
                    if it.edge != pos_item.edge || v < pos_value {
                        return Err(DecompError::BadIncrement(format!(
                            "increment member {l} does not dominate the positive pair"
                        )));
                    }
                }
                inc.sort_by(|&l1, &l2| {
                    let v1 = polytope.graph.items[polytope.items[l1]].value.clone().unwrap();
                    let v2 = polytope.graph.items[polytope.items[l2]].value.clone().unwrap();
                    v2.cmp(&v1)
                });
            }
        }
        increments.push(inc);
        sets.push(set.clone());
        prev = set;
    }
    Ok(Chain { sets, increments })
}

/// Constructive Caratheodory: expresses a feasible point as an exact convex
/// combination of extreme points.
///
/// At a non-extreme point, walks the first null-space direction of the tight
/// system to the two boundary points and recurses; every step strictly grows
/// the tight set, so the recursion depth is at most the dimension.
pub fn caratheodory_decompose(
    polytope: &VertexPolytope,
    point: &[Rat],
) -> Result<Vec<(Rat, Vec<Rat>)>, DecompError> {
    if !polytope.is_feasible(point) {
        return Err(DecompError::Infeasible(format!(
            "vertex {}",
            polytope.graph.vertex_name(Side::Left, polytope.vertex)
        )));
    }
    let mut atoms: Vec<(Rat, Vec<Rat>)> = Vec::new();
    decompose_rec(polytope, point.to_vec(), Rat::one(), &mut atoms)?;
    // Merge duplicate extreme points and drop zero coefficients.
    let mut merged: Vec<(Rat, Vec<Rat>)> = Vec::new();
    for (a, y) in atoms {
        if a.is_zero() {
            continue;
        }
        match merged.iter_mut().find(|(_, my)| *my == y) {
            Some((ma, _)) => *ma += a,
            None => merged.push((a, y)),
        }
    }
    Ok(merged)
}

fn decompose_rec(
    polytope: &VertexPolytope,
    point: Vec<Rat>,
    coeff: Rat,
    out: &mut Vec<(Rat, Vec<Rat>)>,
) -> Result<(), DecompError> {
    let Some(dir) = null_direction(polytope.tight_rows(&point), polytope.dim()) else {
        out.push((coeff, point));
        return Ok(());
    };

    // Largest steps keeping feasibility in the +dir and -dir directions.
    let mut step_up: Option<Rat> = None; // +dir
    let mut step_down: Option<Rat> = None; // -dir
    let shrink = |slot: &mut Option<Rat>, bound: Rat| {
        if slot.as_ref().is_none_or(|cur| bound < *cur) {
            *slot = Some(bound);
        }
    };
    for set in &polytope.family {
        if set.is_empty() {
            continue;
        }
        let d_sum: Rat = set.iter().map(|&l| dir[l].clone()).sum();
        if d_sum.is_zero() {
            continue;
        }
        let slack = polytope.coverage(set)
            - set.iter().map(|&l| point[l].clone()).sum::<Rat>();
        debug_assert!(slack >= Rat::zero());
        if d_sum > Rat::zero() {
            shrink(&mut step_up, &slack / &d_sum);
        } else {
            shrink(&mut step_down, &slack / &(-d_sum));
        }
    }
    for (l, d) in dir.iter().enumerate() {
        if d > &Rat::zero() {
            shrink(&mut step_down, &point[l] / d);
        } else if d < &Rat::zero() {
            shrink(&mut step_up, &point[l] / &(-d.clone()));
        }
    }
    let (t_up, t_down) = (
        step_up.expect("bounded polytope limits +dir"),
        step_down.expect("bounded polytope limits -dir"),
    );
    debug_assert!(t_up > Rat::zero() && t_down > Rat::zero());

    let up: Vec<Rat> = point
        .iter()
        .zip(&dir)
        .map(|(x, d)| x + &t_up * d)
        .collect();
    let down: Vec<Rat> = point
        .iter()
        .zip(&dir)
        .map(|(x, d)| x - &t_down * d)
        .collect();
    let lambda = &t_down / (&t_up + &t_down);
    let mu = Rat::one() - &lambda;
    decompose_rec(polytope, up, &coeff * &lambda, out)?;
    decompose_rec(polytope, down, &coeff * &mu, out)
}

/// Finite distribution over query orders at one left vertex. Atoms pair an
/// exact coefficient with a permutation of global item indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationDistribution {
    pub owner: usize,
    pub atoms: Vec<(Rat, Vec<usize>)>,
    sampler: AtomSampler,
}

/// Exact inverse-CDF sampling state: atom coefficients scaled to a common
/// denominator so atom choice is a uniform-integer draw.
#[derive(Debug, Clone, PartialEq, Eq)]
struct AtomSampler {
    denom: BigUint,
    /// Cumulative scaled numerators, last equals `denom`.
    cum: Vec<BigUint>,
    /// Fast path when the common denominator fits in a machine word.
    cum_u64: Option<Vec<u64>>,
}

impl AtomSampler {
    fn new(coeffs: &[Rat]) -> Self {
        let mut denom = BigUint::one();
        for c in coeffs {
            denom = denom.lcm(&c.denom().to_biguint().expect("positive denominator"));
        }
        let mut cum = Vec::with_capacity(coeffs.len());
        let mut acc = BigUint::zero();
        for c in coeffs {
            let scaled = c.numer().to_biguint().expect("positive coefficient")
                * (&denom / c.denom().to_biguint().unwrap());
            acc += scaled;
            cum.push(acc.clone());
        }
        debug_assert_eq!(acc, denom, "coefficients must sum to 1");
        let cum_u64 = if denom.to_u64().is_some() {
            Some(cum.iter().map(|c| c.to_u64().unwrap()).collect())
        } else {
            None
        };
        Self { denom, cum, cum_u64 }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        match (&self.cum_u64, self.denom.to_u64()) {
            (Some(cum), Some(d)) => {
                let draw = rng.gen_range(0..d);
                cum.partition_point(|c| *c <= draw)
            }
            _ => {
                let draw = rng.gen_biguint_below(&self.denom);
                self.cum.partition_point(|c| *c <= draw)
            }
        }
    }
}

impl PermutationDistribution {
    pub fn new(owner: usize, atoms: Vec<(Rat, Vec<usize>)>) -> Self {
        let coeffs: Vec<Rat> = atoms.iter().map(|(a, _)| a.clone()).collect();
        let sampler = AtomSampler::new(&coeffs);
        Self { owner, atoms, sampler }
    }

    pub fn sample<'a>(&'a self, rng: &mut impl Rng) -> &'a [usize] {
        &self.atoms[self.sampler.sample(rng)].1
    }

    pub fn to_json(&self, graph: &ItemGraph) -> serde_json::Value {
        serde_json::json!({
            "owner": graph.vertex_name(Side::Left, self.owner),
            "atoms": self.atoms.iter().map(|(a, sigma)| serde_json::json!({
                "a": format_rat(a),
                "sigma": sigma.iter().map(|&i| graph.item_key(i)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn build_distribution(
    polytope: &VertexPolytope,
    restriction: &[Rat],
) -> Result<PermutationDistribution, DecompError> {
    let atoms = caratheodory_decompose(polytope, restriction)?;
    let mut out = Vec::with_capacity(atoms.len());
    for (a, y) in atoms {
        let chain = extract_chain(polytope, &y)?;
        let sigma: Vec<usize> = chain
            .increments
            .iter()
            .flatten()
            .map(|&l| polytope.items[l])
            .collect();
        out.push((a, sigma));
    }
    Ok(PermutationDistribution::new(polytope.vertex, out))
}

/// Query-order distribution for a left vertex whose induced output marginals
/// equal the LP restriction exactly.
pub fn build_distribution_qc(
    graph: &ItemGraph,
    vertex: usize,
    solution: &LPSolution,
    caps: &Caps,
) -> Result<PermutationDistribution, DecompError> {
    let polytope = VertexPolytope::new(graph, vertex, Mode::AllSubsets, caps)?;
    build_distribution(&polytope, &solution.restrict_left(graph, vertex))
}

/// PoI variant over the lattice polytope; same-edge pairs always appear in
/// decreasing value order within every atom.
pub fn build_distribution_poi(
    graph: &ItemGraph,
    vertex: usize,
    solution: &LPSolution,
    caps: &Caps,
) -> Result<PermutationDistribution, DecompError> {
    let polytope = VertexPolytope::new(graph, vertex, Mode::Lattice, caps)?;
    build_distribution(&polytope, &solution.restrict_left(graph, vertex))
}

/// Probability that the walk over `sigma` stops at step `step` (memoized
/// draw semantics: earlier same-edge pairs condition later ones).
fn step_probabilities(graph: &ItemGraph, sigma: &[usize]) -> Vec<Rat> {
    let mut tested: Vec<(usize, Rat)> = Vec::new(); // per-edge mass already tested
    let mut out = Vec::with_capacity(sigma.len());
    for &item in sigma {
        let it = &graph.items[item];
        let mut p = it.mass.clone();
        for (e, m) in &tested {
            if *e != it.edge {
                p *= Rat::one() - m;
            }
        }
        out.push(p);
        match tested.iter_mut().find(|(e, _)| *e == it.edge) {
            Some((_, m)) => *m += &it.mass,
            None => tested.push((it.edge, it.mass.clone())),
        }
    }
    out
}

/// Exact probability that the single-vertex query procedure outputs `edge`.
pub fn output_probability(graph: &ItemGraph, dist: &PermutationDistribution, edge: usize) -> Rat {
    let mut total = Rat::zero();
    for (a, sigma) in &dist.atoms {
        let steps = step_probabilities(graph, sigma);
        for (&item, p) in sigma.iter().zip(&steps) {
            if graph.items[item].edge == edge {
                total += a * p;
            }
        }
    }
    total
}

/// Exact probability that the procedure outputs the specific edge-value pair.
pub fn output_probability_item(
    graph: &ItemGraph,
    dist: &PermutationDistribution,
    item: usize,
) -> Rat {
    let mut total = Rat::zero();
    for (a, sigma) in &dist.atoms {
        let steps = step_probabilities(graph, sigma);
        for (&it, p) in sigma.iter().zip(&steps) {
            if it == item {
                total += a * p;
            }
        }
    }
    total
}

/// `sum over values v >= w of Pr[output edge with value v] * v` (PoI only).
pub fn value_tail(
    graph: &ItemGraph,
    dist: &PermutationDistribution,
    edge: usize,
    w: &Rat,
) -> Rat {
    let mut total = Rat::zero();
    for &item in &graph.items_by_edge[edge] {
        let v = graph.items[item]
            .value
            .clone()
            .expect("value_tail is defined for PoI items only");
        if &v >= w {
            total += output_probability_item(graph, dist, item) * v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp_qc;
    use crate::model::{parse_instance, poi_to_surrogate, DiscreteDistribution, Instance, PoIInstance, QCInstance};
    use crate::rational::{rat, rat_int};

    fn figure1() -> QCInstance {
        match parse_instance(
            r#"{"model":"qc","left":["u"],"right":["b2","b3"],
            "edges":[{"id":"e2","a":"u","b":"b2","p":"1/2","w":"1"},
                     {"id":"e3","a":"u","b":"b3","p":"1/3","w":"1"}]}"#,
        )
        .unwrap()
        {
            Instance::Qc(i) => i,
            _ => panic!(),
        }
    }

    fn figure1_polytope(graph: &ItemGraph) -> VertexPolytope<'_> {
        VertexPolytope::new(graph, 0, Mode::AllSubsets, &Caps::default()).unwrap()
    }

    #[test]
    fn extreme_point_recognition_figure1() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let p = figure1_polytope(&graph);
        assert!(is_extreme(&p, &[rat(1, 2), rat(1, 6)]).unwrap());
        assert!(!is_extreme(&p, &[rat(4, 9), rat(2, 9)]).unwrap());
        assert!(is_extreme(&p, &[rat_int(0), rat_int(0)]).unwrap());
        assert!(is_extreme(&p, &[rat(1, 3), rat(1, 3)]).unwrap());
    }

    #[test]
    fn infeasible_point_is_an_error() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let p = figure1_polytope(&graph);
        assert!(is_extreme(&p, &[rat_int(1), rat_int(1)]).is_err());
    }

    #[test]
    fn figure1_chains_match_caption() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let p = figure1_polytope(&graph);
        // Items: 0 = (u,b2), 1 = (u,b3).
        let chain = extract_chain(&p, &[rat(1, 2), rat(1, 6)]).unwrap();
        assert_eq!(chain.sets, vec![vec![0], vec![0, 1]]);
        assert_eq!(chain.increments, vec![vec![0], vec![1]]);
        let chain = extract_chain(&p, &[rat(1, 3), rat(1, 3)]).unwrap();
        assert_eq!(chain.sets, vec![vec![1], vec![0, 1]]);
        assert_eq!(chain.increments, vec![vec![1], vec![0]]);
    }

    #[test]
    fn figure1_decomposition_recombines() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let p = figure1_polytope(&graph);
        let target = vec![rat(4, 9), rat(2, 9)];
        let atoms = caratheodory_decompose(&p, &target).unwrap();
        let total: Rat = atoms.iter().map(|(a, _)| a.clone()).sum();
        assert_eq!(total, Rat::one());
        let mut recombined = vec![Rat::zero(); 2];
        for (a, y) in &atoms {
            assert!(is_extreme(&p, y).unwrap());
            assert!(*a > Rat::zero());
            for (slot, v) in recombined.iter_mut().zip(y) {
                *slot += a * v;
            }
        }
        assert_eq!(recombined, target);
    }

    #[test]
    fn extreme_point_decomposes_to_itself() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let p = figure1_polytope(&graph);
        let y = vec![rat(1, 2), rat(1, 6)];
        let atoms = caratheodory_decompose(&p, &y).unwrap();
        assert_eq!(atoms, vec![(Rat::one(), y)]);
    }

    #[test]
    fn figure1_output_probabilities() {
        let inst = figure1();
        let (graph, _) = solve_lp_qc(&inst, &Caps::default()).unwrap();
        let solution = LPSolution {
            x: vec![rat(4, 9), rat(2, 9)],
            objective: rat(2, 3),
            tight: vec![],
        };
        let dist = build_distribution_qc(&graph, 0, &solution, &Caps::default()).unwrap();
        assert_eq!(output_probability(&graph, &dist, 0), rat(4, 9));
        assert_eq!(output_probability(&graph, &dist, 1), rat(2, 9));
    }

    #[test]
    fn zero_vector_gives_empty_permutation() {
        let inst = figure1();
        let graph = ItemGraph::from_qc(&inst);
        let solution = LPSolution {
            x: vec![Rat::zero(), Rat::zero()],
            objective: Rat::zero(),
            tight: vec![],
        };
        let dist = build_distribution_qc(&graph, 0, &solution, &Caps::default()).unwrap();
        assert_eq!(dist.atoms, vec![(Rat::one(), vec![])]);
        assert_eq!(output_probability(&graph, &dist, 0), Rat::zero());
    }

    #[test]
    fn single_edge_distribution() {
        let inst = match parse_instance(
            r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1/2","w":"1"}]}"#,
        )
        .unwrap()
        {
            Instance::Qc(i) => i,
            _ => panic!(),
        };
        let (graph, sol) = solve_lp_qc(&inst, &Caps::default()).unwrap();
        let dist = build_distribution_qc(&graph, 0, &sol, &Caps::default()).unwrap();
        assert_eq!(dist.atoms, vec![(Rat::one(), vec![0])]);
        assert_eq!(output_probability(&graph, &dist, 0), rat(1, 2));
    }

    fn two_value_surrogate() -> (PoIInstance, crate::model::SurrogateInstance) {
        let poi = PoIInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            vec![(
                "e".into(),
                "a".into(),
                "b".into(),
                DiscreteDistribution::new(vec![(rat_int(2), rat(1, 4)), (rat_int(1), rat(1, 4))])
                    .unwrap(),
                Rat::zero(),
            )],
        )
        .unwrap();
        let s = poi_to_surrogate(&poi).unwrap();
        (poi, s)
    }

    #[test]
    fn poi_chain_increment_ordering() {
        // Extreme point of the one-edge lattice polytope with only the
        // low-value coordinate positive: x_{e,1} = f({(e,2),(e,1)}) - f({(e,2)}).
        let (_, s) = two_value_surrogate();
        let graph = ItemGraph::from_surrogate(&s);
        let p = VertexPolytope::new(&graph, 0, Mode::Lattice, &Caps::default()).unwrap();
        let bound_full = graph.coverage_of(&[0, 1]);
        let y = vec![Rat::zero(), bound_full];
        assert!(is_extreme(&p, &y).unwrap());
        let chain = extract_chain(&p, &y).unwrap();
        assert_eq!(chain.sets, vec![vec![0, 1]]);
        // Single increment, decreasing value order: (e,2) then (e,1).
        assert_eq!(chain.increments, vec![vec![0, 1]]);
    }

    #[test]
    fn poi_same_edge_pairs_listed_high_value_first() {
        let (_, s) = two_value_surrogate();
        let (graph, sol) = crate::lp::solve_lp_poi(&s, &Caps::default()).unwrap();
        let dist = build_distribution_poi(&graph, 0, &sol, &Caps::default()).unwrap();
        for (_, sigma) in &dist.atoms {
            let positions: Vec<usize> = sigma.to_vec();
            if let (Some(hi), Some(lo)) = (
                positions.iter().position(|&i| i == 0),
                positions.iter().position(|&i| i == 1),
            ) {
                assert!(hi < lo, "high value pair must precede low value pair");
            }
        }
        // Property 2: per-edge totals match the LP marginals exactly.
        let lhs = output_probability(&graph, &dist, 0);
        let rhs = &sol.x[0] + &sol.x[1];
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn value_tail_edges() {
        let (_, s) = two_value_surrogate();
        let (graph, sol) = crate::lp::solve_lp_poi(&s, &Caps::default()).unwrap();
        let dist = build_distribution_poi(&graph, 0, &sol, &Caps::default()).unwrap();
        // Above the top of the support the tail is empty.
        assert_eq!(value_tail(&graph, &dist, 0, &rat_int(5)), Rat::zero());
        // Tail dominance at every support value and at 0.
        for w in [Rat::zero(), rat_int(1), rat_int(2)] {
            let lp_tail: Rat = graph
                .items_by_edge[0]
                .iter()
                .filter(|&&i| graph.items[i].value.as_ref().unwrap() >= &w)
                .map(|&i| &sol.x[i] * graph.items[i].value.as_ref().unwrap())
                .sum();
            assert!(value_tail(&graph, &dist, 0, &w) >= lp_tail);
        }
    }

    #[test]
    fn sampler_is_exact_over_atoms() {
        let dist = PermutationDistribution::new(
            0,
            vec![(rat(2, 3), vec![0]), (rat(1, 3), vec![1])],
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 2];
        for _ in 0..30_000 {
            let s = dist.sample(&mut rng);
            counts[s[0]] += 1;
        }
        let frac = counts[0] as f64 / 30_000.0;
        assert!((frac - 2.0 / 3.0).abs() < 0.02, "frac = {frac}");
    }

    use rand::SeedableRng;
}
