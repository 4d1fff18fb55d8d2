//! The coverage function, constraint families and separation, and the
//! cutting-plane solver for the two matching LPs.
//!
//! Both LPs share one shape: a variable per "item" (an edge in the
//! query-commit model, an edge-value pair in the price-of-information
//! model), the objective `sum x_i * weight_i`, and per-vertex constraints
//! `sum_{i in F} x_i <= f(F)` where `f` is the probability that at least
//! one item outcome in `F` occurs. [`ItemGraph`] carries that shared shape.

pub mod simplex;

use crate::model::{QCInstance, SurrogateInstance};
use crate::rational::{format_rat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    AllSubsets,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("enumeration cap exceeded at vertex {vertex}: {detail}")]
    CapExceeded { vertex: String, detail: String },
}

/// Enumeration limits for exact separation and family enumeration.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Max items incident to a vertex for all-subsets enumeration.
    pub subset_items: usize,
    /// Max lattice-family size per vertex (product of `|V_e| + 1`).
    pub lattice_sets: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { subset_items: 20, lattice_sets: 1 << 16 }
    }
}

/// One LP coordinate: an edge (QC) or an edge-value pair (PoI).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub edge: usize,
    /// `None` in the query-commit model.
    pub value: Option<Rat>,
    pub left: usize,
    pub right: usize,
    /// Probability that this item's outcome occurs.
    pub mass: Rat,
    /// Objective coefficient: `w(e)` or the value `v`.
    pub weight: Rat,
}

/// Shared instance shape for both LPs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemGraph {
    pub left_names: Vec<String>,
    pub right_names: Vec<String>,
    pub edge_ids: Vec<String>,
    pub edge_endpoints: Vec<(usize, usize)>,
    pub items: Vec<Item>,
    items_by_left: Vec<Vec<usize>>,
    items_by_right: Vec<Vec<usize>>,
    /// Per edge, its items in decreasing value order (a single item for QC).
    pub items_by_edge: Vec<Vec<usize>>,
}

impl ItemGraph {
    fn index(mut self) -> Self {
        self.items_by_left = vec![Vec::new(); self.left_names.len()];
        self.items_by_right = vec![Vec::new(); self.right_names.len()];
        self.items_by_edge = vec![Vec::new(); self.edge_ids.len()];
        for (i, item) in self.items.iter().enumerate() {
            self.items_by_left[item.left].push(i);
            self.items_by_right[item.right].push(i);
            self.items_by_edge[item.edge].push(i);
        }
        self
    }

    pub fn from_qc(instance: &QCInstance) -> Self {
        let items = instance
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Item {
                edge: i,
                value: None,
                left: e.a_idx,
                right: e.b_idx,
                mass: e.p.clone(),
                weight: e.w.clone(),
            })
            .collect();
        ItemGraph {
            left_names: instance.left.clone(),
            right_names: instance.right.clone(),
            edge_ids: instance.edges.iter().map(|e| e.id.clone()).collect(),
            edge_endpoints: instance.edges.iter().map(|e| (e.a_idx, e.b_idx)).collect(),
            items,
            items_by_left: Vec::new(),
            items_by_right: Vec::new(),
            items_by_edge: Vec::new(),
        }
        .index()
    }

    pub fn from_surrogate(surrogate: &SurrogateInstance) -> Self {
        let mut items = Vec::new();
        for (i, e) in surrogate.base.edges.iter().enumerate() {
            for (v, p) in surrogate.y[i].support() {
                items.push(Item {
                    edge: i,
                    value: Some(v.clone()),
                    left: e.a_idx,
                    right: e.b_idx,
                    mass: p.clone(),
                    weight: v.clone(),
                });
            }
        }
        ItemGraph {
            left_names: surrogate.base.left.clone(),
            right_names: surrogate.base.right.clone(),
            edge_ids: surrogate.base.edges.iter().map(|e| e.id.clone()).collect(),
            edge_endpoints: surrogate
                .base
                .edges
                .iter()
                .map(|e| (e.a_idx, e.b_idx))
                .collect(),
            items,
            items_by_left: Vec::new(),
            items_by_right: Vec::new(),
            items_by_edge: Vec::new(),
        }
        .index()
    }

    pub fn items_at(&self, side: Side, vertex: usize) -> &[usize] {
        match side {
            Side::Left => &self.items_by_left[vertex],
            Side::Right => &self.items_by_right[vertex],
        }
    }

    pub fn vertex_name(&self, side: Side, vertex: usize) -> &str {
        match side {
            Side::Left => &self.left_names[vertex],
            Side::Right => &self.right_names[vertex],
        }
    }

    /// Textual key for an item, used in serialized solutions: the edge id,
    /// or `id@value` for edge-value pairs.
    pub fn item_key(&self, item: usize) -> String {
        let it = &self.items[item];
        match &it.value {
            None => self.edge_ids[it.edge].clone(),
            Some(v) => format!("{}@{}", self.edge_ids[it.edge], format_rat(v)),
        }
    }

    /// Probability that at least one item outcome in `subset` occurs:
    /// `1 - prod_e (1 - sum of included masses of e)`.
    pub fn coverage_of(&self, subset: &[usize]) -> Rat {
        let mut per_edge: Vec<(usize, Rat)> = Vec::new();
        for &i in subset {
            let it = &self.items[i];
            match per_edge.iter_mut().find(|(e, _)| *e == it.edge) {
                Some((_, m)) => *m += &it.mass,
                None => per_edge.push((it.edge, it.mass.clone())),
            }
        }
        let mut miss = Rat::one();
        for (_, m) in per_edge {
            miss *= Rat::one() - m;
        }
        Rat::one() - miss
    }
}

/// `1 - prod (1 - p)` over existence probabilities.
pub fn coverage_prob_qc(probs: &[Rat]) -> Rat {
    let mut miss = Rat::one();
    for p in probs {
        miss *= Rat::one() - p;
    }
    Rat::one() - miss
}

/// Same product formula over per-edge included value masses; errors if some
/// edge mass reaches 1 (the strict-mass assumption is violated).
pub fn coverage_prob_poi(per_edge_masses: &[Rat]) -> Result<Rat, LpError> {
    for m in per_edge_masses {
        if *m >= Rat::one() {
            return Err(LpError::CapExceeded {
                vertex: String::new(),
                detail: format!("per-edge mass {} must be below 1", format_rat(m)),
            });
        }
    }
    Ok(coverage_prob_qc(per_edge_masses))
}

/// A generated (or tight) constraint `sum_{i in items} x_i <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRef {
    pub side: Side,
    pub vertex: usize,
    /// Sorted item indices.
    pub items: Vec<usize>,
    pub bound: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPSolution {
    pub x: Vec<Rat>,
    pub objective: Rat,
    pub tight: Vec<ConstraintRef>,
}

impl LPSolution {
    /// Restriction of `x` to the items incident to a left vertex, in the
    /// order of `graph.items_at(Side::Left, vertex)`.
    pub fn restrict_left(&self, graph: &ItemGraph, vertex: usize) -> Vec<Rat> {
        graph
            .items_at(Side::Left, vertex)
            .iter()
            .map(|&i| self.x[i].clone())
            .collect()
    }

    pub fn to_json(&self, graph: &ItemGraph) -> serde_json::Value {
        let mut xs = serde_json::Map::new();
        let mut keyed: Vec<(String, usize)> = (0..self.x.len())
            .map(|i| (graph.item_key(i), i))
            .collect();
        keyed.sort();
        for (key, i) in keyed {
            xs.insert(key, serde_json::Value::String(format_rat(&self.x[i])));
        }
        let tight: Vec<serde_json::Value> = self
            .tight
            .iter()
            .map(|c| {
                serde_json::json!({
                    "vertex": graph.vertex_name(c.side, c.vertex),
                    "subset": c.items.iter().map(|&i| graph.item_key(i)).collect::<Vec<_>>(),
                    "bound": format_rat(&c.bound),
                })
            })
            .collect();
        serde_json::json!({
            "objective": format_rat(&self.objective),
            "x": serde_json::Value::Object(xs),
            "tight": tight,
        })
    }
}

/// All subsets of the items incident to `vertex` (the constraint family of
/// the all-subsets mode), including the empty set.
pub fn enumerate_subsets(
    graph: &ItemGraph,
    side: Side,
    vertex: usize,
    caps: &Caps,
) -> Result<Vec<Vec<usize>>, LpError> {
    let incident = graph.items_at(side, vertex);
    if incident.len() > caps.subset_items {
        return Err(LpError::CapExceeded {
            vertex: graph.vertex_name(side, vertex).to_owned(),
            detail: format!(
                "{} incident items exceed the all-subsets cap {}",
                incident.len(),
                caps.subset_items
            ),
        });
    }
    let k = incident.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u64..(1 << k) {
        let mut set = Vec::new();
        for (pos, &item) in incident.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                set.push(item);
            }
        }
        out.push(set);
    }
    Ok(out)
}

/// All upward-closed-per-edge subsets of the edge-value pairs at a left
/// vertex, each determined by a per-edge prefix length of the
/// decreasing-value item list. Count is `prod_e (|V_e| + 1)`.
pub fn enumerate_lattice_sets(
    graph: &ItemGraph,
    vertex: usize,
    caps: &Caps,
) -> Result<Vec<Vec<usize>>, LpError> {
    let mut edges: Vec<usize> = graph
        .items_at(Side::Left, vertex)
        .iter()
        .map(|&i| graph.items[i].edge)
        .collect();
    edges.dedup();
    let mut count: usize = 1;
    for &e in &edges {
        count = count.saturating_mul(graph.items_by_edge[e].len() + 1);
        if count > caps.lattice_sets {
            return Err(LpError::CapExceeded {
                vertex: graph.vertex_name(Side::Left, vertex).to_owned(),
                detail: format!("lattice family exceeds the cap {}", caps.lattice_sets),
            });
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut counters = vec![0usize; edges.len()];
    loop {
        let mut set = Vec::new();
        for (ei, &e) in edges.iter().enumerate() {
            set.extend_from_slice(&graph.items_by_edge[e][..counters[ei]]);
        }
        set.sort_unstable();
        out.push(set);
        // mixed-radix increment
        let mut pos = 0;
        loop {
            if pos == edges.len() {
                return Ok(out);
            }
            counters[pos] += 1;
            if counters[pos] <= graph.items_by_edge[edges[pos]].len() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

/// Most-violated constraint in an explicit family, or `None` when `x` is
/// feasible for it. Ties break to the smallest set, then lexicographic items.
pub fn most_violated_in_family(
    graph: &ItemGraph,
    side: Side,
    vertex: usize,
    family: &[Vec<usize>],
    x: &[Rat],
) -> Option<ConstraintRef> {
    let mut best: Option<(Rat, Vec<usize>, Rat)> = None;
    for set in family {
        if set.is_empty() {
            continue;
        }
        let bound = graph.coverage_of(set);
        let total: Rat = set.iter().map(|&i| x[i].clone()).sum();
        let slack = &bound - &total;
        if slack >= Rat::zero() {
            continue;
        }
        let replace = match &best {
            None => true,
            Some((s, items, _)) => {
                slack < *s
                    || (slack == *s
                        && (set.len() < items.len()
                            || (set.len() == items.len() && set < items)))
            }
        };
        if replace {
            best = Some((slack, set.clone(), bound));
        }
    }
    best.map(|(_, items, bound)| ConstraintRef { side, vertex, items, bound })
}

/// Exhaustive separation at one vertex: the minimizer of `f(F) - sum_F x`
/// over the configured family, returned when negative.
pub fn separation_oracle(
    graph: &ItemGraph,
    side: Side,
    vertex: usize,
    x: &[Rat],
    mode: Mode,
    caps: &Caps,
) -> Result<Option<ConstraintRef>, LpError> {
    let family = match mode {
        Mode::AllSubsets => enumerate_subsets(graph, side, vertex, caps)?,
        Mode::Lattice => {
            debug_assert_eq!(side, Side::Left, "lattice families are per left vertex");
            enumerate_lattice_sets(graph, vertex, caps)?
        }
    };
    Ok(most_violated_in_family(graph, side, vertex, &family, x))
}

fn all_vertices(graph: &ItemGraph) -> Vec<(Side, usize)> {
    (0..graph.left_names.len())
        .map(|v| (Side::Left, v))
        .chain((0..graph.right_names.len()).map(|v| (Side::Right, v)))
        .collect()
}

/// Cutting-plane solve over the full per-vertex all-subsets families.
///
/// Seeds with singleton and full-neighborhood constraints, then alternates
/// exact simplex solves with exhaustive separation until no vertex yields a
/// violated constraint; that final round is the optimality certificate.
pub fn solve_item_lp(graph: &ItemGraph, caps: &Caps) -> Result<LPSolution, LpError> {
    // Cap check up front so errors do not depend on the cut sequence.
    for &(side, v) in &all_vertices(graph) {
        let incident = graph.items_at(side, v);
        if incident.len() > caps.subset_items {
            return Err(LpError::CapExceeded {
                vertex: graph.vertex_name(side, v).to_owned(),
                detail: format!(
                    "{} incident items exceed the all-subsets cap {}",
                    incident.len(),
                    caps.subset_items
                ),
            });
        }
    }

    let n = graph.items.len();
    let objective: Vec<Rat> = graph.items.iter().map(|i| i.weight.clone()).collect();

    let mut constraints: Vec<ConstraintRef> = Vec::new();
    let mut seen: BTreeSet<(Side, usize, Vec<usize>)> = BTreeSet::new();
    let push = |constraints: &mut Vec<ConstraintRef>,
                    seen: &mut BTreeSet<(Side, usize, Vec<usize>)>,
                    c: ConstraintRef| {
        if seen.insert((c.side, c.vertex, c.items.clone())) {
            constraints.push(c);
        }
    };
    for i in 0..n {
        let it = &graph.items[i];
        push(
            &mut constraints,
            &mut seen,
            ConstraintRef {
                side: Side::Left,
                vertex: it.left,
                items: vec![i],
                bound: it.mass.clone(),
            },
        );
    }
    for &(side, v) in &all_vertices(graph) {
        let items = graph.items_at(side, v).to_vec();
        if items.is_empty() {
            continue;
        }
        let bound = graph.coverage_of(&items);
        push(&mut constraints, &mut seen, ConstraintRef { side, vertex: v, items, bound });
    }

    loop {
        let rows: Vec<simplex::Row> = constraints
            .iter()
            .map(|c| simplex::Row {
                coeffs: c.items.iter().map(|&i| (i, Rat::one())).collect(),
                rhs: c.bound.clone(),
            })
            .collect();
        let result = simplex::maximize(&objective, &rows);

        let mut added = false;
        for &(side, v) in &all_vertices(graph) {
            if let Some(c) = separation_oracle(graph, side, v, &result.x, Mode::AllSubsets, caps)? {
                push(&mut constraints, &mut seen, c);
                added = true;
            }
        }
        if !added {
            let tight = constraints
                .iter()
                .filter(|c| {
                    let total: Rat = c.items.iter().map(|&i| result.x[i].clone()).sum();
                    total == c.bound
                })
                .cloned()
                .collect();
            return Ok(LPSolution { x: result.x, objective: result.objective, tight });
        }
    }
}

pub fn solve_lp_qc(instance: &QCInstance, caps: &Caps) -> Result<(ItemGraph, LPSolution), LpError> {
    let graph = ItemGraph::from_qc(instance);
    let solution = solve_item_lp(&graph, caps)?;
    Ok((graph, solution))
}

pub fn solve_lp_poi(
    surrogate: &SurrogateInstance,
    caps: &Caps,
) -> Result<(ItemGraph, LPSolution), LpError> {
    let graph = ItemGraph::from_surrogate(surrogate);
    let solution = solve_item_lp(&graph, caps)?;
    Ok((graph, solution))
}
