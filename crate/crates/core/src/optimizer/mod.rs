//! Shortest covering paths through the reach graph, via an asymmetric TSP
//! over the transitive closure with a fixed `F -> I` return edge.

mod atsp;

use std::collections::BTreeMap;

pub use atsp::{solve_exact, solve_heuristic, AtspInstance, Tour, EXACT_LIMIT};

use crate::reachgraph::{get_covering_path, Closure, ReachGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AtspBackend {
    Exact,
    Heuristic,
    /// Exact up to [`EXACT_LIMIT`] vertices, heuristic beyond.
    #[default]
    Auto,
}

impl std::str::FromStr for AtspBackend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(AtspBackend::Exact),
            "heuristic" => Ok(AtspBackend::Heuristic),
            "auto" => Ok(AtspBackend::Auto),
            _ => Err(format!("unknown ATSP backend `{s}`")),
        }
    }
}

/// Cost of the designated return edge; it is in every tour and subtracted
/// again when the circuit is cut.
pub const RETURN_COST: u64 = 1;

/// A path over original graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringPath {
    pub vertices: Vec<usize>,
    /// `weights[j]` is the weight of edge `vertices[j] -> vertices[j+1]`.
    pub weights: Vec<usize>,
    /// Whether the tour came from the exact solver.
    pub exact: bool,
    /// False once groups were collapsed; the path is then only minimised.
    pub optimality_preserved: bool,
}

impl CoveringPath {
    pub fn total(&self) -> usize {
        self.weights.iter().sum()
    }

    pub fn from_vertices(g: &ReachGraph, vertices: Vec<usize>) -> Option<CoveringPath> {
        let weights = vertices.windows(2).map(|w| g.weight(w[0], w[1])).collect::<Option<Vec<_>>>()?;
        Some(CoveringPath { vertices, weights, exact: false, optimality_preserved: false })
    }
}

/// Result of collapsing refinement groups with respect to a covering path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapsed {
    /// `I`, one member per group, `F`.
    pub kept: Vec<usize>,
    /// Vertices of optional groups, usable as intermediate steps only.
    pub via: Vec<usize>,
    /// Edges among kept vertices with their expansion into interior vertices.
    pub edges: BTreeMap<(usize, usize), (usize, Vec<usize>)>,
    pub optimality_preserved: bool,
}

/// Keeps, for each group, the first member visited by `path` and bypasses
/// every other member `v` with composite edges `(a, b)` of weight
/// `W(a, v) + W(v, b)` where `(a, b)` is absent; `v` is then removed.
pub fn collapse_groups(g: &ReachGraph, path: &[usize]) -> Collapsed {
    let mut chosen: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in path {
        if g.is_required(v) {
            chosen.entry(g.origin(v)).or_insert(v);
        }
    }
    let mut kept = vec![ReachGraph::INIT];
    kept.extend(chosen.values().copied());
    kept.push(g.final_vertex());
    let mut edges: BTreeMap<(usize, usize), (usize, Vec<usize>)> =
        g.edges().iter().map(|(&e, &w)| (e, (w, vec![]))).collect();
    let singleton = g.property_groups().values().all(|m| m.len() == 1);
    let via: Vec<usize> = (0..g.len()).filter(|&v| g.is_property(v) && !g.is_required(v)).collect();
    for v in (0..g.len()).filter(|v| !kept.contains(v) && !via.contains(v)) {
        let ins: Vec<(usize, (usize, Vec<usize>))> =
            edges.iter().filter(|((a, b), _)| *b == v && *a != v).map(|((a, _), x)| (*a, x.clone())).collect();
        let outs: Vec<(usize, (usize, Vec<usize>))> =
            edges.iter().filter(|((a, b), _)| *a == v && *b != v).map(|((_, b), x)| (*b, x.clone())).collect();
        for (a, (w1, p1)) in &ins {
            for (b, (w2, p2)) in &outs {
                if a != b && !edges.contains_key(&(*a, *b)) {
                    let mut interior = p1.clone();
                    interior.push(v);
                    interior.extend_from_slice(p2);
                    edges.insert((*a, *b), (w1 + w2, interior));
                }
            }
        }
        edges.retain(|(a, b), _| *a != v && *b != v);
    }
    Collapsed { kept, via, edges, optimality_preserved: singleton }
}

impl Collapsed {
    /// The ATSP instance over `kept` (indices into `kept`) and the closure it
    /// was built from.
    pub fn instance(&self) -> (AtspInstance, Closure) {
        let nodes = self.nodes();
        let n = self.kept.len();
        let idx: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let local: BTreeMap<(usize, usize), usize> =
            self.edges.iter().map(|(&(a, b), &(w, _))| ((idx[&a], idx[&b]), w)).collect();
        let c = Closure::of_edges(nodes.len(), &local);
        let fin = n - 1;
        let mut cost = vec![vec![None; n]; n];
        for (a, row) in cost.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                if a != b && b != 0 && a != fin {
                    *cell = c.weight(a, b).map(|w| w as u64);
                }
            }
        }
        cost[fin][0] = Some(RETURN_COST);
        let mut inst = AtspInstance::new(cost);
        inst.ret = Some((fin, 0));
        (inst, c)
    }

    /// Kept vertices followed by pass-through ones; closure indices refer to this.
    pub fn nodes(&self) -> Vec<usize> {
        self.kept.iter().chain(&self.via).copied().collect()
    }

    /// Expands a tour over `kept` indices into a path over original edges.
    pub fn expand(&self, g: &ReachGraph, closure: &Closure, order: &[usize]) -> Option<CoveringPath> {
        let fin = self.kept.len() - 1;
        let start = order.iter().position(|&x| x == 0)?;
        let mut local: Vec<usize> = order[start..].iter().chain(&order[..start]).copied().collect();
        if *local.last()? != fin {
            return None;
        }
        if local.len() == 1 {
            local.push(fin);
        }
        let hops = closure.expand_path(&local)?;
        let nodes = self.nodes();
        let mut vertices = vec![nodes[hops[0]]];
        for w in hops.windows(2) {
            let (a, b) = (nodes[w[0]], nodes[w[1]]);
            let (_, interior) = self.edges.get(&(a, b))?;
            vertices.extend_from_slice(interior);
            vertices.push(b);
        }
        CoveringPath::from_vertices(g, vertices)
    }
}

/// Solves the instance with the chosen backend. The flag tells whether the
/// exact solver produced the tour.
pub fn solve(inst: &AtspInstance, backend: AtspBackend, seed: u64) -> Option<(Tour, bool)> {
    let exact = match backend {
        AtspBackend::Exact => true,
        AtspBackend::Heuristic => false,
        AtspBackend::Auto => inst.len() <= EXACT_LIMIT,
    };
    if exact {
        if let Ok(t) = solve_exact(inst) {
            return t.map(|t| (t, true));
        }
    }
    solve_heuristic(inst, seed).map(|t| (t, false))
}

/// Minimal (or, after refinement, minimised) covering path of `g`, or `None`
/// when no covering path exists.
pub fn min_covering_path(g: &ReachGraph, backend: AtspBackend, seed: u64) -> Option<CoveringPath> {
    let closure = Closure::of_edges(g.len(), g.edges());
    let seed_path = get_covering_path(g, &closure)?;
    let collapsed = collapse_groups(g, &seed_path);
    optimise(g, &collapsed, backend, seed).or_else(|| {
        let full = closure.expand_path(&seed_path)?;
        CoveringPath::from_vertices(g, full)
    })
}

/// Solves the collapsed instance and expands the tour.
pub fn optimise(g: &ReachGraph, collapsed: &Collapsed, backend: AtspBackend, seed: u64) -> Option<CoveringPath> {
    let (inst, closure) = collapsed.instance();
    let (tour, exact) = solve(&inst, backend, seed)?;
    let mut p = collapsed.expand(g, &closure, &tour.order)?;
    debug_assert_eq!(p.total() as u64 + RETURN_COST, tour.cost);
    p.exact = exact;
    p.optimality_preserved = exact && collapsed.optimality_preserved;
    Some(p)
}
