//! The property K-reachability graph: vertices `I`, one per property, `F`,
//! plus clones introduced by refinement; weighted edges give the minimal
//! number of steps between trigger sets.

mod closure;
mod cover;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

pub use closure::Closure;
pub use cover::{choose_members, exists_covering_path, get_covering_path, lemma1, Lemma1Report};

use crate::bmc::{kreach_edges, BmcError, Pin, Unrolling};
use crate::model::{Expr, Property};

#[derive(Debug, Clone)]
pub struct ReachGraph {
    pins: Vec<Pin>,
    /// Original vertex of each vertex; clones point at the property they split.
    origin: Vec<usize>,
    edges: BTreeMap<(usize, usize), usize>,
    fin: usize,
    /// Original properties that need not be covered (outside a partition class).
    optional: BTreeSet<usize>,
    /// Largest `k` for which edges were enumerated.
    pub bound: usize,
}

impl ReachGraph {
    pub const INIT: usize = 0;

    /// `pins[0]` is `I`, the last pin is `F`, properties in between.
    pub fn new(pins: Vec<Pin>) -> Self {
        assert!(pins.len() >= 2, "need at least I and F");
        let fin = pins.len() - 1;
        ReachGraph {
            origin: (0..pins.len()).collect(),
            pins,
            edges: BTreeMap::new(),
            fin,
            optional: BTreeSet::new(),
            bound: 0,
        }
    }

    pub fn for_properties(props: &[Property], init: &Expr, fin: &Expr) -> Self {
        let mut pins = vec![Pin::states("I", init.clone())];
        pins.extend(props.iter().map(Pin::property));
        pins.push(Pin::states("F", fin.clone()));
        ReachGraph::new(pins)
    }

    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn final_vertex(&self) -> usize {
        self.fin
    }

    pub fn pin(&self, v: usize) -> &Pin {
        &self.pins[v]
    }

    pub fn name(&self, v: usize) -> String {
        if self.origin[v] == v {
            self.pins[v].name.clone()
        } else {
            let nth = (0..=v).filter(|&u| self.origin[u] == self.origin[v]).count() - 1;
            format!("{}#{}", self.pins[v].name, nth)
        }
    }

    /// Original property vertices, in index order.
    pub fn properties(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.fin).filter(|&v| self.origin[v] == v)
    }

    pub fn is_property(&self, v: usize) -> bool {
        v != Self::INIT && v != self.fin
    }

    pub fn origin(&self, v: usize) -> usize {
        self.origin[v]
    }

    /// Groups that a covering path must visit, keyed by original vertex.
    pub fn property_groups(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.len() {
            if self.is_property(v) && !self.optional.contains(&self.origin[v]) {
                out.entry(self.origin[v]).or_default().push(v);
            }
        }
        out
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.edges
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.get(&(a, b)).copied()
    }

    pub fn set_weight(&mut self, a: usize, b: usize, w: usize) {
        self.edges.insert((a, b), w);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> Option<usize> {
        self.edges.remove(&(a, b))
    }

    /// Adds a clone of `v` in the same group, without edges.
    pub fn add_clone(&mut self, v: usize) -> usize {
        assert!(self.is_property(v), "only property vertices are split");
        self.pins.push(self.pins[v].clone());
        self.origin.push(self.origin[v]);
        self.pins.len() - 1
    }

    /// Same graph, but only the groups of `keep` must be covered; the other
    /// vertices stay available as intermediate steps.
    pub fn require_only(&self, keep: &BTreeSet<usize>) -> ReachGraph {
        let mut g = self.clone();
        g.optional = self.properties().filter(|p| !keep.contains(p)).collect();
        g
    }

    pub fn is_required(&self, v: usize) -> bool {
        self.is_property(v) && !self.optional.contains(&self.origin[v])
    }

    /// Graphviz rendering with weights as edge labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph reach {\n  rankdir=LR;\n");
        for v in 0..self.len() {
            let shape = if self.is_property(v) { "ellipse" } else { "box" };
            writeln!(out, "  v{v} [label=\"{}\", shape={shape}];", self.name(v)).unwrap();
        }
        for (&(a, b), &w) in &self.edges {
            writeln!(out, "  v{a} -> v{b} [label=\"{w}\"];").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("no chain found for given bound K = {bound}")]
    NoChainAtBound { bound: usize, graph: Box<ReachGraph> },
    #[error("all edges are known but no single covering path exists")]
    NoSingleChain { graph: Box<ReachGraph> },
    #[error(transparent)]
    Bmc(#[from] BmcError),
}

fn initial_targets(g: &ReachGraph) -> BTreeSet<(usize, usize)> {
    let props: Vec<usize> = g.properties().collect();
    let mut t = BTreeSet::new();
    if props.is_empty() {
        t.insert((ReachGraph::INIT, g.final_vertex()));
    }
    for &p in &props {
        t.insert((ReachGraph::INIT, p));
        t.insert((p, g.final_vertex()));
        for &q in &props {
            if p != q {
                t.insert((p, q));
            }
        }
    }
    t
}

/// Adds weight-`k` edges for `k = 0, 1, ...` until a covering path exists.
///
/// Edges into `F` from a property need `k >= 1` so that the covering step
/// lies inside the chain.
pub fn build_prop_kreach_graph(
    u: &mut Unrolling<'_>,
    mut g: ReachGraph,
    k_max: usize,
) -> Result<ReachGraph, GraphError> {
    let mut targets = initial_targets(&g);
    let pins: Vec<Pin> = (0..g.len()).map(|v| g.pin(v).clone()).collect();
    for k in 0..=k_max {
        g.bound = k;
        let fin = g.final_vertex();
        let now: BTreeSet<_> =
            targets.iter().copied().filter(|&(a, b)| k > 0 || b != fin || a == ReachGraph::INIT).collect();
        let found = kreach_edges(u, &pins, &now, k)?;
        tracing::debug!(k, found = found.len(), open = targets.len(), "k-reach round");
        for (a, b) in found {
            g.set_weight(a, b, k);
            targets.remove(&(a, b));
        }
        if exists_covering_path(&g) {
            return Ok(g);
        }
        if targets.is_empty() {
            return Err(GraphError::NoSingleChain { graph: Box::new(g) });
        }
    }
    Err(GraphError::NoChainAtBound { bound: k_max, graph: Box::new(g) })
}

/// Continues enumeration with rounds `g.bound + 1 ..= upto` over the pairs
/// that still lack an edge. New edges are heavier than every existing one.
pub fn extend_graph(u: &mut Unrolling<'_>, g: &mut ReachGraph, upto: usize) -> Result<(), BmcError> {
    let pins: Vec<Pin> = (0..g.len()).map(|v| g.pin(v).clone()).collect();
    let mut targets: BTreeSet<_> = initial_targets(g).into_iter().filter(|e| !g.edges.contains_key(e)).collect();
    for k in g.bound + 1..=upto {
        if targets.is_empty() {
            break;
        }
        g.bound = k;
        for (a, b) in kreach_edges(u, &pins, &targets, k)? {
            g.set_weight(a, b, k);
            targets.remove(&(a, b));
        }
    }
    Ok(())
}

/// True when every candidate pair already has an edge.
pub fn is_complete(g: &ReachGraph) -> bool {
    initial_targets(g).iter().all(|e| g.edges.contains_key(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::BmcConfig;
    use crate::dsl;
    use crate::fixtures;

    #[test]
    fn cruise_graph_stops_at_two() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let props = dsl::parse_properties(&m, fixtures::CRUISE_PROPS).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let g = build_prop_kreach_graph(&mut u, ReachGraph::for_properties(&props, &init, &init), 10).unwrap();
        assert_eq!(g.bound, 2);
        for w in [(2, 1, 1), (1, 3, 1), (2, 3, 1), (0, 1, 2), (0, 4, 2), (3, 5, 2)] {
            assert_eq!(g.weight(w.0, w.1), Some(w.2), "edge {w:?}");
        }
        assert!(g.edges().values().all(|&w| w <= 2));
        assert!(g.to_dot().contains("v2 -> v1 [label=\"1\"]"));
    }

    #[test]
    fn no_properties_single_edge() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let g = build_prop_kreach_graph(&mut u, ReachGraph::for_properties(&[], &init, &init), 5).unwrap();
        assert_eq!(g.edges().iter().collect::<Vec<_>>(), vec![(&(0, 1), &0)]);
    }

    #[test]
    fn unsatisfiable_final_set_hits_bound() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let props = dsl::parse_properties(&m, fixtures::CRUISE_PROPS).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        let never = dsl::parse_state_set(&m, "mode == ON && !enable").unwrap();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let err = build_prop_kreach_graph(&mut u, ReachGraph::for_properties(&props, &init, &never), 3).unwrap_err();
        assert!(matches!(err, GraphError::NoChainAtBound { bound: 3, .. }));
    }

    #[test]
    fn clones_share_a_group_and_optional_groups_drop_out() {
        let pins: Vec<Pin> = (0..4).map(|i| Pin::states(format!("v{i}"), Expr::tt())).collect();
        let mut g = ReachGraph::new(pins);
        let c = g.add_clone(1);
        g.set_weight(0, c, 1);
        g.set_weight(0, 2, 1);
        assert_eq!(g.property_groups()[&1], vec![1, 4]);
        assert_eq!(g.name(c), "v1#1");
        let r = g.require_only(&[2].into_iter().collect());
        assert_eq!(r.property_groups().keys().copied().collect::<Vec<_>>(), vec![2]);
        assert!(!r.is_required(c));
        assert_eq!(r.len(), g.len());
    }
}
