//! The chaining loop: build the property reach graph, pick a minimal
//! covering path, concretise it with bounded model checking, and repair,
//! refine or partition when the abstraction is too coarse.

mod partition;
mod repair;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use partition::{min_cover, partition_properties};
pub use repair::{refine, repair_path, Repair};

use crate::bmc::{
    check_path, empty_triggers, states_satisfying, BmcConfig, BmcError, PathCheck, Pin, Trace, Unrolling,
};
use crate::model::{eval_bool, replay_from, Env, Expr, Model, Property, ReplayError, TestChain};
use crate::optimizer::{collapse_groups, min_covering_path, optimise, AtspBackend, CoveringPath};
use crate::oracle::{self, OracleError};
use crate::reachgraph::{
    build_prop_kreach_graph, extend_graph, get_covering_path, is_complete, lemma1, Closure, GraphError, ReachGraph,
};
use crate::sat::{Backend, Limits};

#[derive(Debug, Clone)]
pub struct Config {
    pub k_max: usize,
    pub atsp: AtspBackend,
    pub seed: u64,
    pub repair: bool,
    pub refine: bool,
    pub multi_chain: bool,
    /// Give a split vertex's new incoming edge the weight `W(a, b)` instead of `W(a, v)`.
    pub literal_refine_weight: bool,
    pub max_refinements: usize,
    /// Start states tried per repair.
    pub repair_witnesses: usize,
    /// Enumerate missing edges up to the length of the chosen path before
    /// trusting its minimality.
    pub complete_graph: bool,
    /// With `complete_graph`, enumerate at least up to this bound.
    pub min_bound: usize,
    /// Restrict every frame to the states reachable from the initial set
    /// (computed explicitly, so only for small models).
    pub reachable_invariant: bool,
    /// Re-chain an uncertified chain in the order its properties are first
    /// covered, keeping the result when it is shorter.
    pub compact: bool,
    pub backend: Backend,
    pub timeout: Option<Duration>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            k_max: 50,
            atsp: AtspBackend::Auto,
            seed: 0,
            repair: true,
            refine: true,
            multi_chain: true,
            literal_refine_weight: false,
            max_refinements: 32,
            repair_witnesses: 3,
            complete_graph: true,
            min_bound: 0,
            reachable_invariant: false,
            compact: true,
            backend: Backend::Embedded,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// One chain, exactly optimal over a complete graph with singleton triggers.
    MinimalCertified,
    /// One chain, no optimality claim.
    Minimised,
    MultiChain,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::MinimalCertified => "minimal-certified",
            Status::Minimised => "minimised",
            Status::MultiChain => "multi-chain",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub k_reached: usize,
    pub solver_calls: u64,
    pub repair_increments: usize,
    pub refinement_splits: usize,
    pub infeasible_paths: usize,
    /// Steps removed by compaction.
    pub compacted_steps: usize,
}

/// One concrete chain and the abstract path it came from.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub chain: TestChain,
    pub path: Vec<String>,
    pub weights: Vec<usize>,
    /// Properties this chain is responsible for.
    pub properties: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub reports: Vec<ChainReport>,
    pub status: Status,
    pub stats: Stats,
    pub graph: ReachGraph,
    pub warnings: Vec<String>,
}

impl ChainResult {
    pub fn chains(&self) -> impl Iterator<Item = &TestChain> {
        self.reports.iter().map(|r| &r.chain)
    }

    pub fn total_len(&self) -> usize {
        self.reports.iter().map(|r| r.chain.len()).sum()
    }
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("no chain found for given bound K = {bound}{diagnosis}")]
    NoChainAtBound { bound: usize, diagnosis: String },
    #[error("no single chain covers all properties{diagnosis}")]
    NoSingleChain { diagnosis: String },
    #[error("property `{vertex}` cannot be chained: {reason}")]
    Unchainable { vertex: String, reason: String },
    #[error("property `{property}` is violated at step {step}")]
    Violation { property: String, step: usize, trace: Trace },
    #[error("{which} state set is empty")]
    EmptySet { which: &'static str },
    #[error("time limit reached")]
    Timeout,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<BmcError> for EngineError {
    fn from(_: BmcError) -> Self {
        EngineError::Timeout
    }
}

/// Why the single-chain attempt stopped without a chain.
enum Failure {
    Fatal(EngineError),
    NoSingle(ReachGraph),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Fatal(e)
    }
}

impl From<BmcError> for Failure {
    fn from(e: BmcError) -> Self {
        Failure::Fatal(e.into())
    }
}

struct Single {
    report: ChainReport,
    certified: bool,
    graph: ReachGraph,
}

struct Ctx<'a> {
    cfg: &'a Config,
    props: &'a [Property],
    fin: &'a Expr,
}

/// Generates test chains covering `props`, starting in `init` and ending in `fin`.
pub fn generate_chain(
    model: &Model,
    props: &[Property],
    init: &Expr,
    fin: &Expr,
    cfg: &Config,
) -> Result<ChainResult, EngineError> {
    let started = Instant::now();
    let extra_invariant = if cfg.reachable_invariant {
        Some(oracle::reachable_set_predicate(model, init, oracle::DEFAULT_NODE_LIMIT)?)
    } else {
        None
    };
    let bmc = BmcConfig {
        backend: cfg.backend.clone(),
        limits: Limits { conflicts: None, deadline: cfg.timeout.map(|t| started + t) },
        extra_invariant,
        ..BmcConfig::default()
    };
    let mut u = Unrolling::new(model, bmc);
    let mut warnings = vec![];
    for name in empty_triggers(&mut u, props)? {
        warnings.push(format!("trigger of `{name}` is empty; the property is vacuous"));
    }
    if states_satisfying(&mut u, init, 1)?.is_empty() {
        return Err(EngineError::EmptySet { which: "initial" });
    }
    if states_satisfying(&mut u, fin, 1)?.is_empty() {
        return Err(EngineError::EmptySet { which: "final" });
    }

    let cx = Ctx { cfg, props, fin };
    let mut stats = Stats::default();
    let g0 = ReachGraph::for_properties(props, init, fin);
    let built = build_prop_kreach_graph(&mut u, g0, cfg.k_max);
    let result = match built {
        Ok(g) => {
            stats.k_reached = g.bound;
            match single_chain(&mut u, &cx, g, &mut stats) {
                Ok(s) => {
                    let status = if s.certified { Status::MinimalCertified } else { Status::Minimised };
                    Ok((vec![s.report], status, Some(s.graph)))
                }
                Err(Failure::Fatal(e)) => Err(e),
                Err(Failure::NoSingle(g)) if cfg.multi_chain => multi_chain(&mut u, &cx, g, &mut stats),
                Err(Failure::NoSingle(g)) => Err(EngineError::NoSingleChain { diagnosis: diagnose(&g) }),
            }
        }
        Err(GraphError::Bmc(e)) => Err(e.into()),
        Err(GraphError::NoSingleChain { graph }) => {
            stats.k_reached = graph.bound;
            if cfg.multi_chain {
                multi_chain(&mut u, &cx, *graph, &mut stats)
            } else {
                Err(EngineError::NoSingleChain { diagnosis: diagnose(&graph) })
            }
        }
        Err(GraphError::NoChainAtBound { bound, graph }) => {
            stats.k_reached = graph.bound;
            let c = Closure::of_edges(graph.len(), graph.edges());
            let r = lemma1(&graph, &c);
            let ordered_only = r.unreachable.is_empty() && r.dead_ends.iter().all(|&v| v == ReachGraph::INIT);
            if cfg.multi_chain && ordered_only && !graph.property_groups().is_empty() {
                multi_chain(&mut u, &cx, *graph, &mut stats)
            } else {
                Err(EngineError::NoChainAtBound { bound, diagnosis: diagnose(&graph) })
            }
        }
    };
    let (reports, status, graph) = result?;
    stats.solver_calls = u.calls();
    let graph = graph.unwrap_or_else(|| ReachGraph::for_properties(props, init, fin));
    Ok(ChainResult { reports, status, stats, graph, warnings })
}

type Multi = (Vec<ChainReport>, Status, Option<ReachGraph>);

fn multi_chain(u: &mut Unrolling<'_>, cx: &Ctx<'_>, g: ReachGraph, stats: &mut Stats) -> Result<Multi, EngineError> {
    let mut work: Vec<(ReachGraph, usize)> =
        partition_properties(&g)?.into_iter().map(|c| (g.require_only(&c), 0)).collect();
    let mut reports = vec![];
    while let Some((gc, depth)) = work.pop() {
        match single_chain(u, cx, gc, stats) {
            Ok(s) => reports.push(s.report),
            Err(Failure::Fatal(e)) => return Err(e),
            Err(Failure::NoSingle(refined)) => {
                let classes = partition_properties(&refined)?;
                if classes.len() < 2 || depth >= 8 {
                    return Err(EngineError::NoSingleChain { diagnosis: diagnose(&refined) });
                }
                work.extend(classes.into_iter().map(|c| (refined.require_only(&c), depth + 1)));
            }
        }
    }
    reports.sort_by(|a, b| a.properties.cmp(&b.properties));
    let status = if reports.len() > 1 { Status::MultiChain } else { Status::Minimised };
    Ok((reports, status, Some(g)))
}

fn diagnose(g: &ReachGraph) -> String {
    let c = Closure::of_edges(g.len(), g.edges());
    let r = lemma1(g, &c);
    let names = |vs: &mut dyn Iterator<Item = usize>| vs.map(|v| g.name(v)).collect::<Vec<_>>().join(", ");
    let mut parts = vec![];
    if !r.unreachable.is_empty() {
        parts.push(format!("unreachable from initial states: {}", names(&mut r.unreachable.iter().copied())));
    }
    let dead: Vec<usize> = r.dead_ends.iter().copied().filter(|&v| v != ReachGraph::INIT).collect();
    if !dead.is_empty() {
        parts.push(format!("cannot reach final states: {}", names(&mut dead.into_iter())));
    }
    if !r.incomparable.is_empty() {
        let pairs: Vec<String> = r.incomparable.iter().map(|&(a, b)| format!("{}/{}", g.name(a), g.name(b))).collect();
        parts.push(format!("mutually unreachable: {}", pairs.join(", ")));
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!(" ({})", parts.join("; "))
    }
}

enum Concrete {
    Chain(Trace, Vec<usize>, bool),
    /// Path positions of the vertex triple to refine.
    Stuck(Option<(usize, usize, usize)>),
}

fn single_chain(u: &mut Unrolling<'_>, cx: &Ctx<'_>, mut g: ReachGraph, stats: &mut Stats) -> Result<Single, Failure> {
    let cfg = cx.cfg;
    let Some(mut path) = min_covering_path(&g, cfg.atsp, cfg.seed) else {
        return Err(Failure::NoSingle(g));
    };
    if cfg.complete_graph {
        loop {
            let upto = path.total().max(cfg.min_bound).min(cfg.k_max);
            if g.bound >= upto || is_complete(&g) {
                break;
            }
            extend_graph(u, &mut g, upto)?;
            stats.k_reached = stats.k_reached.max(g.bound);
            path = min_covering_path(&g, cfg.atsp, cfg.seed).expect("more edges keep a covering path");
        }
    }
    let complete = is_complete(&g) || g.bound >= path.total();
    let mut refined = false;
    loop {
        match concretise(u, cx, &g, &path, stats)? {
            Concrete::Chain(trace, weights, repaired) => {
                let certified = !refined
                    && !repaired
                    && complete
                    && path.exact
                    && path.optimality_preserved
                    && distinct(&path.vertices)
                    && singleton_triggers(u, &g, &path.vertices)?;
                let (mut vertices, mut weights, mut trace) = (path.vertices.clone(), weights, trace);
                if cfg.compact && !certified {
                    while let Some((v, w, t)) = compact(u, cx, &g, &trace)? {
                        stats.compacted_steps += trace.inputs.len() - t.inputs.len();
                        (vertices, weights, trace) = (v, w, t);
                    }
                }
                let report = build_report(u.model(), cx, &g, &vertices, trace, weights)?;
                return Ok(Single { report, certified, graph: g });
            }
            Concrete::Stuck(triple) => {
                let Some((a, v, b)) = triple else {
                    return Err(Failure::NoSingle(g));
                };
                if !cfg.refine || stats.refinement_splits >= cfg.max_refinements {
                    return Err(Failure::NoSingle(g));
                }
                let (va, vv, vb) = (path.vertices[a], path.vertices[v], path.vertices[b]);
                if !g.is_property(vv) {
                    return Err(Failure::NoSingle(g));
                }
                let (next, clone) = refine(&g, va, vv, vb, cfg.literal_refine_weight);
                tracing::debug!(split = %g.name(vv), clone, "refining");
                g = next;
                stats.refinement_splits += 1;
                refined = true;
                let closure = Closure::of_edges(g.len(), g.edges());
                let Some(seed_path) = get_covering_path(&g, &closure) else {
                    return Err(Failure::NoSingle(g));
                };
                let collapsed = collapse_groups(&g, &seed_path);
                path = match optimise(&g, &collapsed, cfg.atsp, cfg.seed) {
                    Some(p) => p,
                    None => closure
                        .expand_path(&seed_path)
                        .and_then(|full| CoveringPath::from_vertices(&g, full))
                        .ok_or_else(|| Failure::Fatal(EngineError::Internal("covering path does not expand".into())))?,
                };
            }
        }
    }
}

fn concretise(
    u: &mut Unrolling<'_>,
    cx: &Ctx<'_>,
    g: &ReachGraph,
    path: &CoveringPath,
    stats: &mut Stats,
) -> Result<Concrete, Failure> {
    let pins: Vec<Pin> = path.vertices.iter().map(|&v| g.pin(v).clone()).collect();
    let last = pins.len() - 1;
    let mut w = path.weights.clone();
    let mut repaired = false;
    let mut whole_done = false;
    loop {
        match check_path(u, &pins, &w)? {
            PathCheck::Feasible(trace) => return Ok(Concrete::Chain(trace, w, repaired)),
            PathCheck::Violation { properties, trace } => {
                let step = violation_step(u.model(), cx.props, &properties, &trace);
                let property = properties.into_iter().next().unwrap_or_default();
                return Err(Failure::Fatal(EngineError::Violation { property, step, trace }));
            }
            PathCheck::Infeasible { start, end } => {
                stats.infeasible_paths += 1;
                if !cx.cfg.repair || whole_done {
                    let mid = (start + 1).min(last);
                    return Ok(Concrete::Stuck((mid + 1 <= last).then_some((mid - 1, mid, mid + 1))));
                }
                let (s, e) = if repaired { (0, last) } else { (start, end) };
                whole_done = s == 0 && e == last;
                match repair_path(u, &pins, &w, s, e, cx.cfg.k_max, cx.cfg.repair_witnesses)? {
                    Repair::Repaired { weights, increments } => {
                        tracing::debug!(start = s, end = e, increments, "repaired");
                        stats.repair_increments += increments;
                        w = weights;
                    }
                    Repair::Failed { triple } => return Ok(Concrete::Stuck(Some(triple))),
                }
                repaired = true;
            }
        }
    }
}

/// One compaction round: orders the property groups of `g` by the step at
/// which `trace` first covers them and chains them again by repair from
/// zero weights. `None` unless the new chain is strictly shorter.
fn compact(
    u: &mut Unrolling<'_>,
    cx: &Ctx<'_>,
    g: &ReachGraph,
    trace: &Trace,
) -> Result<Option<(Vec<usize>, Vec<usize>, Trace)>, EngineError> {
    let groups: Vec<usize> = g.property_groups().into_keys().collect();
    if groups.is_empty() {
        return Ok(None);
    }
    let mut first = Vec::with_capacity(groups.len());
    for &v in &groups {
        let Some(p) = cx.props.iter().find(|p| p.name == g.pin(v).name) else {
            return Ok(None);
        };
        let mut at = None;
        for k in 0..trace.inputs.len() {
            let env = Env::step(&trace.states[k], &trace.inputs[k]);
            if eval_bool(&p.assume, env).map_err(|e| EngineError::Internal(e.to_string()))? {
                at = Some(k);
                break;
            }
        }
        let Some(k) = at else { return Ok(None) };
        first.push((k, v));
    }
    first.sort();
    let mut vertices = vec![ReachGraph::INIT];
    vertices.extend(first.iter().map(|&(_, v)| v));
    vertices.push(g.final_vertex());
    let pins: Vec<Pin> = vertices.iter().map(|&v| g.pin(v).clone()).collect();
    let last = pins.len() - 1;
    // the covering step of the last property lies inside the chain
    let mut zero = vec![0; last];
    zero[last - 1] = 1;
    let weights = match repair_path(u, &pins, &zero, 0, last, cx.cfg.k_max, cx.cfg.repair_witnesses)? {
        Repair::Repaired { weights, .. } if weights.iter().sum::<usize>() < trace.inputs.len() => weights,
        _ => return Ok(None),
    };
    match check_path(u, &pins, &weights)? {
        PathCheck::Feasible(t) if t.inputs.len() < trace.inputs.len() => Ok(Some((vertices, weights, t))),
        _ => Ok(None),
    }
}

fn violation_step(model: &Model, props: &[Property], names: &[String], trace: &Trace) -> usize {
    let chosen: Vec<Property> = props.iter().filter(|p| names.contains(&p.name)).cloned().collect();
    match replay_from(model, &chosen, &Expr::tt(), trace.states[0].clone(), &trace.inputs) {
        Err(ReplayError::Violation { step, .. }) => step,
        _ => trace.inputs.len().saturating_sub(1),
    }
}

fn build_report(
    model: &Model,
    cx: &Ctx<'_>,
    g: &ReachGraph,
    vertices: &[usize],
    trace: Trace,
    weights: Vec<usize>,
) -> Result<ChainReport, EngineError> {
    let owned: BTreeSet<String> = g.property_groups().keys().map(|&v| g.pin(v).name.clone()).collect();
    let (mine, others): (Vec<Property>, Vec<Property>) =
        cx.props.iter().cloned().partition(|p| owned.contains(&p.name));
    let start = trace.states[0].clone();
    let chain = match replay_from(model, &mine, cx.fin, start.clone(), &trace.inputs) {
        Ok(c) => c,
        Err(ReplayError::Violation { property, step }) => return Err(EngineError::Violation { property, step, trace }),
        Err(e) => return Err(EngineError::Internal(format!("chain does not replay: {e}"))),
    };
    if chain.trace != trace.states {
        return Err(EngineError::Internal("replayed states differ from the solver trace".into()));
    }
    if let Err(ReplayError::Violation { property, step }) =
        replay_from(model, &others, &Expr::tt(), start, &trace.inputs)
    {
        return Err(EngineError::Violation { property, step, trace });
    }
    Ok(ChainReport {
        chain,
        path: vertices.iter().map(|&v| g.name(v)).collect(),
        weights,
        properties: owned.into_iter().collect(),
    })
}

fn distinct(vs: &[usize]) -> bool {
    let set: BTreeSet<usize> = vs.iter().copied().collect();
    set.len() == vs.len()
}

fn singleton_triggers(u: &mut Unrolling<'_>, g: &ReachGraph, vs: &[usize]) -> Result<bool, BmcError> {
    for &v in vs {
        if states_satisfying(u, &g.pin(v).trigger, 2)?.len() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;
    use crate::fixtures;
    use crate::model::Value;

    fn cruise(props: &str) -> (Model, Vec<Property>, Expr) {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let props = dsl::parse_properties(&m, props).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        (m, props, init)
    }

    #[test]
    fn cruise_single_chain_of_nine() {
        let (m, props, init) = cruise(fixtures::CRUISE_PROPS);
        let r = generate_chain(&m, &props, &init, &init, &Config::default()).unwrap();
        assert_eq!(r.reports.len(), 1);
        assert_eq!(r.total_len(), 9);
        assert_eq!(r.status, Status::MinimalCertified);
        assert_eq!(r.stats.repair_increments, 0);
        assert_eq!(r.reports[0].chain.covers.len(), 4);
        assert_eq!(r.reports[0].path.first().map(String::as_str), Some("I"));
        assert_eq!(r.reports[0].weights.iter().sum::<usize>(), 9);
    }

    #[test]
    fn broken_spec_repaired_once() {
        let (m, props, init) = cruise(fixtures::CRUISE_BROKEN_PROPS);
        let r = generate_chain(&m, &props, &init, &init, &Config::default()).unwrap();
        assert_eq!(r.total_len(), 4);
        assert_eq!(r.stats.repair_increments, 1);
        assert_eq!(r.status, Status::Minimised);
        let names: Vec<&str> = r.reports[0]
            .chain
            .inputs
            .iter()
            .map(|i| {
                let k = i.0.iter().position(|v| *v == Value::Bool(true)).unwrap();
                m.inputs()[k].name.as_str()
            })
            .collect();
        // gas and acc both engage the controller from standstill
        assert!(matches!(names[..], ["button", "gas" | "acc", "brake", "button"]), "{names:?}");
    }

    #[test]
    fn no_properties_gives_empty_chain() {
        let (m, _, init) = cruise(fixtures::CRUISE_PROPS);
        let r = generate_chain(&m, &[], &init, &init, &Config::default()).unwrap();
        assert_eq!(r.total_len(), 0);
        assert_eq!(r.reports.len(), 1);
    }

    #[test]
    fn empty_final_set_is_reported() {
        let (m, props, init) = cruise(fixtures::CRUISE_PROPS);
        let never = dsl::parse_state_set(&m, "mode == ON && !enable").unwrap();
        assert!(matches!(
            generate_chain(&m, &props, &init, &never, &Config::default()),
            Err(EngineError::EmptySet { which: "final" })
        ));
    }

    #[test]
    fn refinement_off_still_repairs() {
        let (m, props, init) = cruise(fixtures::CRUISE_BROKEN_PROPS);
        let cfg = Config { refine: false, ..Config::default() };
        assert_eq!(generate_chain(&m, &props, &init, &init, &cfg).unwrap().total_len(), 4);
    }

    #[test]
    fn repair_off_falls_back_to_refinement() {
        let (m, props, init) = cruise(fixtures::CRUISE_BROKEN_PROPS);
        let cfg = Config { repair: false, ..Config::default() };
        let r = generate_chain(&m, &props, &init, &init, &cfg).unwrap();
        assert!(r.stats.refinement_splits >= 1);
        assert_eq!(r.reports[0].chain.covers.len(), 2);
    }

    #[test]
    fn compaction_skips_incidentally_covered_vertices() {
        let (m, props, init) = cruise(fixtures::CRUISE2_PROPS);
        let plain = generate_chain(&m, &props, &init, &init, &Config { compact: false, ..Config::default() }).unwrap();
        let r = generate_chain(&m, &props, &init, &init, &Config::default()).unwrap();
        let best = oracle::oracle_min_chain(&m, &props, &init, &init, oracle::DEFAULT_NODE_LIMIT).unwrap().unwrap();
        assert_eq!(r.reports.len(), 1);
        assert!(r.total_len() < plain.total_len(), "{} vs {}", r.total_len(), plain.total_len());
        assert_eq!(r.stats.compacted_steps, plain.total_len() - r.total_len());
        assert!(r.total_len() >= best.len());
        assert_eq!(r.reports[0].chain.covers.len(), props.len());
    }

    const BRANCH: &str = "
model branch {
  state side : {NONE, A, B} init NONE;
  state n : 0..2 init 0;
  input go : {L, R, STEP};
  trans {
    side' = side == NONE && go == L ? A : side == NONE && go == R ? B : side;
    n' = side != NONE && go == STEP && n < 2 ? n + 1 : n;
  }
}
";

    const BRANCH_PROPS: &str = "
        property a1 { assume side == A && n == 0 && go == STEP; assert next(n) == 1; }
        property a2 { assume side == A && n == 1 && go == STEP; assert next(n) == 2; }
        property b1 { assume side == B && n == 0 && go == STEP; assert next(n) == 1; }
        property b2 { assume side == B && n == 1 && go == STEP; assert next(n) == 2; }
    ";

    #[test]
    fn separate_branches_need_two_chains() {
        let m = dsl::parse_model(BRANCH).unwrap();
        let props = dsl::parse_properties(&m, BRANCH_PROPS).unwrap();
        let init = dsl::parse_state_set(&m, "side == NONE && n == 0").unwrap();
        let cfg = Config { k_max: 8, ..Config::default() };
        let r = generate_chain(&m, &props, &init, &Expr::tt(), &cfg).unwrap();
        assert_eq!(r.status, Status::MultiChain);
        assert_eq!(r.reports.len(), 2);
        assert_eq!(r.reports[0].properties, ["a1", "a2"]);
        assert_eq!(r.reports[1].properties, ["b1", "b2"]);
        for rep in &r.reports {
            assert_eq!(rep.chain.len(), 3);
        }
        let single = Config { multi_chain: false, ..cfg };
        let e = generate_chain(&m, &props, &init, &Expr::tt(), &single);
        assert!(matches!(e, Err(EngineError::NoChainAtBound { .. })), "{e:?}");
    }
}
