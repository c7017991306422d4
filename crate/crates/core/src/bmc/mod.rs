//! Bounded model checking queries over an incremental unrolling: plain
//! reachability, enumeration of K-reach edges between trigger sets, and
//! concretisation of a weighted vertex path into one input sequence.

mod unroll;

use std::collections::BTreeSet;

use thiserror::Error;

pub use unroll::{Trace, Unrolling};

use crate::model::{Expr, Property, StateVec};
use crate::sat::{Backend, Limits, Lit, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BmcError {
    #[error("solver gave up before reaching a verdict")]
    Aborted,
}

#[derive(Debug, Clone)]
pub struct BmcConfig {
    pub backend: Backend,
    pub limits: Limits,
    /// Conjoined with the model's state invariant at every frame, e.g. an
    /// exact reachable-set predicate.
    pub extra_invariant: Option<Expr>,
    /// Upper bound on solver calls spent shrinking one core.
    pub core_budget: usize,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig { backend: Backend::Embedded, limits: Limits::default(), extra_invariant: None, core_budget: 64 }
    }
}

/// A graph vertex as seen by the unrolling: a trigger over `(s, i)` and, for
/// properties, the assertion that must hold on the covering step.
#[derive(Debug, Clone, PartialEq)]
pub struct Pin {
    pub name: String,
    pub trigger: Expr,
    pub check: Option<Expr>,
}

impl Pin {
    /// A plain state set such as the initial or final states.
    pub fn states(name: impl Into<String>, pred: Expr) -> Pin {
        Pin { name: name.into(), trigger: pred, check: None }
    }

    pub fn property(p: &Property) -> Pin {
        Pin { name: p.name.clone(), trigger: p.assume.clone(), check: Some(p.assert.clone()) }
    }

    pub fn is_property(&self) -> bool {
        self.check.is_some()
    }
}

/// Literal for `pin` at step `k`, optionally including its assertion.
pub fn pin_at(u: &mut Unrolling<'_>, pin: &Pin, k: usize, with_check: bool) -> Lit {
    let t = u.at(&pin.trigger, k);
    match (&pin.check, with_check) {
        (Some(c), true) => {
            let c = u.at(c, k);
            u.encoder().and2(t, c)
        }
        _ => t,
    }
}

/// Is there a path of exactly `k` steps from a state in `from` to one in
/// `to`? Either predicate may read the input at its own step.
pub fn reach_check(u: &mut Unrolling<'_>, from: &Expr, to: &Expr, k: usize) -> Result<Option<Trace>, BmcError> {
    let a = u.at(from, 0);
    let b = u.at(to, k);
    match u.solve(&[a, b])? {
        SolveResult::Sat(m) => Ok(Some(u.trace(&m, k))),
        _ => Ok(None),
    }
}

/// Returns every pair in `candidates` that is connected by a path of exactly
/// `k` steps: some state satisfies the source pin at step 0 and the target
/// pin at step `k`. Assertions of both pins are included. Each satisfying
/// model may discharge several pairs at once.
pub fn kreach_edges(
    u: &mut Unrolling<'_>,
    pins: &[Pin],
    candidates: &BTreeSet<(usize, usize)>,
    k: usize,
) -> Result<Vec<(usize, usize)>, BmcError> {
    let mut open: Vec<((usize, usize), Lit)> = Vec::with_capacity(candidates.len());
    for &(a, b) in candidates {
        let src = pin_at(u, &pins[a], 0, true);
        let tgt = pin_at(u, &pins[b], k, true);
        let both = u.encoder().and2(src, tgt);
        open.push(((a, b), both));
    }
    let mut found = vec![];
    while !open.is_empty() {
        let act = u.fresh();
        let mut clause = vec![!act];
        clause.extend(open.iter().map(|(_, l)| *l));
        u.add_clause(&clause);
        let res = u.solve(&[act]);
        // retire the round's clause whatever the outcome
        u.add_clause(&[!act]);
        match res? {
            SolveResult::Sat(m) => {
                open.retain(|(e, l)| {
                    if m.value(*l) {
                        found.push(*e);
                        false
                    } else {
                        true
                    }
                });
            }
            _ => break,
        }
    }
    found.sort_unstable();
    Ok(found)
}

/// Outcome of concretising a vertex path.
#[derive(Debug, Clone, PartialEq)]
pub enum PathCheck {
    /// One trace through all pins at their offsets.
    Feasible(Trace),
    /// Vertices `start..=end` of the path cannot be realised with their
    /// weights, even when the first of them is placed at step 0.
    Infeasible { start: usize, end: usize },
    /// The triggers can be realised but some assertion fails on every such
    /// trace; `trace` is a witness of the failure.
    Violation { properties: Vec<String>, trace: Trace },
}

/// Step at which each vertex of the path is pinned.
pub fn offsets(weights: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0;
    out.push(0);
    for w in weights {
        acc += w;
        out.push(acc);
    }
    out
}

enum Query {
    Sat(Trace),
    /// Path positions whose pins form an unsatisfiable core.
    Unsat(Vec<usize>),
}

fn query_path(
    u: &mut Unrolling<'_>,
    path: &[Pin],
    weights: &[usize],
    with_checks: &[bool],
) -> Result<(Query, Vec<Lit>), BmcError> {
    let offs = offsets(weights);
    let mut tags = Vec::with_capacity(path.len());
    for (j, pin) in path.iter().enumerate() {
        let l = pin_at(u, pin, offs[j], with_checks[j]);
        let tag = u.fresh();
        u.add_clause(&[!tag, l]);
        tags.push(tag);
    }
    let q = match u.solve(&tags)? {
        SolveResult::Sat(m) => Query::Sat(u.trace(&m, *offs.last().unwrap())),
        SolveResult::Unsat(core) => {
            // try to drop right-most tags first so the left-most region survives
            let mut ordered: Vec<Lit> = tags.iter().rev().copied().filter(|t| core.contains(t)).collect();
            let budget = u.config().core_budget;
            ordered = u.minimize_core(&ordered, budget);
            let mut pos: Vec<usize> = ordered.iter().filter_map(|t| tags.iter().position(|x| x == t)).collect();
            pos.sort_unstable();
            Query::Unsat(pos)
        }
        SolveResult::Unknown => unreachable!(),
    };
    Ok((q, tags))
}

/// Concretises `path` with `weights[j]` steps between vertex `j` and `j+1`.
///
/// On failure the reported window is contiguous, has at least three
/// vertices when the path does, and stays infeasible when shifted to start
/// at step 0.
pub fn check_path(u: &mut Unrolling<'_>, path: &[Pin], weights: &[usize]) -> Result<PathCheck, BmcError> {
    assert_eq!(weights.len() + 1, path.len(), "one weight per edge");
    let all: Vec<bool> = path.iter().map(Pin::is_property).collect();
    if let (Query::Sat(t), _) = query_path(u, path, weights, &all)? {
        return Ok(PathCheck::Feasible(t));
    }
    let none = vec![false; path.len()];
    let core = match query_path(u, path, weights, &none)?.0 {
        Query::Sat(trace) => return violation(u, path, weights, trace),
        Query::Unsat(core) => core,
    };
    let (mut start, mut end) = match (core.first(), core.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0, path.len() - 1),
    };
    while end - start + 1 < 3.min(path.len()) {
        if start > 0 {
            start -= 1;
        } else {
            end += 1;
        }
    }
    // Frames after step 0 only hold states with enough predecessors, so a
    // window can be infeasible in place yet feasible from step 0. Widen left.
    while start > 0 {
        let sub = &path[start..=end];
        let (q, _) = query_path(u, sub, &weights[start..end], &none[start..=end])?;
        match q {
            Query::Unsat(_) => break,
            Query::Sat(_) => start -= 1,
        }
    }
    Ok(PathCheck::Infeasible { start, end })
}

fn violation(u: &mut Unrolling<'_>, path: &[Pin], weights: &[usize], trace: Trace) -> Result<PathCheck, BmcError> {
    let mut checks = vec![false; path.len()];
    for j in 0..path.len() {
        if !path[j].is_property() {
            continue;
        }
        checks[j] = true;
        let (q, _) = query_path(u, path, weights, &checks)?;
        checks[j] = false;
        if let Query::Unsat(_) = q {
            return Ok(PathCheck::Violation { properties: vec![path[j].name.clone()], trace });
        }
    }
    let properties = path.iter().filter(|p| p.is_property()).map(|p| p.name.clone()).collect();
    Ok(PathCheck::Violation { properties, trace })
}

/// Up to `limit` distinct states at step 0 that satisfy `pred` for some
/// admissible input.
pub fn states_satisfying(u: &mut Unrolling<'_>, pred: &Expr, limit: usize) -> Result<Vec<StateVec>, BmcError> {
    let p = u.at(pred, 0);
    let act = u.fresh();
    let mut out = vec![];
    while out.len() < limit {
        match u.solve(&[p, act])? {
            SolveResult::Sat(m) => {
                let s = u.decode_state(&m, 0);
                let same = u.state_is(0, &s);
                u.add_clause(&[!act, !same]);
                out.push(s);
            }
            _ => break,
        }
    }
    u.add_clause(&[!act]);
    Ok(out)
}

/// Properties whose trigger is empty under the invariant and input
/// assumption; they can never be covered.
pub fn empty_triggers(u: &mut Unrolling<'_>, props: &[Property]) -> Result<Vec<String>, BmcError> {
    let mut out = vec![];
    for p in props {
        if states_satisfying(u, &p.assume, 1)?.is_empty() {
            out.push(p.name.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;
    use crate::fixtures;
    use crate::model::{replay_from, Model, Scope};

    fn setup() -> (Model, Vec<Property>, Expr) {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let props = dsl::parse_properties(&m, fixtures::CRUISE_PROPS).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        (m, props, init)
    }

    fn pins(props: &[Property], init: &Expr) -> Vec<Pin> {
        let mut v = vec![Pin::states("I", init.clone())];
        v.extend(props.iter().map(Pin::property));
        v.push(Pin::states("F", init.clone()));
        v
    }

    #[test]
    fn passed_deadline_aborts_before_solving() {
        let (m, _, init) = setup();
        let limits = Limits { conflicts: None, deadline: Some(std::time::Instant::now()) };
        let mut u = Unrolling::new(&m, BmcConfig { limits, ..BmcConfig::default() });
        assert!(matches!(states_satisfying(&mut u, &init, 1), Err(BmcError::Aborted)));
    }

    #[test]
    fn reach_check_from_initial_state() {
        let (m, props, init) = setup();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let p4 = &props[3].assume;
        let p1 = &props[0].assume;
        let t = reach_check(&mut u, &init, p4, 2).unwrap().expect("p4 reachable in 2");
        assert_eq!(t.states.len(), 3);
        assert!(reach_check(&mut u, &init, p1, 1).unwrap().is_none());
        assert!(reach_check(&mut u, &init, p1, 0).unwrap().is_none());
        assert!(!p4.mentions(Scope::Next));
    }

    #[test]
    fn one_step_edges_between_properties() {
        let (m, props, init) = setup();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let pins = pins(&props, &init);
        let cands: BTreeSet<_> = (1..=4).flat_map(|a| (1..=4).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
        let edges = kreach_edges(&mut u, &pins, &cands, 1).unwrap();
        assert_eq!(edges, vec![(1, 3), (2, 1), (2, 3)]);
    }

    #[test]
    fn published_path_is_feasible() {
        let (m, props, init) = setup();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let all = pins(&props, &init);
        let path: Vec<Pin> = [0, 4, 1, 2, 3, 5].iter().map(|&i| all[i].clone()).collect();
        let weights = [2, 2, 2, 1, 2];
        let PathCheck::Feasible(t) = check_path(&mut u, &path, &weights).unwrap() else {
            panic!("path should be feasible");
        };
        assert_eq!(t.inputs.len(), 9);
        let chain = replay_from(&m, &props, &init, t.states[0].clone(), &t.inputs).unwrap();
        assert_eq!(chain.covers.len(), 4);
    }

    #[test]
    fn broken_example_reports_prefix() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let props = dsl::parse_properties(&m, fixtures::CRUISE_BROKEN_PROPS).unwrap();
        let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let all = pins(&props, &init);
        let mut w = vec![];
        for (a, b) in [(0usize, 1usize), (1, 2), (2, 3)] {
            let c: BTreeSet<_> = [(a, b)].into_iter().collect();
            let lo = if b == 3 { 1 } else { 0 };
            let k = (lo..=4).find(|&k| !kreach_edges(&mut u, &all, &c, k).unwrap().is_empty()).unwrap();
            w.push(k);
        }
        assert_eq!(w, vec![0, 1, 2]);
        match check_path(&mut u, &all, &w).unwrap() {
            PathCheck::Infeasible { start, end } => assert_eq!((start, end), (0, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singleton_and_empty_triggers() {
        let (m, props, init) = setup();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        assert_eq!(states_satisfying(&mut u, &init, 5).unwrap().len(), 1);
        assert!(empty_triggers(&mut u, &props).unwrap().is_empty());
        let never = dsl::parse_properties(&m, "property z { assume mode == ON && !enable; assert true; }").unwrap();
        assert_eq!(empty_triggers(&mut u, &never).unwrap(), vec!["z".to_string()]);
    }

    #[test]
    fn violated_assertion_is_reported() {
        let (m, _, init) = setup();
        let bad =
            dsl::parse_properties(&m, "property v { assume mode == OFF && button; assert next(mode) == ON; }").unwrap();
        let mut u = Unrolling::new(&m, BmcConfig::default());
        let path = vec![Pin::states("I", init), Pin::property(&bad[0]), Pin::states("F", Expr::tt())];
        match check_path(&mut u, &path, &[0, 1]).unwrap() {
            PathCheck::Violation { properties, trace } => {
                assert_eq!(properties, vec!["v".to_string()]);
                assert_eq!(trace.inputs.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
