//! Explicit-state ground truth for small models: the state graph, shortest
//! covering chains by breadth-first search over (state, covered set) pairs,
//! seeded random models, and a random-testing baseline.

mod baseline;
mod random;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

pub use baseline::{random_baseline, Baseline};
pub use random::{random_model, RandomModel, RandomParams};

use crate::model::{eval_bool, Env, Expr, InputVec, Model, ModelError, Property, StateVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} has {size} nodes, over the limit of {limit}")]
    TooLarge { what: &'static str, size: u64, limit: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub const DEFAULT_NODE_LIMIT: u64 = 1_000_000;

/// The concrete transition graph over states that satisfy the invariant.
/// Transitions into states violating the invariant are dropped, like in the
/// symbolic unrolling.
#[derive(Debug, Clone)]
pub struct StateGraph {
    pub states: Vec<StateVec>,
    pub inputs: Vec<InputVec>,
    index: HashMap<StateVec, usize>,
    /// `succ[s][i]`: successor of state `s` under allowed input `i`.
    succ: Vec<Vec<Option<usize>>>,
}

impl StateGraph {
    pub fn build(model: &Model, limit: u64) -> Result<StateGraph, OracleError> {
        let size = model.state_space_size().saturating_mul(model.input_space_size());
        if size > limit {
            return Err(OracleError::TooLarge { what: "state graph", size, limit });
        }
        let mut states = vec![];
        for s in model.all_states() {
            if model.invariant_holds(&s)? {
                states.push(s);
            }
        }
        let mut inputs = vec![];
        for i in model.all_inputs() {
            if model.input_allowed(&i)? {
                inputs.push(i);
            }
        }
        let index: HashMap<StateVec, usize> = states.iter().cloned().enumerate().map(|(n, s)| (s, n)).collect();
        let mut succ = Vec::with_capacity(states.len());
        for s in &states {
            let mut row = Vec::with_capacity(inputs.len());
            for i in &inputs {
                let next = model.successor(s, i)?;
                row.push(index.get(&next).copied());
            }
            succ.push(row);
        }
        Ok(StateGraph { states, inputs, index, succ })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &StateVec) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn successor(&self, s: usize, i: usize) -> Option<usize> {
        self.succ[s][i]
    }

    /// States satisfying a state predicate.
    pub fn states_where(&self, pred: &Expr) -> Result<Vec<usize>, OracleError> {
        let mut out = vec![];
        for (n, s) in self.states.iter().enumerate() {
            if eval_bool(pred, Env::state(s))? {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// Shortest distances from a set of sources; `None` when unreachable.
    pub fn distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            let d = dist[s].unwrap();
            for t in self.succ[s].iter().flatten() {
                if dist[*t].is_none() {
                    dist[*t] = Some(d + 1);
                    queue.push_back(*t);
                }
            }
        }
        dist
    }

    pub fn reachable(&self, sources: &[usize]) -> Vec<usize> {
        self.distances(sources).iter().enumerate().filter(|(_, d)| d.is_some()).map(|(n, _)| n).collect()
    }

    /// Largest finite shortest-path distance between any two states.
    pub fn diameter(&self) -> usize {
        (0..self.len()).map(|s| self.distances(&[s]).into_iter().flatten().max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Every state reaches every other.
    pub fn strongly_connected(&self) -> bool {
        !self.is_empty() && (0..self.len()).all(|s| self.distances(&[s]).iter().all(Option::is_some))
    }

    /// Bitmask of the properties covered by taking input `i` in state `s`:
    /// the assumption holds and so does the assertion on the successor.
    pub fn cover_mask(&self, props: &[Property], s: usize, i: usize) -> Result<u64, OracleError> {
        let Some(t) = self.succ[s][i] else {
            return Ok(0);
        };
        let (sv, iv, tv) = (&self.states[s], &self.inputs[i], &self.states[t]);
        let mut mask = 0;
        for (b, p) in props.iter().enumerate() {
            if eval_bool(&p.assume, Env::step(sv, iv))? && eval_bool(&p.assert, Env::full(sv, iv, tv))? {
                mask |= 1 << b;
            }
        }
        Ok(mask)
    }
}

/// A shortest covering chain found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleChain {
    pub start: StateVec,
    pub inputs: Vec<InputVec>,
}

impl OracleChain {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Breadth-first search over (state, covered properties) from every initial
/// state to any final state with all properties covered.
pub fn oracle_min_chain(
    model: &Model,
    props: &[Property],
    init: &Expr,
    fin: &Expr,
    node_limit: u64,
) -> Result<Option<OracleChain>, OracleError> {
    if props.len() > 40 {
        return Err(OracleError::TooLarge { what: "property set", size: props.len() as u64, limit: 40 });
    }
    let g = StateGraph::build(model, node_limit)?;
    let nodes = (g.len() as u64).saturating_mul(1u64 << props.len());
    if nodes > node_limit {
        return Err(OracleError::TooLarge { what: "product graph", size: nodes, limit: node_limit });
    }
    oracle_on_graph(&g, props, init, fin)
}

pub fn oracle_on_graph(
    g: &StateGraph,
    props: &[Property],
    init: &Expr,
    fin: &Expr,
) -> Result<Option<OracleChain>, OracleError> {
    let full: u64 = (1u64 << props.len()) - 1;
    let mut masks = vec![vec![0u64; g.inputs.len()]; g.len()];
    for (s, row) in masks.iter_mut().enumerate() {
        for (i, m) in row.iter_mut().enumerate() {
            *m = g.cover_mask(props, s, i)?;
        }
    }
    let is_final: Vec<bool> = {
        let f = g.states_where(fin)?;
        let mut v = vec![false; g.len()];
        for s in f {
            v[s] = true;
        }
        v
    };
    let width = 1usize << props.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.len() * width];
    let mut seen = vec![false; g.len() * width];
    let mut queue = VecDeque::new();
    for s in g.states_where(init)? {
        seen[s * width] = true;
        queue.push_back((s, 0u64));
    }
    while let Some((s, m)) = queue.pop_front() {
        if m == full && is_final[s] {
            let mut inputs = vec![];
            let mut node = s * width + m as usize;
            while let Some((prev, i)) = parent[node] {
                inputs.push(g.inputs[i].clone());
                node = prev;
            }
            inputs.reverse();
            return Ok(Some(OracleChain { start: g.states[node / width].clone(), inputs }));
        }
        for i in 0..g.inputs.len() {
            let Some(t) = g.successor(s, i) else { continue };
            let nm = m | masks[s][i];
            let node = t * width + nm as usize;
            if !seen[node] {
                seen[node] = true;
                parent[node] = Some((s * width + m as usize, i));
                queue.push_back((t, nm));
            }
        }
    }
    Ok(None)
}

/// Predicate satisfied exactly by the states reachable from `init`.
pub fn reachable_set_predicate(model: &Model, init: &Expr, limit: u64) -> Result<Expr, OracleError> {
    let g = StateGraph::build(model, limit)?;
    let reach = g.reachable(&g.states_where(init)?);
    Ok(Expr::any(reach.into_iter().map(|s| model.state_equals(&g.states[s]))))
}
