use std::collections::HashMap;
use std::time::Instant;

use super::{BmcConfig, BmcError};
use crate::model::{Expr, InputVec, Model, Scope, StateVec, VarRef};
use crate::sat::{decode, Assignment, Encoder, Lit, SolveResult, Term};

/// A concrete path: `states.len() == inputs.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<StateVec>,
    pub inputs: Vec<InputVec>,
}

/// Incrementally unrolled transition relation over one solver instance.
///
/// `s_0` is a fresh state constrained by the state invariant; `s_{k+1}` is the
/// encoded successor of `s_k` under the fresh input `i_k`. Every input
/// satisfies the input assumption and every state the invariant. Frames are
/// added on demand and never removed, so queries of different lengths share
/// clauses and differ only in their assumption literals.
pub struct Unrolling<'m> {
    model: &'m Model,
    enc: Encoder,
    invariant: Expr,
    states: Vec<Vec<Term>>,
    inputs: Vec<Vec<Term>>,
    cache: HashMap<(Expr, usize), Lit>,
    config: BmcConfig,
    calls: u64,
}

impl<'m> Unrolling<'m> {
    pub fn new(model: &'m Model, config: BmcConfig) -> Self {
        let enc = Encoder::new(config.backend.create());
        let invariant = match &config.extra_invariant {
            Some(e) => Expr::and(model.state_invariant().clone(), e.clone()),
            None => model.state_invariant().clone(),
        };
        let mut u = Unrolling {
            model,
            enc,
            invariant,
            states: vec![],
            inputs: vec![],
            cache: HashMap::new(),
            config,
            calls: 0,
        };
        let s0: Vec<Term> = model.state_vars().iter().map(|v| u.enc.fresh_var(&v.domain)).collect();
        u.push_state(s0);
        u
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn config(&self) -> &BmcConfig {
        &self.config
    }

    /// Number of solver calls made so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn encoder(&mut self) -> &mut Encoder {
        &mut self.enc
    }

    fn push_state(&mut self, frame: Vec<Term>) {
        let k = self.states.len();
        self.states.push(frame);
        let f = self.states[k].clone();
        let inv = self.enc.encode_bool(&self.invariant, &|v: VarRef| f[v.index].clone());
        self.enc.assert(inv);
    }

    /// Makes sure input frame `k` (and hence state frames `0..=k+1`) exist.
    fn ensure_input(&mut self, k: usize) {
        while self.inputs.len() <= k {
            let j = self.inputs.len();
            let frame: Vec<Term> = self.model.inputs().iter().map(|v| self.enc.fresh_var(&v.domain)).collect();
            let f = frame.clone();
            let ok = self.enc.encode_bool(self.model.input_assumption(), &|v: VarRef| f[v.index].clone());
            self.enc.assert(ok);
            self.inputs.push(frame);
            let (s, i) = (self.states[j].clone(), self.inputs[j].clone());
            let env = |v: VarRef| match v.scope {
                Scope::State => s[v.index].clone(),
                Scope::Input => i[v.index].clone(),
                Scope::Next => panic!("transition reads the next state"),
            };
            let mut next = Vec::with_capacity(s.len());
            for (idx, var) in self.model.state_vars().iter().enumerate() {
                let t = match self.model.transition(idx) {
                    Some(e) => {
                        let raw = self.enc.encode(e, &env);
                        self.enc.store(&var.domain, raw)
                    }
                    None => s[idx].clone(),
                };
                next.push(t);
            }
            self.push_state(next);
        }
    }

    fn ensure_state(&mut self, k: usize) {
        if k > 0 {
            self.ensure_input(k - 1);
        }
    }

    /// Literal for `expr` evaluated at step `k` (state `s_k`, input `i_k`,
    /// next state `s_{k+1}`).
    pub fn at(&mut self, expr: &Expr, k: usize) -> Lit {
        if let Some(&l) = self.cache.get(&(expr.clone(), k)) {
            return l;
        }
        if expr.mentions(Scope::Input) || expr.mentions(Scope::Next) {
            self.ensure_input(k);
        } else {
            self.ensure_state(k);
        }
        let s = self.states[k].clone();
        let i = self.inputs.get(k).cloned().unwrap_or_default();
        let n = self.states.get(k + 1).cloned().unwrap_or_default();
        let env = |v: VarRef| match v.scope {
            Scope::State => s[v.index].clone(),
            Scope::Input => i[v.index].clone(),
            Scope::Next => n[v.index].clone(),
        };
        let l = self.enc.encode_bool(expr, &env);
        self.cache.insert((expr.clone(), k), l);
        l
    }

    /// Literal for `s_k == state`.
    pub fn state_is(&mut self, k: usize, state: &StateVec) -> Lit {
        self.ensure_state(k);
        let frame = self.states[k].clone();
        let lits: Vec<Lit> = frame.iter().zip(&state.0).map(|(t, v)| self.enc.term_is(t, *v)).collect();
        self.enc.and_all(&lits)
    }

    pub fn fresh(&mut self) -> Lit {
        self.enc.fresh()
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.enc.add_clause(lits);
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, BmcError> {
        self.calls += 1;
        let limits = self.config.limits;
        if limits.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(BmcError::Aborted);
        }
        self.enc.solver().set_limits(limits);
        match self.enc.solve(assumptions) {
            SolveResult::Unknown => Err(BmcError::Aborted),
            r => Ok(r),
        }
    }

    /// Shrinks a core by deletion; literals are tried in the given order.
    pub fn minimize_core(&mut self, core: &[Lit], max_calls: usize) -> Vec<Lit> {
        self.calls += max_calls.min(core.len()) as u64;
        crate::sat::minimize_core(self.enc.solver(), core, max_calls)
    }

    pub fn decode_state(&self, m: &Assignment, k: usize) -> StateVec {
        StateVec(self.states[k].iter().map(|t| decode(t, m)).collect())
    }

    pub fn decode_input(&self, m: &Assignment, k: usize) -> InputVec {
        InputVec(self.inputs[k].iter().map(|t| decode(t, m)).collect())
    }

    /// Decodes states `0..=len` and inputs `0..len`.
    pub fn trace(&mut self, m: &Assignment, len: usize) -> Trace {
        self.ensure_state(len);
        Trace {
            states: (0..=len).map(|k| self.decode_state(m, k)).collect(),
            inputs: (0..len).map(|k| self.decode_input(m, k)).collect(),
        }
    }
}
