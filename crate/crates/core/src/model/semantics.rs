use std::collections::BTreeMap;
use std::fmt;

use super::domain::{Domain, Value};
use super::expr::{BinOp, Expr, Scope};
use super::model::{InputVec, Model, Property, StateVec};
use super::ModelError;

/// Evaluation environment: current state, input and optional next state.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub state: &'a StateVec,
    pub input: Option<&'a InputVec>,
    pub next: Option<&'a StateVec>,
}

impl<'a> Env<'a> {
    pub fn state(state: &'a StateVec) -> Self {
        Env { state, input: None, next: None }
    }

    pub fn step(state: &'a StateVec, input: &'a InputVec) -> Self {
        Env { state, input: Some(input), next: None }
    }

    pub fn full(state: &'a StateVec, input: &'a InputVec, next: &'a StateVec) -> Self {
        Env { state, input: Some(input), next: Some(next) }
    }
}

/// Evaluates an expression. Integer arithmetic is exact.
pub fn eval(expr: &Expr, env: Env<'_>) -> Result<Value, ModelError> {
    Ok(match expr {
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Int(i) => Value::Int(*i),
        Expr::Sym(_, s) => Value::Sym(*s),
        Expr::Var(v) => {
            let frame = match v.scope {
                Scope::State => Some(env.state.0.as_slice()),
                Scope::Input => env.input.map(|i| i.0.as_slice()),
                Scope::Next => env.next.map(|n| n.0.as_slice()),
            };
            let frame = frame.ok_or_else(|| ModelError::Semantic(format!("no {:?} frame supplied", v.scope)))?;
            *frame.get(v.index).ok_or_else(|| ModelError::Semantic(format!("variable #{} out of range", v.index)))?
        }
        Expr::Not(a) => Value::Bool(!eval_bool(a, env)?),
        Expr::Binary(op, a, b) => match op {
            BinOp::And => Value::Bool(eval_bool(a, env)? && eval_bool(b, env)?),
            BinOp::Or => Value::Bool(eval_bool(a, env)? || eval_bool(b, env)?),
            BinOp::Implies => Value::Bool(!eval_bool(a, env)? || eval_bool(b, env)?),
            BinOp::Eq => Value::Bool(eval(a, env)? == eval(b, env)?),
            BinOp::Ne => Value::Bool(eval(a, env)? != eval(b, env)?),
            BinOp::Lt => Value::Bool(eval_int(a, env)? < eval_int(b, env)?),
            BinOp::Le => Value::Bool(eval_int(a, env)? <= eval_int(b, env)?),
            BinOp::Add => Value::Int(eval_int(a, env)? + eval_int(b, env)?),
            BinOp::Sub => Value::Int(eval_int(a, env)? - eval_int(b, env)?),
        },
        Expr::Ite(c, t, e) => {
            if eval_bool(c, env)? {
                eval(t, env)?
            } else {
                eval(e, env)?
            }
        }
    })
}

pub fn eval_bool(expr: &Expr, env: Env<'_>) -> Result<bool, ModelError> {
    eval(expr, env)?.as_bool().ok_or_else(|| ModelError::Semantic("expected a boolean value".into()))
}

fn eval_int(expr: &Expr, env: Env<'_>) -> Result<i64, ModelError> {
    eval(expr, env)?.as_int().ok_or_else(|| ModelError::Semantic("expected an integer value".into()))
}

/// Stores a value into a variable of `domain`, saturating integers at the bounds.
pub fn saturate(domain: &Domain, v: Value) -> Value {
    match (domain, v) {
        (Domain::Int { lo, hi }, Value::Int(x)) => Value::Int(x.clamp(*lo, *hi)),
        _ => v,
    }
}

impl Model {
    pub fn check_state(&self, s: &StateVec) -> Result<(), ModelError> {
        if s.0.len() != self.state_vars().len()
            || !self.state_vars().iter().zip(&s.0).all(|(v, x)| v.domain.contains(*x))
        {
            return Err(ModelError::Semantic(format!("malformed state vector {s}")));
        }
        Ok(())
    }

    pub fn check_input(&self, i: &InputVec) -> Result<(), ModelError> {
        if i.0.len() != self.inputs().len() || !self.inputs().iter().zip(&i.0).all(|(v, x)| v.domain.contains(*x)) {
            return Err(ModelError::Semantic("malformed input vector".into()));
        }
        Ok(())
    }

    pub fn input_allowed(&self, i: &InputVec) -> Result<bool, ModelError> {
        let dummy = StateVec(vec![]);
        eval_bool(self.input_assumption(), Env { state: &dummy, input: Some(i), next: None })
    }

    pub fn invariant_holds(&self, s: &StateVec) -> Result<bool, ModelError> {
        eval_bool(self.state_invariant(), Env::state(s))
    }

    /// Successor of `s` under input `i` (simultaneous assignment; unassigned
    /// variables keep their value).
    pub fn successor(&self, s: &StateVec, i: &InputVec) -> Result<StateVec, ModelError> {
        let env = Env::step(s, i);
        let mut next = Vec::with_capacity(s.0.len());
        for (idx, var) in self.state_vars().iter().enumerate() {
            let v = match self.transition(idx) {
                Some(t) => saturate(&var.domain, eval(t, env)?),
                None => s.0[idx],
            };
            next.push(v);
        }
        Ok(StateVec(next))
    }

    /// One checked step: the input must satisfy the input assumption, the
    /// current state and the successor the state invariant.
    pub fn step(&self, s: &StateVec, i: &InputVec) -> Result<StateVec, ModelError> {
        self.check_state(s)?;
        self.check_input(i)?;
        if !self.input_allowed(i)? {
            return Err(ModelError::InputAssumption);
        }
        if !self.invariant_holds(s)? {
            return Err(ModelError::InvariantViolated(self.format_state(s)));
        }
        let next = self.successor(s, i)?;
        if !self.invariant_holds(&next)? {
            return Err(ModelError::InvariantViolated(self.format_state(&next)));
        }
        Ok(next)
    }
}

/// A single input sequence with its state trace and the step at which each
/// property is covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestChain {
    pub inputs: Vec<InputVec>,
    pub trace: Vec<StateVec>,
    pub covers: BTreeMap<String, usize>,
}

impl TestChain {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn initial_state(&self) -> &StateVec {
        &self.trace[0]
    }

    pub fn final_state(&self) -> &StateVec {
        self.trace.last().expect("trace is never empty")
    }
}

/// Why a replayed input sequence is not a valid test case chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    /// The model has no unique initial state.
    NondeterministicInit,
    /// A step failed (input assumption or invariant).
    Step {
        step: usize,
        error: String,
    },
    /// A property's assertion fails at a step where its assumption holds.
    Violation {
        property: String,
        step: usize,
    },
    Uncovered(Vec<String>),
    FinalNotReached,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::NondeterministicInit => {
                write!(f, "model has no deterministic initial state")
            }
            ReplayError::Step { step, error } => write!(f, "step {step}: {error}"),
            ReplayError::Violation { property, step } => {
                write!(f, "property `{property}` violated at step {step}")
            }
            ReplayError::Uncovered(ps) => write!(f, "uncovered: {{{}}}", ps.join(", ")),
            ReplayError::FinalNotReached => {
                write!(f, "final state predicate does not hold at the end")
            }
        }
    }
}

impl std::error::Error for ReplayError {}

/// Replays `inputs` from the model's deterministic initial state.
pub fn replay(
    model: &Model,
    props: &[Property],
    final_states: &Expr,
    inputs: &[InputVec],
) -> Result<TestChain, ReplayError> {
    let init = model.deterministic_init().ok_or(ReplayError::NondeterministicInit)?;
    replay_from(model, props, final_states, init, inputs)
}

/// Replays `inputs` from `start`, recording the first step at which each
/// property's assumption holds and checking its assertion at every such step.
pub fn replay_from(
    model: &Model,
    props: &[Property],
    final_states: &Expr,
    start: StateVec,
    inputs: &[InputVec],
) -> Result<TestChain, ReplayError> {
    let step_err = |step: usize| move |e: ModelError| ReplayError::Step { step, error: e.to_string() };
    let mut trace = vec![start];
    let mut covers = BTreeMap::new();
    for (k, i) in inputs.iter().enumerate() {
        let s = &trace[k];
        let next = model.step(s, i).map_err(step_err(k))?;
        for p in props {
            if eval_bool(&p.assume, Env::step(s, i)).map_err(step_err(k))? {
                if !eval_bool(&p.assert, Env::full(s, i, &next)).map_err(step_err(k))? {
                    return Err(ReplayError::Violation { property: p.name.clone(), step: k });
                }
                covers.entry(p.name.clone()).or_insert(k);
            }
        }
        trace.push(next);
    }
    let missing: Vec<String> = props.iter().filter(|p| !covers.contains_key(&p.name)).map(|p| p.name.clone()).collect();
    if !missing.is_empty() {
        return Err(ReplayError::Uncovered(missing));
    }
    let last = trace.last().expect("nonempty");
    if !eval_bool(final_states, Env::state(last)).map_err(step_err(inputs.len()))? {
        return Err(ReplayError::FinalNotReached);
    }
    Ok(TestChain { inputs: inputs.to_vec(), trace, covers })
}
