use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::domain::{Domain, EnumType, Sort, Value};
use super::expr::{BinOp, Expr, Scope, VarRef};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVar {
    pub name: String,
    pub domain: Domain,
    /// Concrete initial value, if declared.
    pub init: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputVar {
    pub name: String,
    pub domain: Domain,
}

/// Total assignment of the state variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVec(pub Vec<Value>);

/// Total assignment of the input variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputVec(pub Vec<Value>);

/// Which variables an expression may read.
#[derive(Debug, Clone, Copy)]
pub struct ExprScope {
    pub state: bool,
    pub input: bool,
    pub next: bool,
}

impl ExprScope {
    pub const STATE: ExprScope = ExprScope { state: true, input: false, next: false };
    pub const INPUT: ExprScope = ExprScope { state: false, input: true, next: false };
    pub const STEP: ExprScope = ExprScope { state: true, input: true, next: false };
    pub const FULL: ExprScope = ExprScope { state: true, input: true, next: true };
}

/// A synchronous reactive system: finite-domain state and inputs, a
/// simultaneous-assignment transition function, input assumptions and a
/// state invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    name: String,
    state_vars: Vec<StateVar>,
    inputs: Vec<InputVar>,
    init_predicate: Expr,
    input_assumption: Expr,
    state_invariant: Expr,
    transition: Vec<Option<Expr>>,
    constants: HashMap<String, (Arc<EnumType>, u32)>,
}

impl Model {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_vars(&self) -> &[StateVar] {
        &self.state_vars
    }

    pub fn inputs(&self) -> &[InputVar] {
        &self.inputs
    }

    pub fn init_predicate(&self) -> &Expr {
        &self.init_predicate
    }

    pub fn input_assumption(&self) -> &Expr {
        &self.input_assumption
    }

    pub fn state_invariant(&self) -> &Expr {
        &self.state_invariant
    }

    /// Transition expression of state variable `index`; `None` keeps the value.
    pub fn transition(&self, index: usize) -> Option<&Expr> {
        self.transition[index].as_ref()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_vars.iter().position(|v| v.name == name)
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|v| v.name == name)
    }

    /// Resolves an enum constant name to its type and index.
    pub fn constant(&self, name: &str) -> Option<(Arc<EnumType>, u32)> {
        self.constants.get(name).cloned()
    }

    pub fn var_name(&self, v: VarRef) -> &str {
        match v.scope {
            Scope::State | Scope::Next => &self.state_vars[v.index].name,
            Scope::Input => &self.inputs[v.index].name,
        }
    }

    pub fn var_domain(&self, v: VarRef) -> &Domain {
        match v.scope {
            Scope::State | Scope::Next => &self.state_vars[v.index].domain,
            Scope::Input => &self.inputs[v.index].domain,
        }
    }

    /// Predicate describing the initial states: declared init values conjoined
    /// with the init predicate.
    pub fn init_expr(&self) -> Expr {
        let values = self
            .state_vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.init.map(|val| Expr::eq(Expr::state(i), value_expr(&v.domain, val))));
        Expr::and(Expr::all(values), self.init_predicate.clone())
    }

    /// The unique initial state when every variable declares an init value
    /// and the init predicate is `true`.
    pub fn deterministic_init(&self) -> Option<StateVec> {
        if self.init_predicate != Expr::tt() {
            return None;
        }
        self.state_vars.iter().map(|v| v.init).collect::<Option<Vec<_>>>().map(StateVec)
    }

    /// Number of concrete states (product of domain sizes), saturating.
    pub fn state_space_size(&self) -> u64 {
        self.state_vars.iter().fold(1u64, |acc, v| acc.saturating_mul(v.domain.size()))
    }

    pub fn input_space_size(&self) -> u64 {
        self.inputs.iter().fold(1u64, |acc, v| acc.saturating_mul(v.domain.size()))
    }

    /// Computes the sort of `expr`, rejecting ill-sorted trees and references
    /// outside `scope`.
    pub fn sort_of(&self, expr: &Expr, scope: ExprScope) -> Result<Sort, String> {
        match expr {
            Expr::Bool(_) => Ok(Sort::Bool),
            Expr::Int(i) => Ok(Sort::Int { lo: *i, hi: *i }),
            Expr::Sym(e, idx) => {
                if (*idx as usize) < e.len() {
                    Ok(Sort::Enum(e.clone()))
                } else {
                    Err(format!("enum index {idx} out of range"))
                }
            }
            Expr::Var(v) => {
                let (allowed, len, what) = match v.scope {
                    Scope::State => (scope.state, self.state_vars.len(), "state variable"),
                    Scope::Input => (scope.input, self.inputs.len(), "input variable"),
                    Scope::Next => (scope.next, self.state_vars.len(), "next-state reference"),
                };
                if v.index >= len {
                    return Err(format!("unknown {what} #{}", v.index));
                }
                if !allowed {
                    return Err(format!("{what} `{}` not allowed here", self.var_name(*v)));
                }
                Ok(self.var_domain(*v).sort())
            }
            Expr::Not(a) => {
                self.expect_bool(a, scope)?;
                Ok(Sort::Bool)
            }
            Expr::Binary(op, a, b) => {
                let sa = self.sort_of(a, scope)?;
                let sb = self.sort_of(b, scope)?;
                match op {
                    BinOp::And | BinOp::Or | BinOp::Implies => {
                        if sa != Sort::Bool || sb != Sort::Bool {
                            return Err(format!("operands of `{}` must be bool", op.symbol()));
                        }
                        Ok(Sort::Bool)
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if !sa.same_kind(&sb) {
                            return Err(format!("cannot compare {} with {}", sa.describe(), sb.describe()));
                        }
                        Ok(Sort::Bool)
                    }
                    BinOp::Lt | BinOp::Le => match (sa, sb) {
                        (Sort::Int { .. }, Sort::Int { .. }) => Ok(Sort::Bool),
                        (x, y) => Err(format!(
                            "`{}` needs integer operands, found {} and {}",
                            op.symbol(),
                            x.describe(),
                            y.describe()
                        )),
                    },
                    BinOp::Add | BinOp::Sub => match (sa, sb) {
                        (Sort::Int { lo: l1, hi: h1 }, Sort::Int { lo: l2, hi: h2 }) => {
                            let (lo, hi) = if *op == BinOp::Add {
                                (l1.checked_add(l2), h1.checked_add(h2))
                            } else {
                                (l1.checked_sub(h2), h1.checked_sub(l2))
                            };
                            match (lo, hi) {
                                (Some(lo), Some(hi)) if hi - lo < (1 << 40) => Ok(Sort::Int { lo, hi }),
                                _ => Err("integer range too large".into()),
                            }
                        }
                        (x, y) => Err(format!(
                            "`{}` needs integer operands, found {} and {}",
                            op.symbol(),
                            x.describe(),
                            y.describe()
                        )),
                    },
                }
            }
            Expr::Ite(c, t, e) => {
                self.expect_bool(c, scope)?;
                let st = self.sort_of(t, scope)?;
                let se = self.sort_of(e, scope)?;
                match (&st, &se) {
                    (Sort::Int { lo: l1, hi: h1 }, Sort::Int { lo: l2, hi: h2 }) => {
                        Ok(Sort::Int { lo: *l1.min(l2), hi: *h1.max(h2) })
                    }
                    _ if st == se => Ok(st),
                    _ => Err(format!("branches of `?:` differ: {} vs {}", st.describe(), se.describe())),
                }
            }
        }
    }

    pub fn expect_bool(&self, expr: &Expr, scope: ExprScope) -> Result<(), String> {
        match self.sort_of(expr, scope)? {
            Sort::Bool => Ok(()),
            s => Err(format!("expected bool, found {}", s.describe())),
        }
    }

    /// Validates a predicate over state variables only (an `I` or `F` set).
    pub fn check_state_predicate(&self, expr: &Expr) -> Result<(), ModelError> {
        self.expect_bool(expr, ExprScope::STATE)
            .map_err(|message| ModelError::Sort { context: "state predicate".into(), message })
    }

    pub fn format_state(&self, s: &StateVec) -> String {
        let parts: Vec<String> = self
            .state_vars
            .iter()
            .zip(&s.0)
            .map(|(v, val)| format!("{}={}", v.name, v.domain.format_value(*val)))
            .collect();
        parts.join(" ")
    }

    pub fn format_input(&self, i: &InputVec) -> String {
        let parts: Vec<String> = self
            .inputs
            .iter()
            .zip(&i.0)
            .map(|(v, val)| format!("{}={}", v.name, v.domain.format_value(*val)))
            .collect();
        parts.join(" ")
    }

    /// Expression `s == state` over all state variables.
    pub fn state_equals(&self, state: &StateVec) -> Expr {
        Expr::all(
            self.state_vars
                .iter()
                .zip(&state.0)
                .enumerate()
                .map(|(i, (v, val))| Expr::eq(Expr::state(i), value_expr(&v.domain, *val))),
        )
    }

    /// Enumerates every concrete state (product of domains) in lexicographic order.
    pub fn all_states(&self) -> impl Iterator<Item = StateVec> + '_ {
        let domains: Vec<&Domain> = self.state_vars.iter().map(|v| &v.domain).collect();
        product(domains).map(StateVec)
    }

    /// Enumerates every concrete input vector (ignoring the input assumption).
    pub fn all_inputs(&self) -> impl Iterator<Item = InputVec> + '_ {
        let domains: Vec<&Domain> = self.inputs.iter().map(|v| &v.domain).collect();
        product(domains).map(InputVec)
    }
}

/// Literal expression for a value of the given domain.
pub fn value_expr(domain: &Domain, v: Value) -> Expr {
    match (domain, v) {
        (_, Value::Bool(b)) => Expr::Bool(b),
        (_, Value::Int(i)) => Expr::Int(i),
        (Domain::Enum(e), Value::Sym(s)) => Expr::Sym(e.clone(), s),
        (_, Value::Sym(_)) => panic!("enum value for non-enum domain"),
    }
}

fn product(domains: Vec<&Domain>) -> impl Iterator<Item = Vec<Value>> + '_ {
    let total: u64 = domains.iter().fold(1u64, |a, d| a.saturating_mul(d.size()));
    (0..total).map(move |mut code| {
        let mut out = vec![Value::Bool(false); domains.len()];
        for (slot, d) in out.iter_mut().zip(&domains).rev() {
            let size = d.size();
            *slot = d.value_at(code % size);
            code /= size;
        }
        out
    })
}

/// Incremental constructor for [`Model`]. All checks run in [`ModelBuilder::build`].
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    name: String,
    state_vars: Vec<StateVar>,
    inputs: Vec<InputVar>,
    init_predicate: Expr,
    input_assumption: Expr,
    state_invariant: Expr,
    transition: Vec<Option<Expr>>,
    double_assign: Option<String>,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ModelBuilder {
            name: name.into(),
            state_vars: vec![],
            inputs: vec![],
            init_predicate: Expr::tt(),
            input_assumption: Expr::tt(),
            state_invariant: Expr::tt(),
            transition: vec![],
            double_assign: None,
        }
    }

    /// Declares a state variable and returns its index.
    pub fn state(&mut self, name: impl Into<String>, domain: Domain, init: Option<Value>) -> usize {
        self.state_vars.push(StateVar { name: name.into(), domain, init });
        self.transition.push(None);
        self.state_vars.len() - 1
    }

    /// Declares an input variable and returns its index.
    pub fn input(&mut self, name: impl Into<String>, domain: Domain) -> usize {
        self.inputs.push(InputVar { name: name.into(), domain });
        self.inputs.len() - 1
    }

    /// Conjoins an input assumption.
    pub fn assume(&mut self, e: Expr) -> &mut Self {
        self.input_assumption = Expr::and(std::mem::replace(&mut self.input_assumption, Expr::tt()), e);
        self
    }

    /// Conjoins a state invariant.
    pub fn invariant(&mut self, e: Expr) -> &mut Self {
        self.state_invariant = Expr::and(std::mem::replace(&mut self.state_invariant, Expr::tt()), e);
        self
    }

    /// Conjoins an init predicate.
    pub fn init(&mut self, e: Expr) -> &mut Self {
        self.init_predicate = Expr::and(std::mem::replace(&mut self.init_predicate, Expr::tt()), e);
        self
    }

    pub fn trans(&mut self, var: usize, e: Expr) -> &mut Self {
        if self.transition[var].is_some() {
            self.double_assign = Some(self.state_vars[var].name.clone());
        }
        self.transition[var] = Some(e);
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for n in self.state_vars.iter().map(|v| &v.name).chain(self.inputs.iter().map(|v| &v.name)) {
            if seen.insert(n.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateName(n.clone()));
            }
        }
        if let Some(n) = self.double_assign {
            return Err(ModelError::DuplicateTransition(n));
        }
        let mut constants: HashMap<String, (Arc<EnumType>, u32)> = HashMap::new();
        for d in self.state_vars.iter().map(|v| &v.domain).chain(self.inputs.iter().map(|v| &v.domain)) {
            if let Domain::Enum(e) = d {
                for (i, n) in e.names().iter().enumerate() {
                    if seen.contains_key(n.as_str()) {
                        return Err(ModelError::DuplicateName(n.clone()));
                    }
                    match constants.get(n) {
                        Some((other, _)) if other != e => {
                            return Err(ModelError::AmbiguousConstant(n.clone()));
                        }
                        _ => {
                            constants.insert(n.clone(), (e.clone(), i as u32));
                        }
                    }
                }
            }
        }
        for v in &self.state_vars {
            if let Some(init) = v.init {
                if !v.domain.contains(init) {
                    return Err(ModelError::InitOutOfDomain(v.name.clone()));
                }
            }
        }
        let model = Model {
            name: self.name,
            state_vars: self.state_vars,
            inputs: self.inputs,
            init_predicate: self.init_predicate,
            input_assumption: self.input_assumption,
            state_invariant: self.state_invariant,
            transition: self.transition,
            constants,
        };
        let sort_err = |context: &str| {
            let context = context.to_string();
            move |message| ModelError::Sort { context, message }
        };
        model.expect_bool(&model.init_predicate, ExprScope::STATE).map_err(sort_err("init"))?;
        model.expect_bool(&model.input_assumption, ExprScope::INPUT).map_err(sort_err("assume"))?;
        model.expect_bool(&model.state_invariant, ExprScope::STATE).map_err(sort_err("invariant"))?;
        for (i, t) in model.transition.iter().enumerate() {
            if let Some(t) = t {
                let ctx = format!("transition of `{}`", model.state_vars[i].name);
                let sort = model.sort_of(t, ExprScope::STEP).map_err(sort_err(&ctx))?;
                if !model.state_vars[i].domain.sort().same_kind(&sort) {
                    return Err(ModelError::Sort {
                        context: ctx,
                        message: format!(
                            "assigns {} to a variable of domain {}",
                            sort.describe(),
                            model.state_vars[i].domain
                        ),
                    });
                }
            }
        }
        Ok(model)
    }
}

/// A safety property `G(assume => assert)`. The assumption reads the current
/// state and input; the assertion may additionally read the next state.
#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: String,
    pub assume: Expr,
    pub assert: Expr,
}

impl Property {
    pub fn new(model: &Model, name: impl Into<String>, assume: Expr, assert: Expr) -> Result<Self, ModelError> {
        let name = name.into();
        model
            .expect_bool(&assume, ExprScope::STEP)
            .map_err(|message| ModelError::Sort { context: format!("assumption of `{name}`"), message })?;
        model
            .expect_bool(&assert, ExprScope::FULL)
            .map_err(|message| ModelError::Sort { context: format!("assertion of `{name}`"), message })?;
        Ok(Property { name, assume, assert })
    }
}

impl fmt::Display for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
