use std::sync::Arc;

use super::domain::EnumType;

/// Which frame a variable reference reads from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    /// Current-state variable `s`.
    State,
    /// Input variable `i`.
    Input,
    /// Next-state variable `s'`.
    Next,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub scope: Scope,
    pub index: usize,
}

impl VarRef {
    pub fn state(index: usize) -> Self {
        VarRef { scope: Scope::State, index }
    }
    pub fn input(index: usize) -> Self {
        VarRef { scope: Scope::Input, index }
    }
    pub fn next(index: usize) -> Self {
        VarRef { scope: Scope::Next, index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "=>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }
}

/// Expression tree over state, input and next-state variables.
///
/// Integer arithmetic inside an expression is exact; values are saturated to
/// the target domain only when stored into a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Sym(Arc<EnumType>, u32),
    Var(VarRef),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn tt() -> Expr {
        Expr::Bool(true)
    }

    pub fn state(index: usize) -> Expr {
        Expr::Var(VarRef::state(index))
    }

    pub fn input(index: usize) -> Expr {
        Expr::Var(VarRef::input(index))
    }

    pub fn next(index: usize) -> Expr {
        Expr::Var(VarRef::next(index))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Bool(true), _) => b,
            (_, Expr::Bool(true)) => a,
            _ => Expr::binary(BinOp::And, a, b),
        }
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Bool(false), _) => b,
            (_, Expr::Bool(false)) => a,
            _ => Expr::binary(BinOp::Or, a, b),
        }
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Eq, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().fold(Expr::tt(), Expr::and)
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().fold(Expr::Bool(false), Expr::or)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Sym(..) | Expr::Var(_) => vec![],
            Expr::Not(a) => vec![a],
            Expr::Binary(_, a, b) => vec![a, b],
            Expr::Ite(c, t, e) => vec![c, t, e],
        }
    }

    /// Visits every variable reference in the tree.
    pub fn for_each_var(&self, f: &mut impl FnMut(VarRef)) {
        if let Expr::Var(v) = self {
            f(*v);
        }
        for c in self.children() {
            c.for_each_var(f);
        }
    }

    pub fn mentions(&self, scope: Scope) -> bool {
        let mut found = false;
        self.for_each_var(&mut |v| found |= v.scope == scope);
        found
    }
}
