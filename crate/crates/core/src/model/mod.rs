//! Semantic objects: finite domains, expressions, models, properties, and an
//! explicit-state interpreter that serves as ground truth for simulation,
//! replay and the oracle.

mod domain;
mod expr;
#[allow(clippy::module_inception)]
mod model;
mod semantics;

pub use domain::{Domain, EnumType, Sort, Value};
pub use expr::{BinOp, Expr, Scope, VarRef};
pub use model::{value_expr, ExprScope, InputVar, InputVec, Model, ModelBuilder, Property, StateVar, StateVec};
pub use semantics::{eval, eval_bool, replay, replay_from, saturate, Env, ReplayError, TestChain};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("`{0}` is assigned twice")]
    DuplicateTransition(String),
    #[error("enum constant `{0}` belongs to two different enum types")]
    AmbiguousConstant(String),
    #[error("initial value of `{0}` is outside its domain")]
    InitOutOfDomain(String),
    #[error("{context}: {message}")]
    Sort { context: String, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("input violates the input assumption")]
    InputAssumption,
    #[error("state invariant violated by {0}")]
    InvariantViolated(String),
}
