//! Propositional layer: literals and clauses, an embedded CDCL solver with an
//! assumption interface, a DIMACS process backend, and a Tseitin encoder for
//! finite-domain expressions.

mod cdcl;
pub mod dimacs;
mod encode;
mod external;

use std::fmt;
use std::ops::Not;
use std::time::Instant;

pub use cdcl::Cdcl;
pub use encode::{decode, width_for, Encoder, IntTerm, Term};
pub use external::ExternalSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A literal: variable plus sign, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit(var.0 * 2 + negated as u32)
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    /// DIMACS form: variables are numbered from 1.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 / 2 {
            return None;
        }
        Some(Lit::new(Var(x.unsigned_abs() as u32 - 1), x < 0))
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub type Clause = Vec<Lit>;

/// Clause set with a variable count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars as u32 - 1)
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.num_vars = self.num_vars.max(l.var().index() + 1);
        }
        self.clauses.push(lits.to_vec());
    }

    /// True iff every clause has a literal made true by `assignment`.
    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assignment.value(l)))
    }
}

/// A total assignment returned with a satisfiable answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    /// Value of `lit`; variables beyond the vector are false.
    pub fn value(&self, lit: Lit) -> bool {
        self.0.get(lit.var().index()).copied().unwrap_or(false) ^ lit.is_negated()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    /// Unsatisfiable; the vector is a subset of the assumptions that is
    /// unsatisfiable together with the clauses.
    Unsat(Vec<Lit>),
    /// Resource limit reached.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat(_))
    }
}

/// Per-call resource limits; `None` means unlimited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

/// Incremental SAT solver with assumptions. Clauses may be added between
/// calls to [`SatSolver::solve`].
pub trait SatSolver: Send {
    fn new_var(&mut self) -> Var;
    fn num_vars(&self) -> usize;
    fn add_clause(&mut self, lits: &[Lit]);
    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult;
    fn set_limits(&mut self, limits: Limits);
    fn stats(&self) -> SolverStats;
}

/// Shrinks an unsatisfiable core by deletion, trying literals first to last
/// and spending at most `max_calls` solver calls. Literals whose removal
/// keeps the query unsatisfiable are dropped.
pub fn minimize_core(solver: &mut dyn SatSolver, core: &[Lit], max_calls: usize) -> Vec<Lit> {
    let mut current: Vec<Lit> = core.to_vec();
    let mut calls = 0;
    let mut i = 0;
    while i < current.len() && calls < max_calls {
        let mut trial = current.clone();
        trial.remove(i);
        calls += 1;
        match solver.solve(&trial) {
            SolveResult::Unsat(smaller) => {
                // keep the order of `current`, restricted to the new core
                current = trial.into_iter().filter(|l| smaller.contains(l)).collect();
            }
            _ => i += 1,
        }
    }
    current
}

/// Which solver implementation to instantiate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Embedded,
    /// An external DIMACS solver: program and extra arguments.
    External {
        program: String,
        args: Vec<String>,
    },
}

impl Backend {
    pub const ENV_VAR: &'static str = "CHAINFORGE_SOLVER";

    /// Parses `embedded` or `external:<path> [args...]`.
    pub fn parse(spec: &str) -> Result<Backend, String> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "embedded" {
            return Ok(Backend::Embedded);
        }
        let rest = spec.strip_prefix("external:").ok_or_else(|| format!("unknown solver backend `{spec}`"))?;
        let mut parts = rest.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or("missing solver path")?;
        Ok(Backend::External { program, args: parts.collect() })
    }

    /// Reads the backend from the environment; embedded when unset.
    pub fn from_env() -> Result<Backend, String> {
        match std::env::var(Self::ENV_VAR) {
            Ok(s) => Backend::parse(&s),
            Err(_) => Ok(Backend::Embedded),
        }
    }

    pub fn create(&self) -> Box<dyn SatSolver> {
        match self {
            Backend::Embedded => Box::new(Cdcl::new()),
            Backend::External { program, args } => Box::new(ExternalSolver::new(program.clone(), args.clone())),
        }
    }
}
