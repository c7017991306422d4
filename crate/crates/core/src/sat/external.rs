use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::dimacs::{self, SolverOutput};
use super::{Cnf, Limits, Lit, SatSolver, SolveResult, SolverStats, Var};

/// Runs an external DIMACS solver once per query. The clause set lives in
/// memory; each call writes it, with assumptions as unit clauses, to a
/// temporary file passed as the last argument. Cores are computed by
/// deletion over the assumptions.
#[derive(Debug)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
    cnf: Cnf,
    limits: Limits,
    stats: SolverStats,
}

impl ExternalSolver {
    pub fn new(program: String, args: Vec<String>) -> Self {
        ExternalSolver { program, args, cnf: Cnf::new(), limits: Limits::default(), stats: SolverStats::default() }
    }

    fn run(&mut self, assumptions: &[Lit]) -> Result<SolverOutput, String> {
        self.stats.solves += 1;
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile().map_err(|e| e.to_string())?;
        file.write_all(dimacs::write(&self.cnf, assumptions).as_bytes()).map_err(|e| e.to_string())?;
        file.flush().map_err(|e| e.to_string())?;
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .arg(file.path())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot start `{}`: {e}", self.program))?;
        if let Some(deadline) = self.limits.deadline {
            loop {
                if child.try_wait().map_err(|e| e.to_string())?.is_some() {
                    break;
                }
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Ok(SolverOutput::Unknown);
                }
                std::thread::sleep(Duration::from_millis(2));
            }
        }
        let out = child.wait_with_output().map_err(|e| e.to_string())?;
        let text = String::from_utf8_lossy(&out.stdout);
        let parsed = dimacs::parse_output(&text, self.cnf.num_vars);
        // fall back on the conventional exit codes when there is no status line
        Ok(match (parsed, out.status.code()) {
            (SolverOutput::Unknown, Some(20)) => SolverOutput::Unsat,
            (p, _) => p,
        })
    }

    fn query(&mut self, assumptions: &[Lit]) -> SolveResult {
        match self.run(assumptions) {
            Ok(SolverOutput::Sat(m)) => SolveResult::Sat(m),
            Ok(SolverOutput::Unsat) => SolveResult::Unsat(assumptions.to_vec()),
            Ok(SolverOutput::Unknown) => SolveResult::Unknown,
            Err(e) => {
                tracing::warn!("external solver failed: {e}");
                SolveResult::Unknown
            }
        }
    }
}

impl SatSolver for ExternalSolver {
    fn new_var(&mut self) -> Var {
        self.cnf.new_var()
    }

    fn num_vars(&self) -> usize {
        self.cnf.num_vars
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.cnf.add_clause(lits);
    }

    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        let first = self.query(assumptions);
        if !first.is_unsat() || assumptions.is_empty() {
            return first;
        }
        if self.query(&[]).is_unsat() {
            return SolveResult::Unsat(vec![]);
        }
        // deletion over the assumptions
        let mut core: Vec<Lit> = assumptions.to_vec();
        let mut i = 0;
        while i < core.len() {
            let mut trial = core.clone();
            trial.remove(i);
            match self.query(&trial) {
                SolveResult::Unsat(_) => core = trial,
                SolveResult::Sat(_) => i += 1,
                SolveResult::Unknown => return SolveResult::Unknown,
            }
        }
        SolveResult::Unsat(core)
    }

    fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    fn stats(&self) -> SolverStats {
        self.stats
    }
}
