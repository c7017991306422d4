//! DIMACS CNF reading and writing, and parsing of solver output in the
//! SAT-competition format (`s ...` / `v ...` lines).

use std::fmt::Write as _;

use super::{Assignment, Cnf, Lit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax { line, message: message.into() }
}

/// Writes `cnf` plus one unit clause per assumption.
pub fn write(cnf: &Cnf, assumptions: &[Lit]) -> String {
    let mut out = String::new();
    let num_vars = assumptions.iter().map(|l| l.var().index() + 1).fold(cnf.num_vars, usize::max);
    writeln!(out, "p cnf {} {}", num_vars, cnf.clauses.len() + assumptions.len()).unwrap();
    for c in &cnf.clauses {
        for l in c {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    for a in assumptions {
        writeln!(out, "{} 0", a.to_dimacs()).unwrap();
    }
    out
}

/// Parses a DIMACS CNF file. Comment lines start with `c`; clauses may span lines.
pub fn parse(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf = Cnf::new();
    let mut header: Option<(usize, usize)> = None;
    let mut current: Vec<Lit> = vec![];
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(syntax(n, "malformed problem line"));
            }
            let vars = parts[2].parse().map_err(|_| syntax(n, "bad variable count"))?;
            let clauses = parts[3].parse().map_err(|_| syntax(n, "bad clause count"))?;
            if header.replace((vars, clauses)).is_some() {
                return Err(syntax(n, "duplicate problem line"));
            }
            cnf.num_vars = vars;
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(syntax(n, "clause before problem line"));
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| syntax(n, format!("bad literal `{tok}`")))?;
            if x == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else {
                let lit = Lit::from_dimacs(x).ok_or_else(|| syntax(n, "literal out of range"))?;
                if lit.var().index() >= vars {
                    return Err(syntax(n, format!("literal {x} exceeds declared variable count")));
                }
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    let Some((_, clauses)) = header else {
        return Err(syntax(0, "missing problem line"));
    };
    if clauses != cnf.clauses.len() {
        return Err(syntax(0, format!("expected {clauses} clauses, found {}", cnf.clauses.len())));
    }
    Ok(cnf)
}

/// Result line of a solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutput {
    Sat(Assignment),
    Unsat,
    Unknown,
}

/// Parses `s SATISFIABLE` / `s UNSATISFIABLE` plus `v` value lines.
pub fn parse_output(text: &str, num_vars: usize) -> SolverOutput {
    let mut status = None;
    let mut values = vec![false; num_vars];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                if let Some(l) = tok.parse::<i64>().ok().and_then(Lit::from_dimacs) {
                    if l.var().index() < num_vars {
                        values[l.var().index()] = !l.is_negated();
                    }
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => SolverOutput::Sat(Assignment(values)),
        Some("UNSATISFIABLE") => SolverOutput::Unsat,
        _ => SolverOutput::Unknown,
    }
}

/// Formats a result in the same format, ten literals per `v` line.
pub fn format_output(result: &SolverOutput) -> String {
    match result {
        SolverOutput::Unsat => "s UNSATISFIABLE\n".into(),
        SolverOutput::Unknown => "s UNKNOWN\n".into(),
        SolverOutput::Sat(m) => {
            let mut out = String::from("s SATISFIABLE\n");
            let lits: Vec<i64> =
                m.0.iter()
                    .enumerate()
                    .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
                    .chain(std::iter::once(0))
                    .collect();
            for chunk in lits.chunks(10) {
                let parts: Vec<String> = chunk.iter().map(|x| x.to_string()).collect();
                writeln!(out, "v {}", parts.join(" ")).unwrap();
            }
            out
        }
    }
}
