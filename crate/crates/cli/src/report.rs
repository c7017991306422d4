//! JSON report schema `chainforge-report/1`, text rendering and replay.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use chainforge::engine::ChainResult;
use chainforge::model::{replay_from, Domain, InputVec, Model, StateVec, TestChain, Value};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

use crate::load::Problem;

pub const SCHEMA: &str = "chainforge-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub model: String,
    pub init: String,
    #[serde(rename = "final")]
    pub fin: String,
    pub status: String,
    pub chains: Vec<ChainJson>,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainJson {
    pub properties: Vec<String>,
    pub path: Vec<String>,
    pub weights: Vec<usize>,
    pub start: Map<String, Json>,
    pub steps: Vec<Step>,
    /// First step at which each property is covered.
    pub covers: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub input: Map<String, Json>,
    pub state: Map<String, Json>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub chains: usize,
    pub total_length: usize,
    pub k_reached: usize,
    pub solver_calls: u64,
    pub repair_increments: usize,
    pub refinement_splits: usize,
    pub infeasible_paths: usize,
    pub compacted_steps: usize,
}

fn to_json(domain: &Domain, v: Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(b),
        Value::Int(i) => Json::from(i),
        Value::Sym(_) => Json::String(domain.format_value(v)),
    }
}

fn from_json(domain: &Domain, j: &Json) -> Option<Value> {
    let v = match (domain, j) {
        (Domain::Bool, Json::Bool(b)) => Value::Bool(*b),
        (Domain::Int { .. }, Json::Number(n)) => Value::Int(n.as_i64()?),
        (Domain::Enum(e), Json::String(s)) => Value::Sym(e.index_of(s)?),
        _ => return None,
    };
    domain.contains(v).then_some(v)
}

fn state_map(model: &Model, s: &StateVec) -> Map<String, Json> {
    model.state_vars().iter().zip(&s.0).map(|(v, &x)| (v.name.clone(), to_json(&v.domain, x))).collect()
}

fn input_map(model: &Model, i: &InputVec) -> Map<String, Json> {
    model.inputs().iter().zip(&i.0).map(|(v, &x)| (v.name.clone(), to_json(&v.domain, x))).collect()
}

fn read_vec<'a>(
    vars: impl Iterator<Item = (&'a str, &'a Domain)>,
    map: &Map<String, Json>,
    what: &str,
) -> Result<Vec<Value>, String> {
    vars.map(|(name, d)| {
        let j = map.get(name).ok_or_else(|| format!("{what}: missing `{name}`"))?;
        from_json(d, j).ok_or_else(|| format!("{what}: `{name}` = {j} is not in {d}"))
    })
    .collect()
}

fn read_state(model: &Model, map: &Map<String, Json>, what: &str) -> Result<StateVec, String> {
    read_vec(model.state_vars().iter().map(|v| (v.name.as_str(), &v.domain)), map, what).map(StateVec)
}

fn read_input(model: &Model, map: &Map<String, Json>, what: &str) -> Result<InputVec, String> {
    read_vec(model.inputs().iter().map(|v| (v.name.as_str(), &v.domain)), map, what).map(InputVec)
}

fn chain_json(
    model: &Model,
    c: &TestChain,
    properties: Vec<String>,
    path: Vec<String>,
    weights: Vec<usize>,
) -> ChainJson {
    ChainJson {
        properties,
        path,
        weights,
        start: state_map(model, c.initial_state()),
        steps: c
            .inputs
            .iter()
            .zip(&c.trace[1..])
            .map(|(i, s)| Step { input: input_map(model, i), state: state_map(model, s) })
            .collect(),
        covers: c.covers.clone(),
    }
}

pub fn build(p: &Problem, r: &ChainResult) -> Report {
    Report {
        schema: SCHEMA.into(),
        model: p.model.name().to_string(),
        init: p.init_text.clone(),
        fin: p.fin_text.clone(),
        status: r.status.as_str().into(),
        chains: r
            .reports
            .iter()
            .map(|c| chain_json(&p.model, &c.chain, c.properties.clone(), c.path.clone(), c.weights.clone()))
            .collect(),
        summary: Summary {
            chains: r.reports.len(),
            total_length: r.total_len(),
            k_reached: r.stats.k_reached,
            solver_calls: r.stats.solver_calls,
            repair_increments: r.stats.repair_increments,
            refinement_splits: r.stats.refinement_splits,
            infeasible_paths: r.stats.infeasible_paths,
            compacted_steps: r.stats.compacted_steps,
        },
        warnings: r.warnings.clone(),
    }
}

fn format_path(path: &[String], weights: &[usize]) -> String {
    let mut out = String::new();
    for (k, v) in path.iter().enumerate() {
        if k > 0 {
            write!(out, " -{}-> ", weights[k - 1]).unwrap();
        }
        out.push_str(v);
    }
    out
}

fn format_map(map: &Map<String, Json>) -> String {
    let parts: Vec<String> = map
        .iter()
        .map(|(k, v)| match v {
            Json::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect();
    parts.join(" ")
}

/// One line per step: the input vector, then the state it leads to.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for (n, c) in report.chains.iter().enumerate() {
        writeln!(out, "chain {}: {} steps, covers {}", n + 1, c.steps.len(), c.properties.join(" ")).unwrap();
        writeln!(out, "  path  {}", format_path(&c.path, &c.weights)).unwrap();
        writeln!(out, "  start {}", format_map(&c.start)).unwrap();
        let by_step: BTreeMap<usize, Vec<&str>> = c.covers.iter().fold(BTreeMap::new(), |mut m, (p, &k)| {
            m.entry(k).or_default().push(p.as_str());
            m
        });
        for (k, s) in c.steps.iter().enumerate() {
            write!(out, "  {:>4}  {}  ->  {}", k + 1, format_map(&s.input), format_map(&s.state)).unwrap();
            if let Some(ps) = by_step.get(&k) {
                write!(out, "  [{}]", ps.join(", ")).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn summary_line(report: &Report, seconds: f64) -> String {
    format!(
        "summary: tcs={} len={} time={:.3}s status={}",
        report.summary.chains, report.summary.total_length, seconds, report.status
    )
}

/// Replays every chain of `report` against `p` and checks that the traces
/// and coverage match what the report claims. Returns one line per chain.
pub fn replay(p: &Problem, report: &Report) -> Result<Vec<String>, String> {
    if report.schema != SCHEMA {
        return Err(format!("unsupported report schema `{}`", report.schema));
    }
    let mut lines = vec![];
    let mut covered = BTreeSet::new();
    for (n, c) in report.chains.iter().enumerate() {
        let what = format!("chain {}", n + 1);
        let start = read_state(&p.model, &c.start, &format!("{what} start"))?;
        let inputs = c
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| read_input(&p.model, &s.input, &format!("{what} step {}", k + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if !chainforge::model::eval_bool(&p.init, chainforge::model::Env::state(&start)).map_err(|e| e.to_string())? {
            return Err(format!("{what}: start state is not initial"));
        }
        let props: Vec<_> = p.props.iter().filter(|q| c.properties.contains(&q.name)).cloned().collect();
        if props.len() != c.properties.len() {
            return Err(format!("{what}: unknown property in {:?}", c.properties));
        }
        let chain = replay_from(&p.model, &props, &p.fin, start, &inputs).map_err(|e| format!("{what}: {e}"))?;
        let again = chain_json(&p.model, &chain, c.properties.clone(), c.path.clone(), c.weights.clone());
        if again.steps != c.steps {
            let k = again.steps.iter().zip(&c.steps).position(|(a, b)| a != b).unwrap_or(0);
            return Err(format!("{what}: trace differs at step {}", k + 1));
        }
        if again.covers != c.covers {
            return Err(format!("{what}: coverage differs: replay gives {:?}", again.covers));
        }
        covered.extend(c.properties.iter().cloned());
        lines.push(format!("{what}: ok, {} steps, covers {}", inputs.len(), c.properties.join(" ")));
    }
    let missing: Vec<&str> = p.props.iter().map(|q| q.name.as_str()).filter(|n| !covered.contains(*n)).collect();
    if !missing.is_empty() {
        return Err(format!("no chain covers {}", missing.join(", ")));
    }
    Ok(lines)
}
