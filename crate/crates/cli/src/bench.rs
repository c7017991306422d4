//! Benchmark suites: one directory per benchmark holding `model.rsys`,
//! `props.props` and `expected.toml`.

use std::fmt::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chainforge::engine::{generate_chain, Config};
use chainforge::oracle::{self, oracle_min_chain, random_baseline};
use serde::Deserialize;

use crate::load;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub name: Option<String>,
    pub init: Option<String>,
    #[serde(rename = "final")]
    pub fin: Option<String>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    pub timeout: Option<f64>,
    #[serde(default = "default_budget")]
    pub baseline_budget: usize,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub tcs: Option<usize>,
    pub len: Option<usize>,
    /// Chain length may exceed the oracle optimum by at most this much.
    pub oracle_slack: Option<usize>,
    pub status: Option<String>,
}

fn default_k_max() -> usize {
    50
}

fn default_budget() -> usize {
    5000
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub tcs: Option<usize>,
    pub len: Option<usize>,
    pub status: String,
    pub time: Duration,
    pub oracle: Option<usize>,
    pub random: Option<(usize, usize, f64)>,
    pub problems: Vec<String>,
}

impl Row {
    fn failed(name: String, why: String) -> Row {
        Row {
            name,
            tcs: None,
            len: None,
            status: "error".into(),
            time: Duration::ZERO,
            oracle: None,
            random: None,
            problems: vec![why],
        }
    }

    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Benchmark directories of `suite`, sorted by name.
pub fn discover(suite: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut dirs = vec![];
    for entry in std::fs::read_dir(suite)? {
        let path = entry?.path();
        if path.join("expected.toml").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

pub fn run_one(dir: &Path, seed: u64) -> Row {
    let fallback = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
    match catch_unwind(AssertUnwindSafe(|| run_inner(dir, seed, &fallback))) {
        Ok(Ok(row)) => row,
        Ok(Err(why)) => Row::failed(fallback, why),
        Err(_) => Row::failed(fallback, "panicked".into()),
    }
}

fn run_inner(dir: &Path, seed: u64, fallback: &str) -> Result<Row, String> {
    let text = load::read(&dir.join("expected.toml")).map_err(|e| e.to_string())?;
    let exp: Expected = toml::from_str(&text).map_err(|e| format!("expected.toml: {e}"))?;
    let p = load::load(&dir.join("model.rsys"), &dir.join("props.props"), exp.init.as_deref(), exp.fin.as_deref())
        .map_err(|e| e.to_string())?;
    let cfg = Config { k_max: exp.k_max, seed, timeout: exp.timeout.map(Duration::from_secs_f64), ..Config::default() };
    let started = Instant::now();
    let result = generate_chain(&p.model, &p.props, &p.init, &p.fin, &cfg);
    let time = started.elapsed();
    let oracle = match oracle_min_chain(&p.model, &p.props, &p.init, &p.fin, oracle::DEFAULT_NODE_LIMIT) {
        Ok(c) => c.map(|c| c.len()),
        Err(_) => None,
    };
    let random = random_baseline(&p.model, &p.props, &p.init, &p.fin, exp.baseline_budget, seed)
        .ok()
        .map(|b| (b.tests.len(), b.total_len, b.coverage));
    let mut row = Row {
        name: exp.name.clone().unwrap_or_else(|| fallback.to_string()),
        tcs: None,
        len: None,
        status: String::new(),
        time,
        oracle,
        random,
        problems: vec![],
    };
    match result {
        Ok(r) => {
            row.tcs = Some(r.reports.len());
            row.len = Some(r.total_len());
            row.status = r.status.as_str().into();
        }
        Err(e) => {
            row.status = "failed".into();
            row.problems.push(e.to_string());
        }
    }
    let e = &exp.expect;
    if let (Some(want), Some(got)) = (e.tcs, row.tcs) {
        if want != got {
            row.problems.push(format!("tcs {got}, expected {want}"));
        }
    }
    if let (Some(want), Some(got)) = (e.len, row.len) {
        if want != got {
            row.problems.push(format!("len {got}, expected {want}"));
        }
    }
    if let (Some(slack), Some(got)) = (e.oracle_slack, row.len) {
        match row.oracle {
            Some(best) if got > best + slack => row.problems.push(format!("len {got} exceeds oracle {best} + {slack}")),
            Some(_) => {}
            None => row.problems.push("oracle unavailable".into()),
        }
    }
    if let Some(want) = &e.status {
        if *want != row.status {
            row.problems.push(format!("status {}, expected {want}", row.status));
        }
    }
    Ok(row)
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

/// Fixed-width table: engine columns, oracle optimum, random baseline.
pub fn render(rows: &[Row]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<14} {:>4} {:>5} {:>9} {:<18} {:>6} {:>8} {:>8} {:>7}  verdict",
        "benchmark", "tcs", "len", "time", "status", "oracle", "rnd.tcs", "rnd.len", "rnd.cov"
    )
    .unwrap();
    for r in rows {
        let (rt, rl, rc) = match r.random {
            Some((t, l, c)) => (t.to_string(), l.to_string(), format!("{:.0}%", c * 100.0)),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let verdict = if r.ok() { "ok".to_string() } else { format!("FAIL: {}", r.problems.join("; ")) };
        writeln!(
            out,
            "{:<14} {:>4} {:>5} {:>8.3}s {:<18} {:>6} {:>8} {:>8} {:>7}  {verdict}",
            r.name,
            cell(r.tcs),
            cell(r.len),
            r.time.as_secs_f64(),
            r.status,
            cell(r.oracle),
            rt,
            rl,
            rc
        )
        .unwrap();
    }
    out
}
