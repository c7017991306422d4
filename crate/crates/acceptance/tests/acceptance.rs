//! One line per acceptance criterion. Tolerances are fixed below; the
//! process exits non-zero when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chainforge::bmc::{check_path, BmcConfig, PathCheck, Pin, Unrolling};
use chainforge::dsl;
use chainforge::engine::{generate_chain, Config, EngineError};
use chainforge::fixtures;
use chainforge::model::VarRef;
use chainforge::model::{eval_bool, replay_from, Env, Expr, Model, Value};
use chainforge::optimizer::solve_exact;
use chainforge::oracle::{oracle_on_graph, random_model, RandomParams, StateGraph};
use chainforge::reachgraph::{build_prop_kreach_graph, exists_covering_path, ReachGraph};
use chainforge::sat::{decode, Cdcl, Cnf, Encoder, Lit, SatSolver, SolveResult, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CRUISE_LEN: usize = 9;
const CRUISE_TIME: Duration = Duration::from_secs(10);
const BROKEN_LEN: usize = 4;
const BROKEN_INCREMENTS: usize = 1;
const RANDOM_MODELS: usize = 200;
const ATSP_CASES: usize = 500;
const LEMMA1_CASES: usize = 500;
const SAT_CASES: usize = 1000;
const PARTITION_CHAINS: usize = 2;

type Outcome = Result<String, String>;

fn cruise(props: &str) -> (Model, Vec<chainforge::model::Property>, Expr) {
    let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
    let p = dsl::parse_properties(&m, props).unwrap();
    let init = dsl::parse_state_set(&m, fixtures::CRUISE_INIT).unwrap();
    (m, p, init)
}

fn cruise_end_to_end() -> Outcome {
    let (m, props, init) = cruise(fixtures::CRUISE_PROPS);
    let t = Instant::now();
    let r = generate_chain(&m, &props, &init, &init, &Config::default()).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    let c = &r.reports.first().ok_or("no chain")?.chain;
    let start = c.trace[0].clone();
    let replayed = replay_from(&m, &props, &init, start, &c.inputs).map_err(|e| format!("replay: {e}"))?;
    let detail = format!(
        "tcs={} len={} covered={} time={:.2}s",
        r.reports.len(),
        r.total_len(),
        replayed.covers.len(),
        took.as_secs_f64()
    );
    if r.reports.len() == 1 && r.total_len() == CRUISE_LEN && replayed.covers.len() == 4 && took < CRUISE_TIME {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn graph_fidelity() -> Outcome {
    let (m, props, init) = cruise(fixtures::CRUISE_PROPS);
    let mut u = Unrolling::new(&m, BmcConfig::default());
    let g = build_prop_kreach_graph(&mut u, ReachGraph::for_properties(&props, &init, &init), 2)
        .map_err(|e| e.to_string())?;
    // I=0, p1..p4 = 1..4, F=5
    let published: BTreeMap<(usize, usize), usize> = [
        ((0, 1), 2),
        ((0, 4), 2),
        ((1, 2), 2),
        ((2, 1), 1),
        ((1, 3), 1),
        ((3, 1), 2),
        ((2, 3), 1),
        ((2, 4), 2),
        ((4, 1), 2),
        ((4, 3), 2),
        ((3, 5), 2),
    ]
    .into_iter()
    .collect();
    let ours = g.edges();
    let extra: Vec<String> = ours
        .iter()
        .filter(|(e, w)| published.get(e) != Some(w))
        .map(|(e, w)| format!("{}->{}:{w}", g.name(e.0), g.name(e.1)))
        .collect();
    let missing: Vec<String> = published
        .iter()
        .filter(|(e, w)| ours.get(e) != Some(w))
        .map(|(e, w)| format!("{}->{}:{w}", g.name(e.0), g.name(e.1)))
        .collect();
    // explicit-state distances for every disagreement
    let sg = StateGraph::build(&m, 1 << 16).unwrap();
    let disputed: BTreeSet<(usize, usize)> =
        ours.keys().chain(published.keys()).copied().filter(|e| ours.get(e) != published.get(e)).collect();
    let bfs: Vec<String> = disputed
        .iter()
        .map(|&(a, b)| {
            let d = common::kreach_distance(&sg, g.pin(a), g.pin(b), usize::from(b == g.final_vertex()));
            format!("{}->{}={}", g.name(a), g.name(b), d.map_or("none".into(), |d| d.to_string()))
        })
        .collect();
    let detail = format!(
        "{} edges, unexpected [{}], missing [{}], explicit search [{}]",
        ours.len(),
        extra.join(" "),
        missing.join(" "),
        bfs.join(" ")
    );
    if extra.is_empty() && missing.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn broken_chain_repair() -> Outcome {
    let (m, props, init) = cruise(fixtures::CRUISE_BROKEN_PROPS);
    let mut u = Unrolling::new(&m, BmcConfig::default());
    let path = [
        Pin::states("I", init.clone()),
        Pin::property(&props[0]),
        Pin::property(&props[1]),
        Pin::states("F", init.clone()),
    ];
    let failed = check_path(&mut u, &path, &[0, 1, 2]).map_err(|e| e.to_string())?;
    if failed != (PathCheck::Infeasible { start: 0, end: 2 }) {
        return Err(format!("abstract path check gave {failed:?}"));
    }
    let r = generate_chain(&m, &props, &init, &init, &Config::default()).map_err(|e| e.to_string())?;
    let c = &r.reports[0].chain;
    let replayed = replay_from(&m, &props, &init, c.trace[0].clone(), &c.inputs).map_err(|e| format!("replay: {e}"))?;
    let names: Vec<&str> = c
        .inputs
        .iter()
        .map(|i| i.0.iter().position(|v| *v == Value::Bool(true)).map_or("?", |k| m.inputs()[k].name.as_str()))
        .collect();
    let detail = format!(
        "failed <I,p1,p2> at (0,1,2); increments={} len={} inputs={names:?}",
        r.stats.repair_increments,
        c.len()
    );
    if r.stats.repair_increments == BROKEN_INCREMENTS && c.len() == BROKEN_LEN && replayed.covers.len() == 2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let (mut checked, mut seed) = (0, 0u64);
    while checked < RANDOM_MODELS {
        if seed > 20 * RANDOM_MODELS as u64 {
            return Err(format!("only {checked} qualifying models"));
        }
        let r = random_model(seed, RandomParams::sample(seed, true, true));
        seed += 1;
        let sg = StateGraph::build(&r.model, 1 << 16).unwrap();
        let want = oracle_on_graph(&sg, &r.props, &r.init, &r.fin).unwrap().ok_or("oracle found no chain")?;
        let cfg = Config { min_bound: sg.diameter() + 1, ..Config::default() };
        let res =
            generate_chain(&r.model, &r.props, &r.init, &r.fin, &cfg).map_err(|e| format!("seed {}: {e}", seed - 1))?;
        let once = res.reports.len() == 1 && {
            let p = &res.reports[0].path;
            p.iter().collect::<BTreeSet<_>>().len() == p.len()
        };
        if !once || res.stats.k_reached < sg.diameter() {
            continue;
        }
        checked += 1;
        if res.total_len() != want.len() {
            return Err(format!("seed {}: engine {} vs optimum {}", seed - 1, res.total_len(), want.len()));
        }
    }
    Ok(format!("{checked} models agree ({seed} generated)"))
}

fn completeness() -> Outcome {
    let (mut checked, mut seed) = (0, 1_000_000u64);
    while checked < RANDOM_MODELS {
        let r = random_model(seed, RandomParams::sample(seed, false, true));
        seed += 1;
        let sg = StateGraph::build(&r.model, 1 << 16).unwrap();
        let Some(want) = oracle_on_graph(&sg, &r.props, &r.init, &r.fin).unwrap() else { continue };
        checked += 1;
        match generate_chain(&r.model, &r.props, &r.init, &r.fin, &Config::default()) {
            Ok(res) if res.reports.len() == 1 && res.total_len() >= want.len() => {}
            Ok(res) => {
                return Err(format!(
                    "seed {}: {} chains, len {} vs optimum {}",
                    seed - 1,
                    res.reports.len(),
                    res.total_len(),
                    want.len()
                ))
            }
            Err(e @ EngineError::NoSingleChain { .. }) => return Err(format!("seed {}: {e}", seed - 1)),
            Err(e) => return Err(format!("seed {}: unexpected {e}", seed - 1)),
        }
    }
    Ok(format!("{checked} models, every one chained"))
}

fn atsp_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa75);
    for case in 0..ATSP_CASES {
        let n = rng.gen_range(1..=8);
        let inst = common::random_atsp(&mut rng, n);
        let got = solve_exact(&inst).map_err(|e| e.to_string())?.map(|t| t.cost);
        let want = common::brute_atsp(&inst);
        if got != want {
            return Err(format!("case {case}: held-karp {got:?} vs enumeration {want:?}"));
        }
    }
    Ok(format!("{ATSP_CASES} instances"))
}

fn lemma1_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e3);
    for case in 0..LEMMA1_CASES {
        let g = common::random_graph(&mut rng, 8);
        if exists_covering_path(&g) != common::brute_cover_exists(&g) {
            return Err(format!("case {case} disagrees:\n{}", g.to_dot()));
        }
    }
    Ok(format!("{LEMMA1_CASES} digraphs"))
}

fn cnf_truth(cnf: &Cnf, assumptions: &[Lit]) -> bool {
    (0u32..1 << cnf.num_vars).any(|bits| {
        let val = |l: Lit| ((bits >> l.var().0) & 1 == 1) ^ l.is_negated();
        assumptions.iter().all(|&a| val(a)) && cnf.clauses.iter().all(|c| c.iter().any(|&l| val(l)))
    })
}

fn sat_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a7);
    for case in 0..SAT_CASES {
        let n = rng.gen_range(1..=16usize);
        let mut cnf = Cnf::new();
        cnf.num_vars = n;
        for _ in 0..rng.gen_range(1..=5 * n) {
            let c: Vec<Lit> =
                (0..rng.gen_range(1..=4)).map(|_| Lit::new(Var(rng.gen_range(0..n as u32)), rng.gen())).collect();
            cnf.add_clause(&c);
        }
        let assumptions: Vec<Lit> =
            (0..rng.gen_range(0..4)).map(|_| Lit::new(Var(rng.gen_range(0..n as u32)), rng.gen())).collect();
        let mut s = Cdcl::from_cnf(&cnf);
        let truth = cnf_truth(&cnf, &assumptions);
        let ok = match s.solve(&assumptions) {
            SolveResult::Sat(m) => truth && cnf.satisfied_by(&m),
            SolveResult::Unsat(core) => !truth && !cnf_truth(&cnf, &core) && s.solve(&core).is_unsat(),
            SolveResult::Unknown => false,
        };
        if !ok {
            return Err(format!("cnf case {case}"));
        }
    }
    // formulas over finite-domain variables, checked with the evaluator
    let m = dsl::parse_model("model m { state a : -2..3; state b : 0..4; state c : -1..1; }").unwrap();
    let states: Vec<_> = m.all_states().collect();
    for case in 0..SAT_CASES {
        let f = common::random_formula(&mut rng, &m, 4);
        let mut enc = Encoder::new(Box::new(Cdcl::new()));
        let frame: Vec<_> = m.state_vars().iter().map(|v| enc.fresh_var(&v.domain)).collect();
        let fr = frame.clone();
        let out = enc.encode_bool(&f, &move |v: VarRef| fr[v.index].clone());
        let truth = states.iter().any(|s| eval_bool(&f, Env::state(s)).unwrap());
        let ok = match enc.solve(&[out]) {
            SolveResult::Sat(a) => {
                let s = chainforge::model::StateVec(frame.iter().map(|t| decode(t, &a)).collect());
                truth && eval_bool(&f, Env::state(&s)).unwrap()
            }
            SolveResult::Unsat(core) => !truth && enc.solve(&core).is_unsat(),
            SolveResult::Unknown => false,
        };
        if !ok {
            return Err(format!("formula case {case}: {f:?}"));
        }
    }
    Ok(format!("{SAT_CASES} clause sets and {SAT_CASES} formulas"))
}

const BRANCH: &str = "model branch {
  state side : {NONE, A, B} init NONE;
  state n : 0..2 init 0;
  input go : {L, R, STEP};
  trans {
    side' = side == NONE && go == L ? A : side == NONE && go == R ? B : side;
    n' = side != NONE && go == STEP && n < 2 ? n + 1 : n;
  }
}";

const BRANCH_PROPS: &str = "
property a1 { assume side == A && n == 0 && go == STEP; assert next(n) == 1; }
property a2 { assume side == A && n == 1 && go == STEP; assert next(n) == 2; }
property b1 { assume side == B && n == 0 && go == STEP; assert next(n) == 1; }
property b2 { assume side == B && n == 1 && go == STEP; assert next(n) == 2; }
";

fn partitioning() -> Outcome {
    let m = dsl::parse_model(BRANCH).unwrap();
    let props = dsl::parse_properties(&m, BRANCH_PROPS).unwrap();
    let init = dsl::parse_state_set(&m, "side == NONE && n == 0").unwrap();
    let fin = dsl::parse_state_set(&m, "n == 2").unwrap();
    let r = generate_chain(&m, &props, &init, &fin, &Config { k_max: 8, ..Config::default() })
        .map_err(|e| e.to_string())?;
    let mut covered = BTreeSet::new();
    for c in r.chains() {
        let last = c.trace.last().unwrap();
        if !eval_bool(&fin, Env::state(last)).unwrap() {
            return Err("a chain does not end in F".into());
        }
        covered.extend(c.covers.keys().cloned());
    }
    let detail = format!("{} chains covering {}/{}", r.reports.len(), covered.len(), props.len());
    if r.reports.len() == PARTITION_CHAINS && covered.len() == props.len() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("cruise end-to-end", cruise_end_to_end),
        ("k-reachability graph fidelity", graph_fidelity),
        ("broken-chain repair", broken_chain_repair),
        ("oracle equivalence", oracle_equivalence),
        ("completeness", completeness),
        ("atsp exactness", atsp_exactness),
        ("covering-path existence", lemma1_equivalence),
        ("sat soundness", sat_soundness),
        ("partitioning", partitioning),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {name}: {verdict} ({detail}) [{:.1}s]", n + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
