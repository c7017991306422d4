//! The chain engine against the explicit product-graph optimum on seeded
//! random models, plus golden outputs for a few fixed seeds.

use std::path::PathBuf;

use chainforge::engine::{generate_chain, Config, Status};
use chainforge::model::{eval_bool, replay_from, Env};
use chainforge::oracle::{oracle_on_graph, random_model, RandomModel, RandomParams, StateGraph};
use proptest::prelude::*;

fn check_chains(r: &RandomModel, res: &chainforge::engine::ChainResult) {
    for c in res.chains() {
        let replayed = replay_from(&r.model, &r.props, &r.fin, c.trace[0].clone(), &c.inputs).unwrap();
        assert_eq!(replayed.trace, c.trace);
        assert!(eval_bool(&r.init, Env::state(&c.trace[0])).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn singleton_triggers_reach_the_optimum(seed in 0u64..1_000_000) {
        let r = random_model(seed, RandomParams::sample(seed, true, true));
        let sg = StateGraph::build(&r.model, 1 << 16).unwrap();
        let want = oracle_on_graph(&sg, &r.props, &r.init, &r.fin).unwrap().unwrap();
        let cfg = Config { min_bound: sg.diameter() + 1, ..Config::default() };
        let res = generate_chain(&r.model, &r.props, &r.init, &r.fin, &cfg).unwrap();
        check_chains(&r, &res);
        prop_assert_eq!(res.reports.len(), 1);
        // disjoint single-state triggers make every abstract path concrete
        prop_assert_eq!(res.stats.infeasible_paths, 0);
        prop_assert!(res.total_len() >= want.len());
        let path = &res.reports[0].path;
        let distinct = path.iter().collect::<std::collections::BTreeSet<_>>().len() == path.len();
        if distinct {
            prop_assert_eq!(res.total_len(), want.len());
        }
    }

    #[test]
    fn multi_state_triggers_still_chain(seed in 0u64..1_000_000) {
        let r = random_model(seed, RandomParams::sample(seed, false, true));
        let sg = StateGraph::build(&r.model, 1 << 16).unwrap();
        let want = oracle_on_graph(&sg, &r.props, &r.init, &r.fin).unwrap().unwrap();
        let res = generate_chain(&r.model, &r.props, &r.init, &r.fin, &Config::default()).unwrap();
        check_chains(&r, &res);
        prop_assert_eq!(res.reports.len(), 1);
        prop_assert!(res.total_len() >= want.len());
        prop_assert_ne!(res.status, Status::MultiChain);
    }
}

fn golden(seed: u64) -> String {
    let r = random_model(seed, RandomParams::sample(seed, seed % 2 == 0, true));
    let res = generate_chain(&r.model, &r.props, &r.init, &r.fin, &Config { seed, ..Config::default() }).unwrap();
    let sg = StateGraph::build(&r.model, 1 << 16).unwrap();
    let best = oracle_on_graph(&sg, &r.props, &r.init, &r.fin).unwrap().unwrap().len();
    assert!(res.total_len() >= best);
    check_chains(&r, &res);
    let mut out = format!("seed {seed}\nstatus {}\nlength {}\noptimum {best}\n", res.status.as_str(), res.total_len());
    for rep in &res.reports {
        out += &format!("path {}\nweights {:?}\n", rep.path.join(" "), rep.weights);
        for (i, s) in rep.chain.inputs.iter().zip(rep.chain.trace.iter().skip(1)) {
            out += &format!("  {} -> {}\n", r.model.format_input(i), r.model.format_state(s));
        }
    }
    out
}

#[test]
fn golden_random_models() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for seed in [3u64, 17, 42] {
        let got = golden(seed);
        let file = dir.join(format!("random_{seed}.txt"));
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&file, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&file)
            .unwrap_or_else(|_| panic!("missing {}; rerun with UPDATE_GOLDEN=1", file.display()));
        assert_eq!(got, want, "seed {seed}");
    }
}
