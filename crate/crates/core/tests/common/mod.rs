//! Independent brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chainforge::bmc::Pin;
use chainforge::model::{eval_bool, BinOp, Env, Expr, Model};
use chainforge::optimizer::AtspInstance;
use chainforge::oracle::StateGraph;
use chainforge::reachgraph::ReachGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Cheapest Hamiltonian circuit by enumerating every permutation of `1..n`.
pub fn brute_atsp(inst: &AtspInstance) -> Option<u64> {
    let n = inst.cost.len();
    if n <= 1 {
        return Some(0);
    }
    fn rec(inst: &AtspInstance, order: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut Option<u64>) {
        let n = used.len();
        if order.len() == n {
            let mut total = 0;
            for k in 0..n {
                match inst.cost[order[k]][order[(k + 1) % n]] {
                    Some(c) => total += c,
                    None => return,
                }
            }
            if best.map_or(true, |b| total < b) {
                *best = Some(total);
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(inst, order, used, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut best = None;
    let mut used = vec![false; n];
    used[0] = true;
    rec(inst, &mut vec![0], &mut used, &mut best);
    best
}

pub fn random_atsp(rng: &mut ChaCha8Rng, n: usize) -> AtspInstance {
    let density = rng.gen_range(0.4..=1.0);
    let cost = (0..n)
        .map(|a| (0..n).map(|b| (a != b && rng.gen_bool(density)).then(|| rng.gen_range(0..20))).collect())
        .collect();
    AtspInstance::new(cost)
}

/// Breadth-first search over (vertex, visited groups) along the raw edges:
/// is there a walk from the initial to the final vertex that meets every
/// required group?
pub fn brute_cover_exists(g: &ReachGraph) -> bool {
    let groups: Vec<usize> = g.property_groups().into_keys().collect();
    let bit = |v: usize| -> u32 {
        if g.is_property(v) && g.is_required(v) {
            1 << groups.iter().position(|&o| o == g.origin(v)).unwrap()
        } else {
            0
        }
    };
    let full = (1u32 << groups.len()) - 1;
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in g.edges().keys() {
        succ.entry(a).or_default().push(b);
    }
    let start = (ReachGraph::INIT, bit(ReachGraph::INIT));
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((v, m)) = queue.pop_front() {
        if v == g.final_vertex() && m == full {
            return true;
        }
        for &w in succ.get(&v).into_iter().flatten() {
            let next = (w, m | bit(w));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// A random reach graph with up to `max_vertices` vertices, some of them
/// clones, some groups optional.
pub fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> ReachGraph {
    let props = rng.gen_range(0..=max_vertices - 2);
    let pins: Vec<Pin> = (0..props + 2).map(|i| Pin::states(format!("v{i}"), Expr::tt())).collect();
    let mut g = ReachGraph::new(pins);
    let spare = max_vertices - g.len();
    if props > 0 {
        for _ in 0..rng.gen_range(0..=spare) {
            let v = rng.gen_range(1..=props);
            g.add_clone(v);
        }
    }
    let density = rng.gen_range(0.1..0.6);
    let n = g.len();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(density) {
                g.set_weight(a, b, rng.gen_range(0..5));
            }
        }
    }
    if props > 1 && rng.gen_bool(0.3) {
        let keep: BTreeSet<usize> = (1..=props).filter(|_| rng.gen_bool(0.6)).collect();
        g = g.require_only(&keep);
    }
    g
}

/// Holds at `(s, i)`: trigger true and, for properties, the check true on the successor.
fn pin_holds(sg: &StateGraph, pin: &Pin, s: usize, i: usize) -> bool {
    let (sv, iv) = (&sg.states[s], &sg.inputs[i]);
    if !eval_bool(&pin.trigger, Env::step(sv, iv)).unwrap() {
        return false;
    }
    match &pin.check {
        None => true,
        Some(c) => match sg.successor(s, i) {
            Some(t) => eval_bool(c, Env::full(sv, iv, &sg.states[t])).unwrap(),
            None => false,
        },
    }
}

/// Least `k >= min_k` such that some trace pins `a` at step 0 and `b` at
/// step `k`, by explicit search.
pub fn kreach_distance(sg: &StateGraph, a: &Pin, b: &Pin, min_k: usize) -> Option<usize> {
    let ni = sg.inputs.len();
    let pairs_a: Vec<(usize, usize)> =
        (0..sg.len()).flat_map(|s| (0..ni).map(move |i| (s, i))).filter(|&(s, i)| pin_holds(sg, a, s, i)).collect();
    if min_k == 0 && pairs_a.iter().any(|&(s, i)| pin_holds(sg, b, s, i)) {
        return Some(0);
    }
    let targets: BTreeSet<usize> = (0..sg.len()).filter(|&s| (0..ni).any(|i| pin_holds(sg, b, s, i))).collect();
    let sources: Vec<usize> = pairs_a.iter().filter_map(|&(s, i)| sg.successor(s, i)).collect();
    let dist = sg.distances(&sources);
    targets.iter().filter_map(|&t| dist[t]).min().map(|d| (d + 1).max(min_k))
}

/// Random Boolean formula over the state variables of `model`, which must
/// all be integers.
pub fn random_formula(rng: &mut ChaCha8Rng, model: &Model, depth: usize) -> Expr {
    let nv = model.state_vars().len();
    if depth == 0 || rng.gen_bool(0.25) {
        let a = Expr::state(rng.gen_range(0..nv));
        let rhs = if rng.gen_bool(0.5) {
            Expr::Int(rng.gen_range(-3..=4))
        } else {
            let other = Expr::state(rng.gen_range(0..nv));
            let op = if rng.gen_bool(0.5) { BinOp::Add } else { BinOp::Sub };
            Expr::binary(op, other, Expr::Int(rng.gen_range(-2..=2)))
        };
        let op = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le][rng.gen_range(0..4)];
        return Expr::binary(op, a, rhs);
    }
    let l = random_formula(rng, model, depth - 1);
    match rng.gen_range(0..5) {
        0 => Expr::not(l),
        1 => Expr::and(l, random_formula(rng, model, depth - 1)),
        2 => Expr::or(l, random_formula(rng, model, depth - 1)),
        3 => Expr::binary(BinOp::Implies, l, random_formula(rng, model, depth - 1)),
        _ => Expr::ite(l, random_formula(rng, model, depth - 1), random_formula(rng, model, depth - 1)),
    }
}
