use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{BinOp, Domain, Expr, Model, ModelBuilder, Property, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    /// Number of states, at most 64.
    pub states: usize,
    pub inputs: usize,
    pub props: usize,
    /// Each trigger holds in exactly one state, and no two properties
    /// share a (state, input) pair.
    pub singleton: bool,
    /// Input 0 walks a random Hamiltonian cycle, so the graph is strongly connected.
    pub connected: bool,
}

impl RandomParams {
    /// Sizes drawn from the seed: 4..=16 states, 2..=3 inputs, 2..=5 properties.
    pub fn sample(seed: u64, singleton: bool, connected: bool) -> RandomParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        RandomParams {
            states: rng.gen_range(4..=16),
            inputs: rng.gen_range(2..=3),
            props: rng.gen_range(2..=5),
            singleton,
            connected,
        }
    }
}

/// A generated model with its transition table.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub model: Model,
    pub props: Vec<Property>,
    pub init: Expr,
    pub fin: Expr,
    /// `table[s][x]` is the successor of state `s` under input `x`.
    pub table: Vec<Vec<usize>>,
}

fn is(var: Expr, v: usize) -> Expr {
    Expr::eq(var, Expr::Int(v as i64))
}

/// A single state variable `s` in `0..states` starting at 0 and one input
/// `x` in `0..inputs`; the transition is a lookup table written as nested
/// conditionals. Deterministic per seed.
pub fn random_model(seed: u64, p: RandomParams) -> RandomModel {
    assert!((2..=64).contains(&p.states) && p.inputs >= 1 && p.props <= 40);
    assert!(!p.singleton || p.props <= p.states * p.inputs, "too many disjoint singleton triggers");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.states;
    let mut table: Vec<Vec<usize>> = (0..n).map(|_| (0..p.inputs).map(|_| rng.gen_range(0..n)).collect()).collect();
    if p.connected {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for k in 0..n {
            table[order[k]][0] = order[(k + 1) % n];
        }
    }

    let mut b = ModelBuilder::new(format!("random{seed}"));
    let s = b.state("s", Domain::int(0, n as i64 - 1).unwrap(), Some(Value::Int(0)));
    let x = b.input("x", Domain::int(0, p.inputs as i64 - 1).unwrap());
    let row = |succ: &[usize]| {
        let mut e = Expr::Int(*succ.last().unwrap() as i64);
        for v in (0..succ.len() - 1).rev() {
            e = Expr::ite(is(Expr::input(x), v), Expr::Int(succ[v] as i64), e);
        }
        e
    };
    let mut t = row(&table[n - 1]);
    for v in (0..n - 1).rev() {
        t = Expr::ite(is(Expr::state(s), v), row(&table[v]), t);
    }
    b.trans(s, t);
    let model = b.build().expect("generated model is well-formed");

    let mut props = vec![];
    // singleton triggers also never share a transition: (state, input) slots are disjoint
    let mut free: Vec<Vec<usize>> = vec![(0..p.inputs).collect(); n];
    let mut capacity = n * p.inputs;
    for j in 0..p.props {
        let (states, input) = if p.singleton {
            let left = p.props - j - 1;
            let mut options: Vec<(usize, Option<usize>)> = vec![];
            for (st, f) in free.iter().enumerate() {
                options.extend(f.iter().map(|&i| (st, Some(i))));
                if f.len() == p.inputs && capacity - p.inputs >= left {
                    options.push((st, None));
                }
            }
            let (st, input) = options[rng.gen_range(0..options.len())];
            match input {
                Some(i) => {
                    free[st].retain(|&x| x != i);
                    capacity -= 1;
                }
                None => {
                    free[st].clear();
                    capacity -= p.inputs;
                }
            }
            (vec![st], input)
        } else {
            let count = rng.gen_range(1..=3.min(n));
            let mut states: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(&mut rng, count).copied().collect();
            states.sort_unstable();
            let input = if rng.gen_bool(0.5) { Some(rng.gen_range(0..p.inputs)) } else { None };
            (states, input)
        };
        let in_states = Expr::any(states.iter().map(|&v| is(Expr::state(s), v)));
        let assume = match input {
            Some(i) => Expr::and(in_states, is(Expr::input(x), i)),
            None => in_states,
        };
        let assert = if rng.gen_bool(0.5) {
            Expr::tt()
        } else {
            // a true statement about the successor
            let mut succs: Vec<usize> = states
                .iter()
                .flat_map(|&v| match input {
                    Some(i) => vec![table[v][i]],
                    None => table[v].clone(),
                })
                .collect();
            succs.sort_unstable();
            succs.dedup();
            let lo = *succs.first().unwrap() as i64;
            let hi = *succs.last().unwrap() as i64;
            Expr::and(
                Expr::binary(BinOp::Le, Expr::Int(lo), Expr::next(s)),
                Expr::binary(BinOp::Le, Expr::next(s), Expr::Int(hi)),
            )
        };
        props.push(Property::new(&model, format!("p{}", j + 1), assume, assert).unwrap());
    }
    let init = is(Expr::state(s), 0);
    let fin = if rng.gen_bool(0.5) { Expr::tt() } else { is(Expr::state(s), rng.gen_range(0..n)) };
    RandomModel { model, props, init, fin, table }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InputVec;
    use crate::oracle::StateGraph;

    #[test]
    fn deterministic_per_seed() {
        let p = RandomParams::sample(3, false, true);
        let a = random_model(3, p);
        let b = random_model(3, p);
        assert_eq!(a.table, b.table);
        assert_eq!(a.props, b.props);
        assert_eq!(a.fin, b.fin);
    }

    #[test]
    fn table_agrees_with_semantics() {
        for seed in 0..10 {
            let r = random_model(seed, RandomParams::sample(seed, seed % 2 == 0, true));
            for (sv, row) in r.table.iter().enumerate() {
                for (xv, &next) in row.iter().enumerate() {
                    let st = crate::model::StateVec(vec![Value::Int(sv as i64)]);
                    let t = r.model.step(&st, &InputVec(vec![Value::Int(xv as i64)])).unwrap();
                    assert_eq!(t.0[0], Value::Int(next as i64));
                }
            }
            assert!(StateGraph::build(&r.model, 1 << 20).unwrap().strongly_connected());
        }
    }
}
