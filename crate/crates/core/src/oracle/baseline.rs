use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OracleError, StateGraph, DEFAULT_NODE_LIMIT};
use crate::model::{Expr, InputVec, Model, Property};

/// Outcome of random testing with suite minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    /// Selected test cases, each starting in an initial state and ending in `F`.
    pub tests: Vec<Vec<InputVec>>,
    /// Fraction of properties covered by the selected tests.
    pub coverage: f64,
    /// Sum of the selected test lengths.
    pub total_len: usize,
    /// Steps simulated.
    pub steps: usize,
}

/// Random walks from an initial state, each cut at its last visit to `F`,
/// until `budget` steps are spent; then a greedy weighted set cover picks
/// tests by new properties per step.
pub fn random_baseline(
    model: &Model,
    props: &[Property],
    init: &Expr,
    fin: &Expr,
    budget: usize,
    seed: u64,
) -> Result<Baseline, OracleError> {
    let g = StateGraph::build(model, DEFAULT_NODE_LIMIT)?;
    let starts = g.states_where(init)?;
    let finals: BTreeSet<usize> = g.states_where(fin)?.into_iter().collect();
    let walk_len = (2 * g.len()).max(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<(Vec<usize>, u64)> = vec![];
    let mut steps = 0;
    while steps < budget && !starts.is_empty() && !g.inputs.is_empty() {
        let mut s = starts[rng.gen_range(0..starts.len())];
        let len = rng.gen_range(1..=walk_len).min(budget - steps);
        let mut inputs = vec![];
        let mut mask = 0u64;
        let mut best: Option<(usize, u64)> = finals.contains(&s).then_some((0, 0));
        for _ in 0..len {
            let i = rng.gen_range(0..g.inputs.len());
            let Some(t) = g.successor(s, i) else { break };
            mask |= g.cover_mask(props, s, i)?;
            inputs.push(i);
            s = t;
            if finals.contains(&s) {
                best = Some((inputs.len(), mask));
            }
        }
        steps += len;
        if let Some((cut, m)) = best {
            if m != 0 {
                inputs.truncate(cut);
                candidates.push((inputs, m));
            }
        }
    }

    let mut covered = 0u64;
    let mut chosen = vec![];
    loop {
        let pick = candidates
            .iter()
            .enumerate()
            .filter(|(_, (_, m))| m & !covered != 0)
            .max_by(|(x, (a, ma)), (y, (b, mb))| {
                let ra = (ma & !covered).count_ones() as f64 / a.len().max(1) as f64;
                let rb = (mb & !covered).count_ones() as f64 / b.len().max(1) as f64;
                ra.partial_cmp(&rb).unwrap().then(y.cmp(x))
            })
            .map(|(n, _)| n);
        let Some(n) = pick else { break };
        covered |= candidates[n].1;
        chosen.push(n);
    }
    let tests: Vec<Vec<InputVec>> =
        chosen.iter().map(|&n| candidates[n].0.iter().map(|&i| g.inputs[i].clone()).collect()).collect();
    let coverage = if props.is_empty() { 1.0 } else { covered.count_ones() as f64 / props.len() as f64 };
    let total_len = tests.iter().map(Vec::len).sum();
    Ok(Baseline { tests, coverage, total_len, steps })
}
