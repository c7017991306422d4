use crate::bmc::{pin_at, states_satisfying, BmcError, Pin, Unrolling};
use crate::reachgraph::ReachGraph;
use crate::sat::SolveResult;

/// Outcome of [`repair_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repair {
    /// Stretched weights for the whole path and the number of increments.
    Repaired { weights: Vec<usize>, increments: usize },
    /// Path positions `(j-1, j, j+1)` around the edge that could not be stretched.
    Failed { triple: (usize, usize, usize) },
}

/// Stretches the weights of edges `start..end` of `path` one at a time.
///
/// Starting from a concrete state `σ` of the first vertex, each edge weight
/// is increased until some trace of that length leads from `σ` into the
/// next trigger, or the weight exceeds `k_max`; `σ` then advances to the
/// reached state. Up to `witnesses` different start states are tried.
pub fn repair_path(
    u: &mut Unrolling<'_>,
    path: &[Pin],
    weights: &[usize],
    start: usize,
    end: usize,
    k_max: usize,
    witnesses: usize,
) -> Result<Repair, BmcError> {
    let sigmas = states_satisfying(u, &path[start].trigger, witnesses.max(1))?;
    let mut first_failure = None;
    for sigma in sigmas {
        let mut w = weights.to_vec();
        let mut cur = sigma;
        let mut increments = 0;
        let mut failed = None;
        // pins that share the current step; one input must satisfy them all
        let mut here = vec![start];
        'edges: for j in start..end {
            loop {
                let mut query = vec![u.state_is(0, &cur)];
                for &h in &here {
                    query.push(pin_at(u, &path[h], 0, true));
                }
                query.push(pin_at(u, &path[j + 1], w[j], true));
                if let SolveResult::Sat(m) = u.solve(&query)? {
                    cur = u.decode_state(&m, w[j]);
                    if w[j] > 0 {
                        here.clear();
                    }
                    here.push(j + 1);
                    break;
                }
                if w[j] >= k_max {
                    failed = Some(j);
                    break 'edges;
                }
                w[j] += 1;
                increments += 1;
            }
        }
        match failed {
            None => return Ok(Repair::Repaired { weights: w, increments }),
            Some(j) => {
                first_failure.get_or_insert(j);
            }
        }
    }
    let j = first_failure.unwrap_or(start);
    let last = path.len() - 1;
    let triple = if j >= 1 { (j - 1, j, j + 1) } else { (0, 1, 2.min(last)) };
    Ok(Repair::Failed { triple })
}

/// Splits `v` so that the spurious pairing of incoming `(a, v)` with
/// outgoing `(v, b)` disappears: a clone takes over `(a, v)` and every
/// outgoing edge except the one to `b`.
///
/// The clone's incoming weight is `W(a, v)`; with `literal` it is `W(a, b)`
/// when that edge exists.
pub fn refine(g: &ReachGraph, a: usize, v: usize, b: usize, literal: bool) -> (ReachGraph, usize) {
    let mut out = g.clone();
    let direct = g.weight(a, v).expect("split needs the incoming edge");
    let w_in = if literal { g.weight(a, b).unwrap_or(direct) } else { direct };
    let clone = out.add_clone(v);
    out.remove_edge(a, v);
    out.set_weight(a, clone, w_in);
    for (&(x, y), &w) in g.edges() {
        if x == v && y != b {
            out.set_weight(clone, y, w);
        }
    }
    (out, clone)
}
