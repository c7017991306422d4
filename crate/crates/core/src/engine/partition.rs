use std::collections::BTreeSet;

use super::EngineError;
use crate::reachgraph::{exists_covering_path, lemma1, Closure, ReachGraph};

type Pm = (BTreeSet<usize>, BTreeSet<usize>);

/// Splits the required groups of `g` into classes that each admit a
/// covering path.
///
/// Conflicting pairs are those without a reachability order. For every such
/// pair the candidate classes `(P+, P-)` are extended or duplicated, `P-`
/// collecting vertices barred from `P+`; a minimum set cover over the `P+`
/// sets picks the classes, and vertices in no conflict join the largest one.
pub fn partition_properties(g: &ReachGraph) -> Result<Vec<BTreeSet<usize>>, EngineError> {
    let c = Closure::of_edges(g.len(), g.edges());
    let report = lemma1(g, &c);
    if let Some(&v) = report.unreachable.iter().next() {
        return Err(EngineError::Unchainable {
            vertex: g.name(v),
            reason: "not reachable from the initial states".into(),
        });
    }
    if let Some(&v) = report.dead_ends.iter().find(|&&v| v != ReachGraph::INIT) {
        return Err(EngineError::Unchainable { vertex: g.name(v), reason: "cannot reach the final states".into() });
    }
    let all: BTreeSet<usize> = g.property_groups().into_keys().collect();
    let mut q = all.clone();
    let mut s: Vec<Pm> = vec![];
    for &(vi, vj) in &report.incomparable {
        q.remove(&vi);
        q.remove(&vj);
        if s.is_empty() {
            s = vec![([vi].into(), [vj].into()), ([vj].into(), [vi].into())];
            continue;
        }
        let mut next = Vec::with_capacity(s.len());
        for (mut pp, mut pm) in s {
            let (i_p, j_p, i_m, j_m) = (pp.contains(&vi), pp.contains(&vj), pm.contains(&vi), pm.contains(&vj));
            if i_p && j_p {
                continue;
            } else if i_m && !j_m && !j_p {
                pp.insert(vj);
            } else if !i_m && !j_m && j_p {
                pm.insert(vi);
            } else if j_m && !i_m && !i_p {
                pp.insert(vi);
            } else if !j_m && !i_m && i_p {
                pm.insert(vj);
            } else if !i_p && !i_m && !j_p && !j_m {
                let mut alt = (pp.clone(), pm.clone());
                alt.0.insert(vi);
                alt.1.insert(vj);
                next.push(alt);
                pp.insert(vj);
                pm.insert(vi);
            }
            next.push((pp, pm));
        }
        s = next;
    }
    let mut classes: Vec<BTreeSet<usize>> = if report.incomparable.is_empty() {
        vec![all.clone()]
    } else {
        let universe: BTreeSet<usize> = all.difference(&q).copied().collect();
        let sets: Vec<BTreeSet<usize>> = s.into_iter().map(|(p, _)| p).collect();
        let mut chosen = min_cover(&universe, &sets);
        let covered: BTreeSet<usize> = chosen.iter().flatten().copied().collect();
        chosen.extend(universe.difference(&covered).map(|&v| BTreeSet::from([v])));
        let mut seen = BTreeSet::new();
        let mut out = vec![];
        for set in chosen {
            let own: BTreeSet<usize> = set.difference(&seen).copied().collect();
            seen.extend(own.iter().copied());
            if !own.is_empty() {
                out.push(own);
            }
        }
        if let Some(big) = out.iter_mut().max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a))) {
            big.extend(q.iter().copied());
        }
        out
    };
    // guard: a class that still lacks a covering path is split greedily
    let mut verified = vec![];
    for class in classes.drain(..) {
        if exists_covering_path(&g.require_only(&class)) {
            verified.push(class);
            continue;
        }
        let mut parts: Vec<BTreeSet<usize>> = vec![];
        for v in class {
            let slot = parts.iter().position(|p| {
                let mut t = p.clone();
                t.insert(v);
                exists_covering_path(&g.require_only(&t))
            });
            match slot {
                Some(i) => {
                    parts[i].insert(v);
                }
                None => parts.push(BTreeSet::from([v])),
            }
        }
        verified.extend(parts);
    }
    verified.sort();
    Ok(verified)
}

/// Smallest subfamily of `sets` covering `universe`: exhaustive by size for
/// up to 20 sets, greedy beyond. Elements in no set stay uncovered.
pub fn min_cover(universe: &BTreeSet<usize>, sets: &[BTreeSet<usize>]) -> Vec<BTreeSet<usize>> {
    let reachable: BTreeSet<usize> = sets.iter().flat_map(|s| s.intersection(universe)).copied().collect();
    if sets.len() <= 20 {
        for size in 1..=sets.len() {
            if let Some(pick) = combination_cover(&reachable, sets, size) {
                return pick.into_iter().map(|i| sets[i].clone()).collect();
            }
        }
        return vec![];
    }
    let mut left = reachable;
    let mut out = vec![];
    while !left.is_empty() {
        let best = sets.iter().max_by_key(|s| s.intersection(&left).count()).unwrap();
        left.retain(|v| !best.contains(v));
        out.push(best.clone());
    }
    out
}

fn combination_cover(target: &BTreeSet<usize>, sets: &[BTreeSet<usize>], size: usize) -> Option<Vec<usize>> {
    fn rec(target: &BTreeSet<usize>, sets: &[BTreeSet<usize>], size: usize, from: usize, acc: &mut Vec<usize>) -> bool {
        if acc.len() == size {
            return target.iter().all(|v| acc.iter().any(|&i| sets[i].contains(v)));
        }
        for i in from..sets.len() {
            acc.push(i);
            if rec(target, sets, size, i + 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = vec![];
    rec(target, sets, size, 0, &mut acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::Pin;
    use crate::model::Expr;

    fn graph(n_props: usize, edges: &[(usize, usize)]) -> ReachGraph {
        let pins: Vec<Pin> = (0..n_props + 2).map(|i| Pin::states(format!("v{i}"), Expr::tt())).collect();
        let mut g = ReachGraph::new(pins);
        for &(a, b) in edges {
            g.set_weight(a, b, 1);
        }
        g
    }

    #[test]
    fn no_conflicts_single_class() {
        let g = graph(2, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(partition_properties(&g).unwrap(), vec![BTreeSet::from([1, 2])]);
    }

    #[test]
    fn mutually_unreachable_pair() {
        let g = graph(2, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(partition_properties(&g).unwrap(), vec![BTreeSet::from([1]), BTreeSet::from([2])]);
    }

    #[test]
    fn two_clusters_and_a_shared_vertex() {
        // 1 -> {2,3} -> ..., 2 <-> 3, 4 <-> 5, clusters {2,3} and {4,5}; 1 precedes all
        let g = graph(5, &[(0, 1), (1, 2), (1, 4), (2, 3), (3, 2), (4, 5), (5, 4), (3, 6), (5, 6)]);
        let p = partition_properties(&g).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.contains(&BTreeSet::from([1, 2, 3])) || p.contains(&BTreeSet::from([1, 4, 5])));
    }

    #[test]
    fn unreachable_vertex_is_unchainable() {
        let g = graph(2, &[(0, 1), (1, 3)]);
        assert!(matches!(partition_properties(&g), Err(EngineError::Unchainable { .. })));
    }

    #[test]
    fn cover_is_minimal() {
        let u: BTreeSet<usize> = (1..=4).collect();
        let sets = vec![BTreeSet::from([1]), BTreeSet::from([2, 3]), BTreeSet::from([1, 4]), BTreeSet::from([1, 2, 3])];
        let c = min_cover(&u, &sets);
        assert_eq!(c.len(), 2);
    }
}
