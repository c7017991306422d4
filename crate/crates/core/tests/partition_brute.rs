//! Property partitioning against exhaustive search over set partitions.

mod common;

use std::collections::BTreeSet;

use chainforge::engine::partition_properties;
use chainforge::reachgraph::{lemma1, Closure, ReachGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fewest classes such that each class alone has a covering path.
fn brute_min_classes(g: &ReachGraph, groups: &[usize]) -> usize {
    fn rec(g: &ReachGraph, rest: &[usize], classes: &mut Vec<BTreeSet<usize>>, best: &mut usize) {
        if classes.len() >= *best {
            return;
        }
        let Some((&v, tail)) = rest.split_first() else {
            *best = classes.len();
            return;
        };
        for k in 0..classes.len() {
            classes[k].insert(v);
            if common::brute_cover_exists(&g.require_only(&classes[k])) {
                rec(g, tail, classes, best);
            }
            classes[k].remove(&v);
        }
        classes.push(BTreeSet::from([v]));
        rec(g, tail, classes, best);
        classes.pop();
    }
    let mut best = groups.len().max(1) + 1;
    rec(g, groups, &mut vec![], &mut best);
    best
}

#[test]
fn classes_are_valid_and_near_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut tried, mut optimal) = (0, 0);
    while tried < 300 {
        let g = common::random_graph(&mut rng, 8);
        let c = Closure::of_edges(g.len(), g.edges());
        let r = lemma1(&g, &c);
        if !r.unreachable.is_empty() || !r.dead_ends.is_empty() {
            continue;
        }
        tried += 1;
        let groups: Vec<usize> = g.property_groups().into_keys().collect();
        let classes = partition_properties(&g).unwrap();
        let mut seen = BTreeSet::new();
        for class in &classes {
            assert!(!class.is_empty() || groups.is_empty());
            assert!(class.iter().all(|v| seen.insert(*v)), "classes overlap: {classes:?}");
            assert!(common::brute_cover_exists(&g.require_only(class)), "class {class:?} has no covering path");
        }
        assert_eq!(seen, groups.iter().copied().collect::<BTreeSet<_>>());
        let best = brute_min_classes(&g, &groups);
        assert!(classes.len() >= best);
        optimal += (classes.len() == best.max(1)) as usize;
    }
    // the pairwise construction is a heuristic for a minimum partition
    assert!(optimal * 100 >= tried * 90, "optimal in {optimal} of {tried}");
}
