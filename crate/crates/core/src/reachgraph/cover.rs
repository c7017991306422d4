use super::{Closure, ReachGraph};

/// Why no covering path exists, stated over the transitive closure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lemma1Report {
    /// Property groups none of whose members is reachable from `I`.
    pub unreachable: Vec<usize>,
    /// Property groups none of whose members reaches `F`.
    pub dead_ends: Vec<usize>,
    /// Pairs of groups with no mutually ordered visitable members.
    pub incomparable: Vec<(usize, usize)>,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.unreachable.is_empty() && self.dead_ends.is_empty() && self.incomparable.is_empty()
    }
}

fn visitable(g: &ReachGraph, c: &Closure, v: usize) -> bool {
    c.reaches(ReachGraph::INIT, v) && c.reaches(v, g.final_vertex())
}

fn comparable(c: &Closure, a: usize, b: usize) -> bool {
    c.reaches(a, b) || c.reaches(b, a)
}

/// Evaluates the three covering-path conditions group by group: some member
/// reachable from `I`, some member reaching `F`, and for each pair of groups
/// some visitable members that are ordered by reachability.
pub fn lemma1(g: &ReachGraph, c: &Closure) -> Lemma1Report {
    let groups = g.property_groups();
    let mut r = Lemma1Report::default();
    if !c.reaches(ReachGraph::INIT, g.final_vertex()) {
        r.dead_ends.push(ReachGraph::INIT);
    }
    for (&id, members) in &groups {
        if !members.iter().any(|&v| c.reaches(ReachGraph::INIT, v)) {
            r.unreachable.push(id);
        }
        if !members.iter().any(|&v| c.reaches(v, g.final_vertex())) {
            r.dead_ends.push(id);
        }
    }
    let ids: Vec<usize> = groups.keys().copied().collect();
    for (x, &a) in ids.iter().enumerate() {
        for &b in &ids[x + 1..] {
            let ok = groups[&a]
                .iter()
                .any(|&u| visitable(g, c, u) && groups[&b].iter().any(|&v| visitable(g, c, v) && comparable(c, u, v)));
            if !ok {
                r.incomparable.push((a, b));
            }
        }
    }
    r
}

/// One visitable member per property group such that the chosen members
/// are pairwise ordered by reachability. Lowest vertex index first.
pub fn choose_members(g: &ReachGraph, c: &Closure) -> Option<Vec<usize>> {
    if !c.reaches(ReachGraph::INIT, g.final_vertex()) {
        return None;
    }
    let groups: Vec<Vec<usize>> =
        g.property_groups().into_values().map(|ms| ms.into_iter().filter(|&v| visitable(g, c, v)).collect()).collect();
    let mut chosen = Vec::with_capacity(groups.len());
    if pick(&groups, c, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn pick(groups: &[Vec<usize>], c: &Closure, chosen: &mut Vec<usize>) -> bool {
    let Some(members) = groups.get(chosen.len()) else {
        return true;
    };
    for &v in members {
        if chosen.iter().all(|&u| comparable(c, u, v)) {
            chosen.push(v);
            if pick(groups, c, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

pub fn exists_covering_path(g: &ReachGraph) -> bool {
    choose_members(g, &Closure::of_edges(g.len(), g.edges())).is_some()
}

/// Builds a covering path over closure edges by insertion: each chosen
/// member goes right after the last path vertex that reaches it. The result
/// starts at `I`, ends at `F` and visits one member of every group.
pub fn get_covering_path(g: &ReachGraph, c: &Closure) -> Option<Vec<usize>> {
    let members = choose_members(g, c)?;
    let mut path = vec![ReachGraph::INIT];
    for v in members {
        let p = (0..path.len()).rev().find(|&p| c.reaches(path[p], v))?;
        path.insert(p + 1, v);
    }
    path.push(g.final_vertex());
    Some(path)
}
