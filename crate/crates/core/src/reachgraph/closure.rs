use std::collections::BTreeMap;

/// All-pairs shortest paths (Floyd–Warshall) with intermediate-vertex
/// pointers, so every closure edge can be expanded back into original edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    n: usize,
    dist: Vec<Vec<Option<usize>>>,
    via: Vec<Vec<Option<usize>>>,
}

impl Closure {
    pub fn of_edges(n: usize, edges: &BTreeMap<(usize, usize), usize>) -> Closure {
        let mut dist = vec![vec![None; n]; n];
        for (&(a, b), &w) in edges {
            let d: &mut Option<usize> = &mut dist[a][b];
            if d.map_or(true, |x| w < x) {
                *d = Some(w);
            }
        }
        let mut via = vec![vec![None; n]; n];
        for m in 0..n {
            for a in 0..n {
                let Some(am) = dist[a][m] else { continue };
                for b in 0..n {
                    let Some(mb) = dist[m][b] else { continue };
                    if dist[a][b].map_or(true, |ab| am + mb < ab) {
                        dist[a][b] = Some(am + mb);
                        via[a][b] = Some(m);
                    }
                }
            }
        }
        Closure { n, dist, via }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Shortest path weight from `a` to `b`; on the diagonal, the shortest cycle.
    pub fn weight(&self, a: usize, b: usize) -> Option<usize> {
        self.dist[a][b]
    }

    /// Reflexive reachability.
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        a == b || self.dist[a][b].is_some()
    }

    pub fn edges(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if let Some(w) = self.dist[a][b] {
                    out.insert((a, b), w);
                }
            }
        }
        out
    }

    /// Vertex sequence of a shortest path from `a` to `b`, both included.
    pub fn expand(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        self.dist[a][b]?;
        let mut out = vec![a];
        self.expand_into(a, b, &mut out);
        Some(out)
    }

    fn expand_into(&self, a: usize, b: usize, out: &mut Vec<usize>) {
        match self.via[a][b] {
            None => out.push(b),
            Some(m) => {
                self.expand_into(a, m, out);
                self.expand_into(m, b, out);
            }
        }
    }

    /// Expands a path of closure edges into original edges.
    pub fn expand_path(&self, path: &[usize]) -> Option<Vec<usize>> {
        let Some(&first) = path.first() else {
            return Some(vec![]);
        };
        let mut out = vec![first];
        for w in path.windows(2) {
            let seg = self.expand(w[0], w[1])?;
            out.extend_from_slice(&seg[1..]);
        }
        Some(out)
    }
}
