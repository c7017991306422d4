use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Asymmetric TSP instance; `None` marks a missing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtspInstance {
    pub cost: Vec<Vec<Option<u64>>>,
    /// The designated return edge, if any.
    pub ret: Option<(usize, usize)>,
}

/// A circuit starting at vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: u64,
}

pub const EXACT_LIMIT: usize = 16;

impl AtspInstance {
    pub fn new(cost: Vec<Vec<Option<u64>>>) -> Self {
        let n = cost.len();
        assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");
        AtspInstance { cost, ret: None }
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    /// Cost of the circuit through `order`, or `None` if it uses a missing edge.
    pub fn tour_cost(&self, order: &[usize]) -> Option<u64> {
        if order.len() < 2 {
            return Some(0);
        }
        let mut total = 0;
        for (x, &a) in order.iter().enumerate() {
            let b = order[(x + 1) % order.len()];
            total += self.cost[a][b]?;
        }
        Some(total)
    }
}

/// Held–Karp dynamic programming over subsets. Refuses instances larger
/// than [`EXACT_LIMIT`]; returns `Ok(None)` when no circuit exists.
pub fn solve_exact(inst: &AtspInstance) -> Result<Option<Tour>, String> {
    let n = inst.len();
    if n > EXACT_LIMIT {
        return Err(format!("{n} vertices exceed the exact limit of {EXACT_LIMIT}"));
    }
    if n <= 1 {
        return Ok(Some(Tour { order: (0..n).collect(), cost: 0 }));
    }
    const INF: u64 = u64::MAX;
    let m = n - 1; // vertices 1..n are bits 0..m
    let full = (1usize << m) - 1;
    let mut dp = vec![INF; (1 << m) * m];
    let mut parent = vec![usize::MAX; (1 << m) * m];
    for j in 0..m {
        if let Some(c) = inst.cost[0][j + 1] {
            dp[(1 << j) * m + j] = c;
        }
    }
    for mask in 1..=full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if cur == INF || mask & (1 << j) == 0 {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let Some(c) = inst.cost[j + 1][k + 1] else {
                    continue;
                };
                let next = mask | (1 << k);
                if cur + c < dp[next * m + k] {
                    dp[next * m + k] = cur + c;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let mut best: Option<(u64, usize)> = None;
    for j in 0..m {
        let (cur, Some(back)) = (dp[full * m + j], inst.cost[j + 1][0]) else {
            continue;
        };
        if cur != INF && best.map_or(true, |(b, _)| cur + back < b) {
            best = Some((cur + back, j));
        }
    }
    let Some((cost, mut last)) = best else {
        return Ok(None);
    };
    let mut rev = vec![];
    let mut mask = full;
    loop {
        rev.push(last + 1);
        let p = parent[mask * m + last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    rev.push(0);
    rev.reverse();
    Ok(Some(Tour { order: rev, cost }))
}

/// Nearest-neighbour construction followed by segment-exchange local search
/// (Or-opt moves and orientation-preserving 3-opt) with seeded random
/// restarts. Missing edges are priced above every finite tour, and a result
/// that still uses one is discarded.
pub fn solve_heuristic(inst: &AtspInstance, seed: u64) -> Option<Tour> {
    let n = inst.len();
    if n <= 1 {
        return Some(Tour { order: (0..n).collect(), cost: 0 });
    }
    let finite: u64 = inst.cost.iter().flatten().flatten().sum();
    let big = finite + 1;
    let c: Vec<Vec<u64>> = inst.cost.iter().map(|r| r.iter().map(|x| x.unwrap_or(big)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best = nearest_neighbour(&c);
    local_search(&c, &mut best);
    let mut best_cost = penalised(&c, &best);
    let restarts = 4 + 2 * n;
    for _ in 0..restarts {
        let mut t = best.clone();
        perturb(&mut t, &mut rng);
        local_search(&c, &mut t);
        let tc = penalised(&c, &t);
        if tc < best_cost {
            best = t;
            best_cost = tc;
        }
    }
    inst.tour_cost(&best).map(|cost| Tour { order: best, cost })
}

fn penalised(c: &[Vec<u64>], t: &[usize]) -> u64 {
    (0..t.len()).map(|x| c[t[x]][t[(x + 1) % t.len()]]).sum()
}

fn nearest_neighbour(c: &[Vec<u64>]) -> Vec<usize> {
    let n = c.len();
    let mut seen = vec![false; n];
    let mut t = vec![0];
    seen[0] = true;
    while t.len() < n {
        let a = *t.last().unwrap();
        let b = (0..n).filter(|&b| !seen[b]).min_by_key(|&b| (c[a][b], b)).unwrap();
        seen[b] = true;
        t.push(b);
    }
    t
}

/// Double-bridge style kick: swap two random adjacent segments.
fn perturb(t: &mut [usize], rng: &mut ChaCha8Rng) {
    let n = t.len();
    if n < 4 {
        return;
    }
    let mut cuts: Vec<usize> = (1..n).collect::<Vec<_>>().choose_multiple(rng, 3.min(n - 1)).copied().collect();
    cuts.sort_unstable();
    if cuts.len() < 3 {
        return;
    }
    let (i, j, k) = (cuts[0], cuts[1], cuts[2]);
    if rng.gen_bool(0.5) {
        t[i..k].rotate_left(j - i);
    } else {
        t[i..].rotate_left(k - i);
    }
}

/// First-improvement search over swaps of adjacent segments
/// `t[i+1..=j]` and `t[j+1..=k]`. Vertex 0 never moves.
fn local_search(c: &[Vec<u64>], t: &mut [usize]) {
    let n = t.len();
    if n < 3 {
        return;
    }
    let next = |t: &[usize], x: usize| t[(x + 1) % n];
    let mut improved = true;
    while improved {
        improved = false;
        'outer: for i in 0..n - 2 {
            for j in i + 1..n - 1 {
                for k in j + 1..n {
                    let (a, b) = (t[i], t[i + 1]);
                    let (d, e) = (t[j], t[j + 1]);
                    let (f, g) = (t[k], next(t, k));
                    let old = c[a][b] + c[d][e] + c[f][g];
                    let new = c[a][e] + c[f][b] + c[d][g];
                    if new < old {
                        t[i + 1..=k].rotate_left(j - i);
                        improved = true;
                        break 'outer;
                    }
                }
            }
        }
    }
}
