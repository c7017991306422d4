use std::time::Instant;

use super::{Assignment, Limits, Lit, SatSolver, SolveResult, SolverStats, Var};

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Binary max-heap over variables ordered by activity.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.pos[v as usize] = Some(self.heap.len() - 1);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

/// Conflict-driven clause-learning solver: two watched literals, VSIDS,
/// phase saving, Luby restarts, learnt-clause reduction, and assumptions
/// with final-conflict cores.
#[derive(Debug)]
pub struct Cdcl {
    ok: bool,
    clauses: Vec<Clause>,
    learnts: usize,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    max_learnts: f64,
    limits: Limits,
    stats: SolverStats,
    #[cfg(debug_assertions)]
    original: Vec<Vec<Lit>>,
}

impl Default for Cdcl {
    fn default() -> Self {
        Self::new()
    }
}

enum Search {
    Sat,
    Unsat(Vec<Lit>),
    Restart,
    Unknown,
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Cdcl {
    pub fn new() -> Self {
        Cdcl {
            ok: true,
            clauses: vec![],
            learnts: 0,
            watches: vec![],
            assigns: vec![],
            level: vec![],
            reason: vec![],
            trail: vec![],
            trail_lim: vec![],
            qhead: 0,
            activity: vec![],
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarHeap::default(),
            polarity: vec![],
            seen: vec![],
            max_learnts: 0.0,
            limits: Limits::default(),
            stats: SolverStats::default(),
            #[cfg(debug_assertions)]
            original: vec![],
        }
    }

    /// Builds a solver holding the clauses of `cnf`.
    pub fn from_cnf(cnf: &super::Cnf) -> Self {
        let mut s = Cdcl::new();
        while s.num_vars() < cnf.num_vars {
            s.new_var();
        }
        for c in &cnf.clauses {
            s.add_clause(c);
        }
        s
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assigns[l.var().index()];
        if l.is_negated() {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.is_negated() { FALSE } else { TRUE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let keep = self.trail_lim[lvl];
        for i in (keep..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.polarity[v] = !l.is_negated();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(lvl);
        self.qhead = keep;
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, activity: 0.0 });
        if learnt {
            self.learnts += 1;
        }
        cref
    }

    /// Unit propagation; returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.code()].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backtrack level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit::pos(Var(0))];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level() as u32;
        loop {
            self.bump_clause(confl as usize);
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var().index()];
            self.seen[lit.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by the rest of the clause
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var().index()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var().index();
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                kept.push(l);
            }
        }
        for l in &learnt {
            self.seen[l.var().index()] = false;
        }
        let mut learnt = kept;
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var().index()] as usize;
        }
        (learnt, bt)
    }

    /// Assumptions responsible for `p` (an assumption) being false.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut core = vec![p];
        if self.decision_level() == 0 {
            return core;
        }
        self.seen[p.var().index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            if !self.seen[v] {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                if !core.contains(&l) {
                    core.push(l);
                }
            } else {
                for k in 1..self.clauses[r as usize].lits.len() {
                    let q = self.clauses[r as usize].lits[k];
                    if self.level[q.var().index()] > 0 {
                        self.seen[q.var().index()] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var().index()] = false;
        core
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), !self.polarity[v as usize]));
            }
        }
        None
    }

    fn out_of_budget(&self, conflicts_at_start: u64) -> bool {
        if let Some(b) = self.limits.conflicts {
            if self.stats.conflicts - conflicts_at_start >= b {
                return true;
            }
        }
        match self.limits.deadline {
            Some(d) => Instant::now() >= d,
            None => false,
        }
    }

    fn search(&mut self, nof_conflicts: u64, assumptions: &[Lit], start_conflicts: u64) -> Search {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Search::Unsat(vec![]);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if conflicts % 64 == 0 && self.out_of_budget(start_conflicts) {
                    return Search::Unknown;
                }
                continue;
            }
            if conflicts >= nof_conflicts {
                return Search::Restart;
            }
            if self.limits.conflicts.is_some_and(|b| self.stats.conflicts - start_conflicts >= b) {
                return Search::Unknown;
            }
            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value(p) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => return Search::Unsat(self.analyze_final(p)),
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => {
                    self.stats.decisions += 1;
                    if self.stats.decisions % 4096 == 0 && self.out_of_budget(start_conflicts) {
                        return Search::Unknown;
                    }
                    match self.pick_branch() {
                        Some(l) => l,
                        None => return Search::Sat,
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }

    /// Removes the less active half of the learnt clauses. Only called at
    /// decision level 0, where no reason pointers are needed.
    fn reduce_db(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let mut acts: Vec<f64> =
            self.clauses.iter().filter(|c| c.learnt && c.lits.len() > 2).map(|c| c.activity).collect();
        if acts.is_empty() {
            return;
        }
        acts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cutoff = acts[acts.len() / 2];
        let old = std::mem::take(&mut self.clauses);
        for r in &mut self.reason {
            *r = NO_REASON;
        }
        for w in &mut self.watches {
            w.clear();
        }
        self.learnts = 0;
        for c in old {
            if c.learnt && c.lits.len() > 2 && c.activity < cutoff {
                continue;
            }
            let cref = self.clauses.len() as u32;
            self.watches[c.lits[0].code()].push(Watch { cref, blocker: c.lits[1] });
            self.watches[c.lits[1].code()].push(Watch { cref, blocker: c.lits[0] });
            if c.learnt {
                self.learnts += 1;
            }
            self.clauses.push(c);
        }
    }

    #[cfg(debug_assertions)]
    fn check_model(&self, assumptions: &[Lit]) {
        for c in &self.original {
            assert!(c.iter().any(|&l| self.value(l) == TRUE), "model violates clause {c:?}");
        }
        for &a in assumptions {
            assert_eq!(self.value(a), TRUE, "model violates assumption {a:?}");
        }
    }
}

impl SatSolver for Cdcl {
    fn new_var(&mut self) -> Var {
        let v = self.assigns.len();
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.polarity.push(false);
        self.seen.push(false);
        self.watches.push(vec![]);
        self.watches.push(vec![]);
        self.order.grow(v + 1);
        self.order.insert(v as u32, &self.activity);
        Var(v as u32)
    }

    fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert_eq!(self.decision_level(), 0);
        for l in lits {
            while l.var().index() >= self.num_vars() {
                self.new_var();
            }
        }
        #[cfg(debug_assertions)]
        self.original.push(lits.to_vec());
        if !self.ok {
            return;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if c.iter().any(|&l| self.value(l) == TRUE) {
            return;
        }
        c.retain(|&l| self.value(l) != FALSE);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(c, false);
            }
        }
    }

    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.stats.solves += 1;
        for l in assumptions {
            while l.var().index() >= self.num_vars() {
                self.new_var();
            }
        }
        if !self.ok {
            return SolveResult::Unsat(vec![]);
        }
        let start = self.stats.conflicts;
        let originals = self.clauses.len() - self.learnts;
        self.max_learnts = self.max_learnts.max(originals as f64 / 3.0 + 2000.0);
        let mut restarts = 0u64;
        let result = loop {
            let budget = (luby(2.0, restarts) * 100.0) as u64;
            match self.search(budget, assumptions, start) {
                Search::Sat => {
                    #[cfg(debug_assertions)]
                    self.check_model(assumptions);
                    let model = self.assigns.iter().map(|&a| a == TRUE).collect();
                    break SolveResult::Sat(Assignment(model));
                }
                Search::Unsat(core) => break SolveResult::Unsat(core),
                Search::Unknown => break SolveResult::Unknown,
                Search::Restart => {
                    restarts += 1;
                    self.cancel_until(0);
                    if self.learnts as f64 > self.max_learnts {
                        self.reduce_db();
                        self.max_learnts *= 1.1;
                    }
                    if self.out_of_budget(start) {
                        break SolveResult::Unknown;
                    }
                }
            }
        };
        self.cancel_until(0);
        result
    }

    fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    fn stats(&self) -> SolverStats {
        self.stats
    }
}
