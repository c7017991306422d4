use std::collections::HashMap;

use super::{Assignment, Lit, SatSolver, SolveResult};
use crate::model::{BinOp, Domain, Expr, Value, VarRef};

/// Bit-level integer: `offset + Σ 2^i · bits[i]` (bits unsigned, LSB first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntTerm {
    pub offset: i64,
    pub bits: Vec<Lit>,
}

/// Encoded value of an expression or variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Bool(Lit),
    Int(IntTerm),
    /// Binary index into the enum's constant list, LSB first.
    Enum(Vec<Lit>),
}

impl Term {
    pub fn as_bool(&self) -> Lit {
        match self {
            Term::Bool(l) => *l,
            other => panic!("expected a boolean term, found {other:?}"),
        }
    }

    pub fn lits(&self) -> Vec<Lit> {
        match self {
            Term::Bool(l) => vec![*l],
            Term::Int(t) => t.bits.clone(),
            Term::Enum(b) => b.clone(),
        }
    }
}

/// Number of bits needed to index `n` values.
pub fn width_for(n: u64) -> usize {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as usize
    }
}

/// Tseitin encoder with constant folding and structural hashing of gates.
pub struct Encoder {
    solver: Box<dyn SatSolver>,
    t: Lit,
    and_cache: HashMap<(Lit, Lit), Lit>,
    andn_cache: HashMap<Vec<Lit>, Lit>,
    xor_cache: HashMap<(Lit, Lit), Lit>,
}

impl Encoder {
    pub fn new(mut solver: Box<dyn SatSolver>) -> Self {
        let t = Lit::pos(solver.new_var());
        solver.add_clause(&[t]);
        Encoder { solver, t, and_cache: HashMap::new(), andn_cache: HashMap::new(), xor_cache: HashMap::new() }
    }

    pub fn solver(&mut self) -> &mut dyn SatSolver {
        self.solver.as_mut()
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.solver.solve(assumptions)
    }

    pub fn tt(&self) -> Lit {
        self.t
    }

    pub fn ff(&self) -> Lit {
        !self.t
    }

    pub fn fresh(&mut self) -> Lit {
        Lit::pos(self.solver.new_var())
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        if lits.iter().any(|&l| l == self.t) {
            return;
        }
        let c: Vec<Lit> = lits.iter().copied().filter(|&l| l != self.ff()).collect();
        self.solver.add_clause(&c);
    }

    /// Asserts `l` as a permanent unit clause.
    pub fn assert(&mut self, l: Lit) {
        self.add_clause(&[l]);
    }

    pub fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        let (t, f) = (self.t, !self.t);
        if a == f || b == f || a == !b {
            return f;
        }
        if a == t || a == b {
            return b;
        }
        if b == t {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&x) = self.and_cache.get(&key) {
            return x;
        }
        let x = self.fresh();
        self.solver.add_clause(&[!x, a]);
        self.solver.add_clause(&[!x, b]);
        self.solver.add_clause(&[x, !a, !b]);
        self.and_cache.insert(key, x);
        x
    }

    pub fn or2(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and2(!a, !b)
    }

    pub fn implies(&mut self, a: Lit, b: Lit) -> Lit {
        self.or2(!a, b)
    }

    pub fn xor2(&mut self, a: Lit, b: Lit) -> Lit {
        let (t, f) = (self.t, !self.t);
        if a == f {
            return b;
        }
        if b == f {
            return a;
        }
        if a == t {
            return !b;
        }
        if b == t {
            return !a;
        }
        if a == b {
            return f;
        }
        if a == !b {
            return t;
        }
        // normalise signs: x ^ !y = !(x ^ y)
        let flip = a.is_negated() ^ b.is_negated();
        let (pa, pb) = (Lit::pos(a.var()), Lit::pos(b.var()));
        let key = if pa < pb { (pa, pb) } else { (pb, pa) };
        let x = match self.xor_cache.get(&key) {
            Some(&x) => x,
            None => {
                let x = self.fresh();
                let (p, q) = key;
                self.solver.add_clause(&[!x, p, q]);
                self.solver.add_clause(&[!x, !p, !q]);
                self.solver.add_clause(&[x, !p, q]);
                self.solver.add_clause(&[x, p, !q]);
                self.xor_cache.insert(key, x);
                x
            }
        };
        if flip {
            !x
        } else {
            x
        }
    }

    pub fn iff(&mut self, a: Lit, b: Lit) -> Lit {
        !self.xor2(a, b)
    }

    pub fn mux(&mut self, c: Lit, t: Lit, e: Lit) -> Lit {
        if c == self.t || t == e {
            return t;
        }
        if c == self.ff() {
            return e;
        }
        let a = self.and2(c, t);
        let b = self.and2(!c, e);
        self.or2(a, b)
    }

    pub fn and_all(&mut self, lits: &[Lit]) -> Lit {
        let mut v: Vec<Lit> = lits.iter().copied().filter(|&l| l != self.t).collect();
        v.sort();
        v.dedup();
        if v.contains(&self.ff()) || v.windows(2).any(|w| w[0] == !w[1]) {
            return self.ff();
        }
        match v.len() {
            0 => self.t,
            1 => v[0],
            2 => self.and2(v[0], v[1]),
            _ => {
                if let Some(&x) = self.andn_cache.get(&v) {
                    return x;
                }
                let x = self.fresh();
                for &l in &v {
                    self.solver.add_clause(&[!x, l]);
                }
                let mut big: Vec<Lit> = v.iter().map(|&l| !l).collect();
                big.push(x);
                self.solver.add_clause(&big);
                self.andn_cache.insert(v, x);
                x
            }
        }
    }

    pub fn or_all(&mut self, lits: &[Lit]) -> Lit {
        let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and_all(&neg)
    }

    fn const_bits(&self, mut k: u64) -> Vec<Lit> {
        let mut out = vec![];
        while k > 0 {
            out.push(if k & 1 == 1 { self.t } else { self.ff() });
            k >>= 1;
        }
        out
    }

    fn trim(&self, mut bits: Vec<Lit>) -> Vec<Lit> {
        while bits.last() == Some(&self.ff()) {
            bits.pop();
        }
        bits
    }

    /// Unsigned ripple-carry sum.
    fn add_bits(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let n = a.len().max(b.len());
        let f = self.ff();
        let mut carry = f;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(f);
            let y = b.get(i).copied().unwrap_or(f);
            let xy = self.xor2(x, y);
            out.push(self.xor2(xy, carry));
            let g = self.and2(x, y);
            let p = self.and2(xy, carry);
            carry = self.or2(g, p);
        }
        out.push(carry);
        self.trim(out)
    }

    pub fn int_const(&self, v: i64) -> IntTerm {
        IntTerm { offset: v, bits: vec![] }
    }

    pub fn add(&mut self, a: &IntTerm, b: &IntTerm) -> IntTerm {
        IntTerm { offset: a.offset + b.offset, bits: self.add_bits(&a.bits, &b.bits) }
    }

    /// `a - b = (a.off - b.off - (2^w - 1)) + A + !B` where `w = |B|`.
    pub fn sub(&mut self, a: &IntTerm, b: &IntTerm) -> IntTerm {
        let w = b.bits.len() as u32;
        let nb: Vec<Lit> = b.bits.iter().map(|&l| !l).collect();
        let bits = self.add_bits(&a.bits, &nb);
        IntTerm { offset: a.offset - b.offset - ((1i64 << w) - 1), bits }
    }

    fn add_const(&mut self, a: &IntTerm, k: u64) -> IntTerm {
        let kb = self.const_bits(k);
        IntTerm { offset: a.offset, bits: self.add_bits(&a.bits, &kb) }
    }

    /// Unsigned `bits < c`.
    pub fn lt_const(&mut self, bits: &[Lit], c: i128) -> Lit {
        if c <= 0 {
            return self.ff();
        }
        if bits.len() < 127 && c >= (1i128 << bits.len()) {
            return self.t;
        }
        let mut lt = self.ff();
        for (i, &b) in bits.iter().enumerate() {
            lt = if (c >> i) & 1 == 1 { self.or2(!b, lt) } else { self.and2(!b, lt) };
        }
        lt
    }

    /// Unsigned `bits == c`.
    pub fn eq_const(&mut self, bits: &[Lit], c: i128) -> Lit {
        if c < 0 || (bits.len() < 127 && c >= (1i128 << bits.len())) {
            return self.ff();
        }
        let lits: Vec<Lit> = bits.iter().enumerate().map(|(i, &b)| if (c >> i) & 1 == 1 { b } else { !b }).collect();
        self.and_all(&lits)
    }

    fn compare(&mut self, op: BinOp, a: &IntTerm, b: &IntTerm) -> Lit {
        let d = self.sub(a, b);
        // a op b  <=>  D op -offset, with D unsigned
        let c = -(d.offset as i128);
        match op {
            BinOp::Lt => self.lt_const(&d.bits, c),
            BinOp::Le => self.lt_const(&d.bits, c + 1),
            BinOp::Eq => self.eq_const(&d.bits, c),
            BinOp::Ne => !self.eq_const(&d.bits, c),
            _ => unreachable!(),
        }
    }

    fn bits_eq(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let n = a.len().max(b.len());
        let f = self.ff();
        let eqs: Vec<Lit> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(f);
                let y = b.get(i).copied().unwrap_or(f);
                self.iff(x, y)
            })
            .collect();
        self.and_all(&eqs)
    }

    fn mux_bits(&mut self, c: Lit, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let n = a.len().max(b.len());
        let f = self.ff();
        let out: Vec<Lit> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(f);
                let y = b.get(i).copied().unwrap_or(f);
                self.mux(c, x, y)
            })
            .collect();
        self.trim(out)
    }

    fn mux_int(&mut self, c: Lit, a: &IntTerm, b: &IntTerm) -> IntTerm {
        let off = a.offset.min(b.offset);
        let a2 = self.add_const(a, (a.offset - off) as u64);
        let b2 = self.add_const(b, (b.offset - off) as u64);
        IntTerm { offset: off, bits: self.mux_bits(c, &a2.bits, &b2.bits) }
    }

    /// Fresh variable of a domain, with range-blocking clauses.
    pub fn fresh_var(&mut self, domain: &Domain) -> Term {
        match domain {
            Domain::Bool => Term::Bool(self.fresh()),
            Domain::Int { lo, .. } => {
                let bits = self.fresh_bits(domain.size());
                Term::Int(IntTerm { offset: *lo, bits })
            }
            Domain::Enum(e) => Term::Enum(self.fresh_bits(e.len() as u64)),
        }
    }

    fn fresh_bits(&mut self, size: u64) -> Vec<Lit> {
        let bits: Vec<Lit> = (0..width_for(size)).map(|_| self.fresh()).collect();
        let in_range = self.lt_const(&bits, size as i128);
        self.assert(in_range);
        bits
    }

    /// Converts an assigned value into a term of the domain (saturating
    /// integers), with exactly `width_for(size)` bits.
    pub fn store(&mut self, domain: &Domain, t: Term) -> Term {
        match (domain, t) {
            (Domain::Int { lo, hi }, Term::Int(v)) => {
                let w = width_for(domain.size());
                let span = hi - lo;
                let below = self.compare(BinOp::Lt, &v, &self.int_const(*lo));
                let above = self.compare(BinOp::Lt, &self.int_const(*hi), &v);
                // low w bits of v - lo, valid whenever lo <= v <= hi
                let k = (v.offset - lo).rem_euclid(1i64 << w.min(62)) as u64;
                let shifted = self.add_const(&IntTerm { offset: 0, bits: v.bits.clone() }, k);
                let f = self.ff();
                let low: Vec<Lit> = (0..w).map(|i| shifted.bits.get(i).copied().unwrap_or(f)).collect();
                let top = self.const_bits(span as u64);
                let mut bits = Vec::with_capacity(w);
                for (i, &l) in low.iter().enumerate() {
                    let hi_bit = top.get(i).copied().unwrap_or(f);
                    let x = self.mux(below, f, l);
                    bits.push(self.mux(above, hi_bit, x));
                }
                Term::Int(IntTerm { offset: *lo, bits })
            }
            (Domain::Enum(e), Term::Enum(b)) => {
                let w = width_for(e.len() as u64);
                let f = self.ff();
                Term::Enum((0..w).map(|i| b.get(i).copied().unwrap_or(f)).collect())
            }
            (_, t) => t,
        }
    }

    /// Encodes `expr`; `frame` maps variable references to terms.
    pub fn encode(&mut self, expr: &Expr, frame: &dyn Fn(VarRef) -> Term) -> Term {
        match expr {
            Expr::Bool(b) => Term::Bool(if *b { self.t } else { self.ff() }),
            Expr::Int(i) => Term::Int(self.int_const(*i)),
            Expr::Sym(_, i) => Term::Enum(self.const_bits(*i as u64)),
            Expr::Var(v) => frame(*v),
            Expr::Not(a) => Term::Bool(!self.encode(a, frame).as_bool()),
            Expr::Binary(op, a, b) => {
                let ta = self.encode(a, frame);
                let tb = self.encode(b, frame);
                match (op, ta, tb) {
                    (BinOp::And, x, y) => Term::Bool(self.and2(x.as_bool(), y.as_bool())),
                    (BinOp::Or, x, y) => Term::Bool(self.or2(x.as_bool(), y.as_bool())),
                    (BinOp::Implies, x, y) => Term::Bool(self.implies(x.as_bool(), y.as_bool())),
                    (BinOp::Add, Term::Int(x), Term::Int(y)) => Term::Int(self.add(&x, &y)),
                    (BinOp::Sub, Term::Int(x), Term::Int(y)) => Term::Int(self.sub(&x, &y)),
                    (op, Term::Int(x), Term::Int(y)) => Term::Bool(self.compare(*op, &x, &y)),
                    (BinOp::Eq, x, y) => Term::Bool(self.term_eq(&x, &y)),
                    (BinOp::Ne, x, y) => Term::Bool(!self.term_eq(&x, &y)),
                    (op, x, y) => panic!("ill-sorted operands for {op:?}: {x:?}, {y:?}"),
                }
            }
            Expr::Ite(c, t, e) => {
                let c = self.encode(c, frame).as_bool();
                let tt = self.encode(t, frame);
                let te = self.encode(e, frame);
                match (tt, te) {
                    (Term::Bool(x), Term::Bool(y)) => Term::Bool(self.mux(c, x, y)),
                    (Term::Int(x), Term::Int(y)) => Term::Int(self.mux_int(c, &x, &y)),
                    (Term::Enum(x), Term::Enum(y)) => Term::Enum(self.mux_bits(c, &x, &y)),
                    (x, y) => panic!("ill-sorted branches: {x:?}, {y:?}"),
                }
            }
        }
    }

    pub fn encode_bool(&mut self, expr: &Expr, frame: &dyn Fn(VarRef) -> Term) -> Lit {
        self.encode(expr, frame).as_bool()
    }

    /// Literal for `a == b` on two terms of the same kind.
    pub fn term_eq(&mut self, a: &Term, b: &Term) -> Lit {
        match (a, b) {
            (Term::Bool(x), Term::Bool(y)) => self.iff(*x, *y),
            (Term::Enum(x), Term::Enum(y)) => self.bits_eq(x, y),
            (Term::Int(x), Term::Int(y)) => self.compare(BinOp::Eq, x, y),
            _ => panic!("comparing terms of different kinds"),
        }
    }

    /// Literal for `t == v`.
    pub fn term_is(&mut self, t: &Term, v: Value) -> Lit {
        match (t, v) {
            (Term::Bool(l), Value::Bool(b)) => {
                if b {
                    *l
                } else {
                    !*l
                }
            }
            (Term::Int(x), Value::Int(i)) => self.eq_const(&x.bits, i as i128 - x.offset as i128),
            (Term::Enum(x), Value::Sym(s)) => self.eq_const(x, s as i128),
            _ => self.ff(),
        }
    }
}

/// Reads a term's value from a satisfying assignment.
pub fn decode(t: &Term, m: &Assignment) -> Value {
    let unsigned = |bits: &[Lit]| bits.iter().enumerate().fold(0u64, |acc, (i, &l)| acc | ((m.value(l) as u64) << i));
    match t {
        Term::Bool(l) => Value::Bool(m.value(*l)),
        Term::Int(x) => Value::Int(x.offset + unsigned(&x.bits) as i64),
        Term::Enum(b) => Value::Sym(unsigned(b) as u32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;
    use crate::fixtures;
    use crate::model::{Env, InputVec, Model, Scope, StateVec};
    use crate::sat::Cdcl;

    fn encoder() -> Encoder {
        Encoder::new(Box::new(Cdcl::new()))
    }

    #[test]
    fn x_and_not_x_is_unsat() {
        let mut enc = encoder();
        let x = enc.fresh();
        let a = enc.and2(x, !x);
        assert!(enc.solve(&[a]).is_unsat());
    }

    #[test]
    fn range_block_forbids_out_of_domain_pattern() {
        let mut enc = encoder();
        let t = enc.fresh_var(&Domain::int(0, 2).unwrap());
        let is3 = match &t {
            Term::Int(x) => enc.eq_const(&x.bits, 3),
            _ => unreachable!(),
        };
        assert!(enc.solve(&[is3]).is_unsat());
        let is2 = enc.term_is(&t, Value::Int(2));
        assert!(enc.solve(&[is2]).is_sat());
    }

    /// Exhaustive check of arithmetic and comparisons against the evaluator.
    #[test]
    fn int_ops_match_evaluator() {
        let m = dsl::parse_model("model m { state a : -2..3; state b : 0..4; state c : -1..1; }").unwrap();
        let exprs = [
            "a + b < c + 2",
            "a - b <= c",
            "a - (b - c) == 1",
            "(a < 0 ? b : c) - a != 2",
            "a + b + c == b - 3",
            "b - a > -3",
            "(c == 0 ? a : b + 4) >= 5",
        ];
        for text in exprs {
            let e = dsl::parse_state_set(&m, text).unwrap();
            for s in m.all_states() {
                let expected = crate::model::eval_bool(&e, Env::state(&s)).unwrap();
                let mut enc = encoder();
                let frame: Vec<Term> = m.state_vars().iter().map(|v| enc.fresh_var(&v.domain)).collect();
                let pins: Vec<Lit> = frame.iter().zip(&s.0).map(|(t, v)| enc.term_is(t, *v)).collect();
                let f = frame.clone();
                let out = enc.encode_bool(&e, &move |v: VarRef| f[v.index].clone());
                let mut assumptions = pins.clone();
                assumptions.push(out);
                assert_eq!(enc.solve(&assumptions).is_sat(), expected, "{text} at {s}");
            }
        }
    }

    #[test]
    fn store_saturates_like_semantics() {
        let d = Domain::int(1, 5).unwrap();
        for v in -4i64..10 {
            let mut enc = encoder();
            let x = enc.fresh_var(&Domain::int(-4, 9).unwrap());
            let pin = enc.term_is(&x, Value::Int(v));
            let stored = enc.store(&d, x);
            match enc.solve(&[pin]) {
                SolveResult::Sat(m) => assert_eq!(decode(&stored, &m), crate::model::saturate(&d, Value::Int(v))),
                r => panic!("{r:?}"),
            }
        }
    }

    fn successor_via_sat(m: &Model, s: &StateVec, i: &InputVec) -> StateVec {
        let mut enc = encoder();
        let st: Vec<Term> = m.state_vars().iter().map(|v| enc.fresh_var(&v.domain)).collect();
        let inp: Vec<Term> = m.inputs().iter().map(|v| enc.fresh_var(&v.domain)).collect();
        let mut pins: Vec<Lit> = st.iter().zip(&s.0).map(|(t, v)| enc.term_is(t, *v)).collect();
        pins.extend(inp.iter().zip(&i.0).map(|(t, v)| enc.term_is(t, *v)));
        let frame = |v: VarRef| match v.scope {
            Scope::State => st[v.index].clone(),
            Scope::Input => inp[v.index].clone(),
            Scope::Next => unreachable!(),
        };
        let next: Vec<Term> = (0..m.state_vars().len())
            .map(|k| match m.transition(k) {
                Some(e) => {
                    let t = enc.encode(e, &frame);
                    enc.store(&m.state_vars()[k].domain, t)
                }
                None => st[k].clone(),
            })
            .collect();
        match enc.solve(&pins) {
            SolveResult::Sat(a) => StateVec(next.iter().map(|t| decode(t, &a)).collect()),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn cruise_successor_of_initial_state_under_gas() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        let s = m.deterministic_init().unwrap();
        let gas = InputVec(m.inputs().iter().map(|v| Value::Bool(v.name == "gas")).collect());
        let next = successor_via_sat(&m, &s, &gas);
        assert_eq!(m.format_state(&next), "mode=OFF speed=1 enable=false");
    }

    #[test]
    fn cruise_transition_encoding_agrees_everywhere() {
        let m = dsl::parse_model(fixtures::CRUISE_MODEL).unwrap();
        for s in m.all_states() {
            for i in m.all_inputs().filter(|i| m.input_allowed(i).unwrap()) {
                assert_eq!(successor_via_sat(&m, &s, &i), m.successor(&s, &i).unwrap());
            }
        }
    }
}
