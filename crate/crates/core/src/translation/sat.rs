//! Tseitin encoding plus a chronological-backtracking DPLL with two
//! watched literals.
//!
//! Variables are numbered so the caller's atoms come first, in the order
//! given; branching takes the lowest unassigned variable and tries `false`
//! first. Since every gate variable is fixed by propagation once all atoms
//! are, the model found is the lexicographically least one over the atoms.

use std::collections::HashMap;

use super::{Atom, CplFormula, CplKind};
use crate::syntax::Connective;

type Lit = u32;

fn lit(var: u32, positive: bool) -> Lit {
    2 * var + (!positive) as u32
}

fn negate(l: Lit) -> Lit {
    l ^ 1
}

fn var_of(l: Lit) -> usize {
    (l >> 1) as usize
}

#[derive(Default)]
struct Encoder {
    atoms: HashMap<Atom, u32>,
    gates: HashMap<CplFormula, Lit>,
    clauses: Vec<Vec<Lit>>,
    vars: u32,
}

impl Encoder {
    fn fresh(&mut self) -> u32 {
        self.vars += 1;
        self.vars - 1
    }

    fn atom(&mut self, a: &Atom) -> u32 {
        if let Some(&v) = self.atoms.get(a) {
            return v;
        }
        let v = self.fresh();
        self.atoms.insert(a.clone(), v);
        v
    }

    fn encode(&mut self, f: &CplFormula) -> Lit {
        match f.kind() {
            CplKind::Atom(a) => lit(self.atom(a), true),
            CplKind::Neg(x) => negate(self.encode(x)),
            CplKind::Bin(op, l, r) => {
                if let Some(&g) = self.gates.get(f) {
                    return g;
                }
                let a = self.encode(l);
                let b = self.encode(r);
                let g = lit(self.fresh(), true);
                let (ng, na, nb) = (negate(g), negate(a), negate(b));
                let cs: &[&[Lit]] = match op {
                    Connective::And => &[&[ng, a], &[ng, b], &[g, na, nb]],
                    Connective::Or => &[&[g, na], &[g, nb], &[ng, a, b]],
                    Connective::Imp => &[&[g, a], &[g, nb], &[ng, na, b]],
                    Connective::Iff => &[&[ng, na, b], &[ng, a, nb], &[g, a, b], &[g, na, nb]],
                    Connective::RelImp | Connective::RelConj => {
                        unreachable!("classical formulas have no relatedness connectives")
                    }
                };
                for c in cs {
                    self.clauses.push(c.to_vec());
                }
                self.gates.insert(f.clone(), g);
                g
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unset,
    False,
    True,
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    values: Vec<Value>,
    trail: Vec<Lit>,
    // (trail length at the decision, decision literal, already flipped)
    decisions: Vec<(usize, Lit, bool)>,
    qhead: usize,
}

impl Solver {
    fn lit_value(&self, l: Lit) -> Value {
        match (self.values[var_of(l)], l & 1 == 1) {
            (Value::Unset, _) => Value::Unset,
            (Value::True, false) | (Value::False, true) => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, l: Lit) {
        self.values[var_of(l)] = if l & 1 == 0 {
            Value::True
        } else {
            Value::False
        };
        self.trail.push(l);
    }

    // false on conflict
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = negate(self.trail[self.qhead]);
            self.qhead += 1;
            let mut watching = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            let mut ok = true;
            while i < watching.len() {
                let ci = watching[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.lit_value(first) == Value::True {
                    i += 1;
                    continue;
                }
                let clause = &self.clauses[ci];
                let replacement =
                    (2..clause.len()).find(|&k| self.lit_value(clause[k]) != Value::False);
                if let Some(k) = replacement {
                    let clause = &mut self.clauses[ci];
                    clause.swap(1, k);
                    let w = clause[1];
                    self.watches[w as usize].push(ci);
                    watching.swap_remove(i);
                    continue;
                }
                if self.lit_value(first) == Value::False {
                    ok = false;
                    break;
                }
                self.assign(first);
                i += 1;
            }
            self.watches[falsified as usize] = watching;
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.values[var_of(l)] = Value::Unset;
        }
        self.qhead = len;
    }

    // Chronological backtracking; false when the search space is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((len, l, flipped)) = self.decisions.pop() {
            self.undo_to(len);
            if !flipped {
                self.decisions.push((len, negate(l), true));
                self.assign(negate(l));
                return true;
            }
        }
        false
    }

    fn solve(mut self) -> Option<Vec<bool>> {
        let mut next = 0;
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return None;
                }
                next = 0;
                continue;
            }
            while next < self.values.len() && self.values[next] != Value::Unset {
                next += 1;
            }
            if next == self.values.len() {
                return Some(self.values.iter().map(|v| *v == Value::True).collect());
            }
            let l = lit(next as u32, false);
            self.decisions.push((self.trail.len(), l, false));
            self.assign(l);
        }
    }
}

/// Satisfiability of the conjunction of `formulas`. `order` fixes the
/// numbering (and so the branching order) of the first atoms; atoms not in
/// it follow in first-occurrence order. The result lists a value for every
/// atom that occurs.
pub(crate) fn solve(order: &[Atom], formulas: &[CplFormula]) -> Option<Vec<(Atom, bool)>> {
    let mut enc = Encoder::default();
    for a in order {
        enc.atom(a);
    }
    for f in formulas {
        for a in f.atoms() {
            enc.atom(&a);
        }
    }
    let mut units = Vec::new();
    for f in formulas {
        let mut stack = vec![f];
        // top-level conjunctions become separate units
        while let Some(g) = stack.pop() {
            match g.kind() {
                CplKind::Bin(Connective::And, l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                _ => units.push(enc.encode(g)),
            }
        }
    }
    let n = enc.vars as usize;
    let mut solver = Solver {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * n],
        values: vec![Value::Unset; n],
        trail: Vec::new(),
        decisions: Vec::new(),
        qhead: 0,
    };
    for u in units {
        match solver.lit_value(u) {
            Value::False => return None,
            Value::True => {}
            Value::Unset => solver.assign(u),
        }
    }
    for mut c in enc.clauses {
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue;
        }
        if c.len() == 1 {
            match solver.lit_value(c[0]) {
                Value::False => return None,
                Value::True => {}
                Value::Unset => solver.assign(c[0]),
            }
            continue;
        }
        let ci = solver.clauses.len();
        solver.watches[c[0] as usize].push(ci);
        solver.watches[c[1] as usize].push(ci);
        solver.clauses.push(c);
    }
    let values = solver.solve()?;
    let mut atoms: Vec<(Atom, u32)> = enc.atoms.into_iter().collect();
    atoms.sort_by_key(|(_, v)| *v);
    Some(
        atoms
            .into_iter()
            .map(|(a, v)| (a, values[v as usize]))
            .collect(),
    )
}
