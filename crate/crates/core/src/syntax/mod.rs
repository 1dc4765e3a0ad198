//! Formulas of the relatedness language, substitutions and schema matching.
//!
//! A [`Formula`] is an immutable, reference-counted tree. Equality, ordering
//! and hashing are structural, so formulas can be used directly as keys of
//! relation pairs.

mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

pub use parser::{parse, Algebra, TokenStream};
pub use printer::print;
pub(crate) use printer::{letter_name, render, TreeView, View};

/// Binary connectives. `RelImp` is relatedness implication (`~>`),
/// `RelConj` is relatedness conjunction (`^`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Imp,
    Iff,
    RelImp,
    RelConj,
}

impl Connective {
    pub const ALL: [Connective; 6] = [
        Connective::And,
        Connective::Or,
        Connective::Imp,
        Connective::Iff,
        Connective::RelImp,
        Connective::RelConj,
    ];

    pub fn is_relatedness(self) -> bool {
        matches!(self, Connective::RelImp | Connective::RelConj)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Imp => "->",
            Connective::Iff => "<->",
            Connective::RelImp => "~>",
            Connective::RelConj => "^",
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaKind {
    Letter(u32),
    Neg(Formula),
    Bin(Connective, Formula, Formula),
}

/// A formula. Cloning is a reference-count bump.
// equality is structural with a pointer fast path, so the derived hash agrees
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Clone, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<FormulaKind>);

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Formula {}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Formula {
    pub fn letter(index: u32) -> Formula {
        Formula(Arc::new(FormulaKind::Letter(index)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::Neg(inner)))
    }

    pub fn bin(op: Connective, left: Formula, right: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::Bin(op, left, right)))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::And, left, right)
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::Or, left, right)
    }

    pub fn imp(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::Imp, left, right)
    }

    pub fn iff(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::Iff, left, right)
    }

    pub fn rel_imp(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::RelImp, left, right)
    }

    pub fn rel_conj(left: Formula, right: Formula) -> Formula {
        Formula::bin(Connective::RelConj, left, right)
    }

    /// `p0 | !p0`.
    pub fn top() -> Formula {
        let p0 = Formula::letter(0);
        Formula::or(p0.clone(), Formula::neg(p0))
    }

    /// `!(p0 | !p0)`.
    pub fn bottom() -> Formula {
        Formula::neg(Formula::top())
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.0
    }

    pub fn as_letter(&self) -> Option<u32> {
        match *self.kind() {
            FormulaKind::Letter(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_neg(&self) -> Option<&Formula> {
        match self.kind() {
            FormulaKind::Neg(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn as_bin(&self) -> Option<(Connective, &Formula, &Formula)> {
        match self.kind() {
            FormulaKind::Bin(op, l, r) => Some((*op, l, r)),
            _ => None,
        }
    }

    /// Returns the pair when the main connective is `~>` or `^`.
    pub fn relatedness_pair(&self) -> Option<(Connective, FormulaPair)> {
        match self.kind() {
            FormulaKind::Bin(op, l, r) if op.is_relatedness() => {
                Some((*op, FormulaPair::new(l.clone(), r.clone())))
            }
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        *self == Formula::top()
    }

    pub fn is_bottom(&self) -> bool {
        *self == Formula::bottom()
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self.kind() {
            FormulaKind::Letter(_) => 1,
            FormulaKind::Neg(x) => 1 + x.node_count(),
            FormulaKind::Bin(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Number of connective occurrences.
    pub fn connective_count(&self) -> usize {
        match self.kind() {
            FormulaKind::Letter(_) => 0,
            FormulaKind::Neg(x) => 1 + x.connective_count(),
            FormulaKind::Bin(_, l, r) => 1 + l.connective_count() + r.connective_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self.kind() {
            FormulaKind::Letter(_) => 0,
            FormulaKind::Neg(x) => 1 + x.depth(),
            FormulaKind::Bin(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Letters occurring in the formula.
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self.kind() {
            FormulaKind::Letter(i) => {
                out.insert(*i);
            }
            FormulaKind::Neg(x) => x.collect_vars(out),
            FormulaKind::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Post-order enumeration without duplicates; `self` comes last.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    /// [`Formula::subformulas`] without `self`.
    pub fn proper_subformulas(&self) -> Vec<Formula> {
        let mut all = self.subformulas();
        all.pop();
        all
    }

    fn collect_subformulas(&self, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        if seen.contains(self) {
            return;
        }
        match self.kind() {
            FormulaKind::Letter(_) => {}
            FormulaKind::Neg(x) => x.collect_subformulas(seen, out),
            FormulaKind::Bin(_, l, r) => {
                l.collect_subformulas(seen, out);
                r.collect_subformulas(seen, out);
            }
        }
        if seen.insert(self.clone()) {
            out.push(self.clone());
        }
    }

    pub fn substitute(&self, sigma: &Substitution) -> Formula {
        sigma.apply(self)
    }
}

/// Ordered pair of formulas, the element type of relations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaPair {
    pub first: Formula,
    pub second: Formula,
}

impl FormulaPair {
    pub fn new(first: Formula, second: Formula) -> FormulaPair {
        FormulaPair { first, second }
    }

    pub fn swapped(&self) -> FormulaPair {
        FormulaPair::new(self.second.clone(), self.first.clone())
    }
}

impl fmt::Debug for FormulaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.first, self.second)
    }
}

impl fmt::Display for FormulaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.first, self.second)
    }
}

/// Finite map from letters to formulas; unmapped letters are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<u32, Formula>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn with(mut self, letter: u32, image: Formula) -> Substitution {
        self.map.insert(letter, image);
        self
    }

    pub fn insert(&mut self, letter: u32, image: Formula) -> Option<Formula> {
        self.map.insert(letter, image)
    }

    pub fn get(&self, letter: u32) -> Option<&Formula> {
        self.map.get(&letter)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Formula)> {
        self.map.iter().map(|(k, v)| (*k, v))
    }

    pub fn apply(&self, phi: &Formula) -> Formula {
        if self.map.is_empty() {
            return phi.clone();
        }
        match phi.kind() {
            FormulaKind::Letter(i) => self.map.get(i).cloned().unwrap_or_else(|| phi.clone()),
            FormulaKind::Neg(x) => Formula::neg(self.apply(x)),
            FormulaKind::Bin(op, l, r) => Formula::bin(*op, self.apply(l), self.apply(r)),
        }
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &Substitution) -> Substitution {
        let mut map: BTreeMap<u32, Formula> =
            inner.map.iter().map(|(k, v)| (*k, self.apply(v))).collect();
        for (k, v) in &self.map {
            map.entry(*k).or_insert_with(|| v.clone());
        }
        Substitution { map }
    }

    /// Keeps only the bindings for `letters`.
    pub fn restrict(&self, letters: &BTreeSet<u32>) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(k, _)| letters.contains(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(u32, Formula)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (u32, Formula)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// One-sided matching: finds σ with `σ(schema) = target`.
///
/// The result binds exactly the letters of `schema`; by freeness of the
/// formula algebra it is unique when it exists.
pub fn match_schema(schema: &Formula, target: &Formula) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    if match_into(schema, target, &mut sigma) {
        Some(sigma)
    } else {
        None
    }
}

fn match_into(schema: &Formula, target: &Formula, sigma: &mut Substitution) -> bool {
    match (schema.kind(), target.kind()) {
        (FormulaKind::Letter(i), _) => match sigma.get(*i) {
            Some(bound) => bound == target,
            None => {
                sigma.insert(*i, target.clone());
                true
            }
        },
        (FormulaKind::Neg(s), FormulaKind::Neg(t)) => match_into(s, t, sigma),
        (FormulaKind::Bin(op_s, ls, rs), FormulaKind::Bin(op_t, lt, rt)) => {
            op_s == op_t && match_into(ls, lt, sigma) && match_into(rs, rt, sigma)
        }
        _ => false,
    }
}

/// `base^0 = base`, `base^(n+1) = base -> base^n`.
pub fn imp_tower(base: &Formula, n: usize) -> Formula {
    let mut out = base.clone();
    for _ in 0..n {
        out = Formula::imp(base.clone(), out);
    }
    out
}

/// `p^0 = q ~> p`, `p^(n+1) = p -> p^n`.
pub fn lambda_tower(p: &Formula, q: &Formula, n: usize) -> Formula {
    let mut out = Formula::rel_imp(q.clone(), p.clone());
    for _ in 0..n {
        out = Formula::imp(p.clone(), out);
    }
    out
}

/// n-fold negation of `T`.
pub fn neg_tower(n: usize) -> Formula {
    let mut out = Formula::top();
    for _ in 0..n {
        out = Formula::neg(out);
    }
    out
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&print(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for FormulaPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.first, &self.second).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for FormulaPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (first, second) = <(Formula, Formula)>::deserialize(deserializer)?;
        Ok(FormulaPair::new(first, second))
    }
}

/// The letters `p, q, r, s, t` are `p1..p5`.
pub mod letters {
    pub const P: u32 = 1;
    pub const Q: u32 = 2;
    pub const R: u32 = 3;
    pub const S: u32 = 4;
    pub const T: u32 = 5;
}
