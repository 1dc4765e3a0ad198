//! Standard translation into classical logic over letters and pair atoms,
//! boolean skeletons, and the SAT-backed decision procedures for `F`.

mod sat;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::semantics::{Model, Relation, Valuation};
use crate::syntax::{
    letter_name, render, Algebra, Connective, Formula, FormulaKind, FormulaPair, TokenStream,
    TreeView, View,
};

/// Atom of the classical target language.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Letter(u32),
    /// Stands for membership of the (untranslated) pair in the relation.
    Pair(FormulaPair),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Letter(i) => f.write_str(&letter_name(*i)),
            Atom::Pair(p) => write!(f, "a<{}, {}>", p.first, p.second),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CplKind {
    Atom(Atom),
    Neg(CplFormula),
    /// Never a relatedness connective.
    Bin(Connective, CplFormula, CplFormula),
}

/// Classical formula over [`Atom`]s.
// equality is structural with a pointer fast path, so the derived hash agrees
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Clone, Hash, PartialOrd, Ord)]
pub struct CplFormula(Arc<CplKind>);

impl PartialEq for CplFormula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for CplFormula {}

impl CplFormula {
    pub fn atom(a: Atom) -> CplFormula {
        CplFormula(Arc::new(CplKind::Atom(a)))
    }

    pub fn letter(i: u32) -> CplFormula {
        CplFormula::atom(Atom::Letter(i))
    }

    pub fn pair(first: Formula, second: Formula) -> CplFormula {
        CplFormula::atom(Atom::Pair(FormulaPair::new(first, second)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: CplFormula) -> CplFormula {
        CplFormula(Arc::new(CplKind::Neg(inner)))
    }

    /// `None` for relatedness connectives.
    pub fn bin(op: Connective, left: CplFormula, right: CplFormula) -> Option<CplFormula> {
        (!op.is_relatedness()).then(|| CplFormula(Arc::new(CplKind::Bin(op, left, right))))
    }

    pub fn and(l: CplFormula, r: CplFormula) -> CplFormula {
        CplFormula(Arc::new(CplKind::Bin(Connective::And, l, r)))
    }

    pub fn or(l: CplFormula, r: CplFormula) -> CplFormula {
        CplFormula(Arc::new(CplKind::Bin(Connective::Or, l, r)))
    }

    pub fn imp(l: CplFormula, r: CplFormula) -> CplFormula {
        CplFormula(Arc::new(CplKind::Bin(Connective::Imp, l, r)))
    }

    pub fn iff(l: CplFormula, r: CplFormula) -> CplFormula {
        CplFormula(Arc::new(CplKind::Bin(Connective::Iff, l, r)))
    }

    pub fn kind(&self) -> &CplKind {
        &self.0
    }

    /// Atoms in left-to-right order of first occurrence.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f.kind() {
                CplKind::Atom(a) => {
                    if seen.insert(a) {
                        out.push(a.clone());
                    }
                }
                CplKind::Neg(x) => stack.push(x),
                CplKind::Bin(_, l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

impl TreeView for CplFormula {
    fn view(&self) -> View<'_, Self> {
        match self.kind() {
            CplKind::Atom(a) => View::Atom(a.to_string()),
            CplKind::Neg(x) => View::Neg(x),
            CplKind::Bin(op, l, r) => View::Bin(*op, l, r),
        }
    }
}

impl fmt::Display for CplFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for CplFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CplFormula({self})")
    }
}

struct CplAlgebra;

impl Algebra for CplAlgebra {
    type Out = CplFormula;

    fn letter(&self, index: u32) -> CplFormula {
        CplFormula::letter(index)
    }

    fn neg(&self, inner: CplFormula) -> CplFormula {
        CplFormula::neg(inner)
    }

    fn bin(&self, op: Connective, left: CplFormula, right: CplFormula) -> Option<CplFormula> {
        CplFormula::bin(op, left, right)
    }

    fn pair_atom(&self, first: Formula, second: Formula) -> Option<CplFormula> {
        Some(CplFormula::pair(first, second))
    }
}

/// Parses a classical formula; pair atoms are written `a<φ, ψ>`.
pub fn parse_cpl(text: &str) -> Result<CplFormula> {
    TokenStream::new(text)?.parse_all(&CplAlgebra)
}

impl std::str::FromStr for CplFormula {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_cpl(s)
    }
}

impl Serialize for CplFormula {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CplFormula {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_cpl(&text).map_err(serde::de::Error::custom)
    }
}

/// Classical assignment: a default bit plus explicit values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    pub default: bool,
    pub values: BTreeMap<Atom, bool>,
}

impl Assignment {
    pub fn value(&self, a: &Atom) -> bool {
        self.values.get(a).copied().unwrap_or(self.default)
    }

    pub fn set(&mut self, a: Atom, value: bool) {
        self.values.insert(a, value);
    }

    /// The model read off this assignment: true letters over a false
    /// default, and exactly the true pair atoms as a finite relation.
    pub fn to_model(&self) -> Model {
        let mut valuation = Valuation::constant(false);
        let mut pairs = BTreeSet::new();
        for (a, &b) in &self.values {
            match a {
                Atom::Letter(i) => valuation.set(*i, b),
                Atom::Pair(p) if b => {
                    pairs.insert(p.clone());
                }
                Atom::Pair(_) => {}
            }
        }
        let relation = if pairs.is_empty() {
            Relation::Empty
        } else {
            Relation::Finite(pairs)
        };
        Model::new(valuation, relation)
    }
}

/// `St(φ)`.
pub fn translate(phi: &Formula) -> CplFormula {
    match phi.kind() {
        FormulaKind::Letter(i) => CplFormula::letter(*i),
        FormulaKind::Neg(x) => CplFormula::neg(translate(x)),
        FormulaKind::Bin(op, l, r) => {
            let (tl, tr) = (translate(l), translate(r));
            let pair = || CplFormula::pair(l.clone(), r.clone());
            match op {
                Connective::RelImp => CplFormula::and(CplFormula::imp(tl, tr), pair()),
                Connective::RelConj => CplFormula::and(CplFormula::and(tl, tr), pair()),
                classical => CplFormula::bin(*classical, tl, tr).expect("classical connective"),
            }
        }
    }
}

/// Atoms of `St(φ)` in first-occurrence order.
pub fn atoms(phi: &Formula) -> Vec<Atom> {
    translate(phi).atoms()
}

pub fn assignment_of(model: &Model, atoms: impl IntoIterator<Item = Atom>) -> Assignment {
    let values = atoms
        .into_iter()
        .map(|a| {
            let b = match &a {
                Atom::Letter(i) => model.valuation.value(*i),
                Atom::Pair(p) => model.relation.contains_pair(p),
            };
            (a, b)
        })
        .collect();
    Assignment {
        default: false,
        values,
    }
}

pub fn cpl_evaluate(a: &Assignment, f: &CplFormula) -> bool {
    match f.kind() {
        CplKind::Atom(x) => a.value(x),
        CplKind::Neg(x) => !cpl_evaluate(a, x),
        CplKind::Bin(op, l, r) => {
            let x = cpl_evaluate(a, l);
            match op {
                Connective::And => x && cpl_evaluate(a, r),
                Connective::Or => x || cpl_evaluate(a, r),
                Connective::Imp => !x || cpl_evaluate(a, r),
                Connective::Iff => x == cpl_evaluate(a, r),
                Connective::RelImp | Connective::RelConj => unreachable!("classical formula"),
            }
        }
    }
}

/// A satisfying assignment over the atoms of `f`, if any. Branching follows
/// first-occurrence order with `false` tried first.
pub fn sat(f: &CplFormula) -> Option<Assignment> {
    sat_all(std::slice::from_ref(f))
}

/// Joint satisfiability of several classical formulas.
pub fn sat_all(fs: &[CplFormula]) -> Option<Assignment> {
    let values = sat::solve(&[], fs)?;
    Some(Assignment {
        default: false,
        values: values.into_iter().collect(),
    })
}

/// A model of every formula in `sigma`, read off the least satisfying
/// assignment of their translations.
pub fn find_model<'a>(sigma: impl IntoIterator<Item = &'a Formula>) -> Option<Model> {
    let fs: Vec<CplFormula> = sigma.into_iter().map(translate).collect();
    sat_all(&fs).map(|a| a.to_model())
}

pub fn is_tautology(f: &CplFormula) -> bool {
    sat(&CplFormula::neg(f.clone())).is_none()
}

/// Membership in `F`: `St(φ)` is a classical tautology.
pub fn f_valid(phi: &Formula) -> bool {
    is_tautology(&translate(phi))
}

/// A model falsifying `φ`, when `φ ∉ F`.
pub fn countermodel(phi: &Formula) -> Option<Model> {
    find_model([&Formula::neg(phi.clone())])
}

/// `Σ ⊨ φ` over all Epstein models.
pub fn f_consequence<'a>(sigma: impl IntoIterator<Item = &'a Formula>, phi: &Formula) -> bool {
    consequence_countermodel(sigma, phi).is_none()
}

/// A model of `Σ` falsifying `φ`, if one exists.
pub fn consequence_countermodel<'a>(
    sigma: impl IntoIterator<Item = &'a Formula>,
    phi: &Formula,
) -> Option<Model> {
    let mut fs: Vec<CplFormula> = sigma.into_iter().map(translate).collect();
    fs.push(CplFormula::neg(translate(phi)));
    sat_all(&fs).map(|a| a.to_model())
}

/// Boolean skeleton: a classical formula over letters `p1, p2, …`, where
/// letter `k + 1` abstracts `atoms[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub formula: CplFormula,
    pub atoms: Vec<Formula>,
}

impl Skeleton {
    pub fn is_tautology(&self) -> bool {
        is_tautology(&self.formula)
    }
}

/// Abstracts letters and maximal relatedness subformulas to atoms, sharing
/// one atom per distinct subformula.
pub fn skeleton(phi: &Formula) -> Skeleton {
    fn go(
        phi: &Formula,
        atoms: &mut Vec<Formula>,
        index: &mut BTreeMap<Formula, u32>,
    ) -> CplFormula {
        match phi.kind() {
            FormulaKind::Neg(x) => CplFormula::neg(go(x, atoms, index)),
            FormulaKind::Bin(op, l, r) if !op.is_relatedness() => {
                let (l, r) = (go(l, atoms, index), go(r, atoms, index));
                CplFormula::bin(*op, l, r).expect("classical connective")
            }
            _ => {
                let k = *index.entry(phi.clone()).or_insert_with(|| {
                    atoms.push(phi.clone());
                    atoms.len() as u32
                });
                CplFormula::letter(k)
            }
        }
    }
    let mut atoms = Vec::new();
    let formula = go(phi, &mut atoms, &mut BTreeMap::new());
    Skeleton { formula, atoms }
}

/// `φ` is a substitution instance of a classical tautology.
pub fn is_cpl_instance(phi: &Formula) -> bool {
    skeleton(phi).is_tautology()
}
