//! Models `⟨v, R⟩`: valuations, relations with decidable membership, and
//! the truth-condition evaluator.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Connective, Formula, FormulaKind, FormulaPair};

/// Default bound on the number of letters `relation_validates` enumerates.
pub const DEFAULT_VALIDATION_BOUND: usize = 20;

/// Total valuation: a default bit plus finitely many exceptions.
///
/// Exceptions equal to the default are never stored, so two valuations are
/// equal as functions iff they are equal as values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ValuationRepr", try_from = "ValuationRepr")]
pub struct Valuation {
    default: bool,
    exceptions: BTreeMap<u32, bool>,
}

impl Default for Valuation {
    fn default() -> Self {
        Valuation::constant(false)
    }
}

impl Valuation {
    pub fn constant(value: bool) -> Valuation {
        Valuation {
            default: value,
            exceptions: BTreeMap::new(),
        }
    }

    /// Default false, with `letters` true.
    pub fn true_on(letters: impl IntoIterator<Item = u32>) -> Valuation {
        let mut v = Valuation::constant(false);
        for i in letters {
            v.set(i, true);
        }
        v
    }

    pub fn with(mut self, letter: u32, value: bool) -> Valuation {
        self.set(letter, value);
        self
    }

    pub fn set(&mut self, letter: u32, value: bool) {
        if value == self.default {
            self.exceptions.remove(&letter);
        } else {
            self.exceptions.insert(letter, value);
        }
    }

    pub fn value(&self, letter: u32) -> bool {
        self.exceptions
            .get(&letter)
            .copied()
            .unwrap_or(self.default)
    }

    pub fn default_value(&self) -> bool {
        self.default
    }

    /// Letters whose value differs from the default.
    pub fn exceptions(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.exceptions.iter().map(|(k, v)| (*k, *v))
    }

    /// Some letter on which the two valuations disagree, if any.
    pub fn first_difference(&self, other: &Valuation) -> Option<u32> {
        if self.default != other.default {
            // the smallest letter that is an exception in neither
            let mut i = 0u32;
            loop {
                if !self.exceptions.contains_key(&i) && !other.exceptions.contains_key(&i) {
                    return Some(i);
                }
                if self.value(i) != other.value(i) {
                    return Some(i);
                }
                i += 1;
            }
        }
        self.exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .find(|&i| self.value(i) != other.value(i))
    }
}

#[derive(Serialize, Deserialize)]
struct ValuationRepr {
    default: u8,
    #[serde(rename = "true", default, skip_serializing_if = "Vec::is_empty")]
    true_letters: Vec<Formula>,
    #[serde(rename = "false", default, skip_serializing_if = "Vec::is_empty")]
    false_letters: Vec<Formula>,
}

impl From<Valuation> for ValuationRepr {
    fn from(v: Valuation) -> Self {
        let pick = |want: bool| {
            v.exceptions
                .iter()
                .filter(|(_, b)| **b == want)
                .map(|(i, _)| Formula::letter(*i))
                .collect()
        };
        ValuationRepr {
            default: v.default as u8,
            true_letters: pick(true),
            false_letters: pick(false),
        }
    }
}

impl TryFrom<ValuationRepr> for Valuation {
    type Error = String;

    fn try_from(repr: ValuationRepr) -> std::result::Result<Self, Self::Error> {
        let default = match repr.default {
            0 => false,
            1 => true,
            d => return Err(format!("valuation default must be 0 or 1, got {d}")),
        };
        let mut v = Valuation::constant(default);
        for (letters, value) in [(&repr.true_letters, true), (&repr.false_letters, false)] {
            for f in letters {
                let i = f
                    .as_letter()
                    .ok_or_else(|| format!("valuation entry {f} is not a letter"))?;
                v.set(i, value);
            }
        }
        Ok(v)
    }
}

/// Which tower-shaped relation a [`Relation::Tower`] stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TowerVariant {
    /// Exactly `{⟨σ(p), σ(p^k)⟩ : σ, k ∈ indices}`.
    #[serde(rename = "r0t")]
    SubstOfTowers,
    /// Stands for the family of supersets of the former; membership
    /// queries answer for its least element.
    #[serde(rename = "superset-closure")]
    SupersetClosure,
}

/// A binary relation on formulas with decidable membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RelationRepr", try_from = "RelationRepr")]
pub enum Relation {
    Finite(BTreeSet<FormulaPair>),
    /// Every pair except the listed ones.
    Cofinite(BTreeSet<FormulaPair>),
    Full,
    Empty,
    /// `⟨φ, ψ⟩` is a member iff `ψ = imp_tower(φ, k)` for some listed `k ≥ 1`.
    Tower {
        indices: BTreeSet<usize>,
        variant: TowerVariant,
    },
    /// `base` with `add` inserted and `remove` deleted; `add ∩ remove = ∅`.
    Override {
        base: Box<Relation>,
        add: BTreeSet<FormulaPair>,
        remove: BTreeSet<FormulaPair>,
    },
}

/// Finite or cofinite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinCo {
    Finite(BTreeSet<FormulaPair>),
    Cofinite(BTreeSet<FormulaPair>),
}

impl Relation {
    pub fn finite(pairs: impl IntoIterator<Item = FormulaPair>) -> Relation {
        Relation::Finite(pairs.into_iter().collect())
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = FormulaPair>) -> Relation {
        Relation::Cofinite(excluded.into_iter().collect())
    }

    pub fn tower(
        indices: impl IntoIterator<Item = usize>,
        variant: TowerVariant,
    ) -> Result<Relation> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.contains(&0) {
            return Err(Error::Invalid("tower indices must be at least 1".into()));
        }
        Ok(Relation::Tower { indices, variant })
    }

    pub fn override_with(
        base: Relation,
        add: BTreeSet<FormulaPair>,
        remove: BTreeSet<FormulaPair>,
    ) -> Result<Relation> {
        if let Some(x) = add.intersection(&remove).next() {
            return Err(Error::OverlappingOverride(x.clone()));
        }
        Ok(Relation::Override {
            base: Box::new(base),
            add,
            remove,
        })
    }

    pub fn contains(&self, first: &Formula, second: &Formula) -> bool {
        match self {
            Relation::Full => true,
            Relation::Empty => false,
            Relation::Finite(_) | Relation::Cofinite(_) | Relation::Override { .. } => {
                self.contains_pair(&FormulaPair::new(first.clone(), second.clone()))
            }
            Relation::Tower { indices, .. } => {
                tower_index(first, second).is_some_and(|k| indices.contains(&k))
            }
        }
    }

    pub fn contains_pair(&self, pair: &FormulaPair) -> bool {
        match self {
            Relation::Finite(pairs) => pairs.contains(pair),
            Relation::Cofinite(excluded) => !excluded.contains(pair),
            Relation::Override { base, add, remove } => {
                add.contains(pair) || (!remove.contains(pair) && base.contains_pair(pair))
            }
            _ => self.contains(&pair.first, &pair.second),
        }
    }

    /// Finite or cofinite normal form, when the representation has one.
    pub fn fin_co(&self) -> Option<FinCo> {
        match self {
            Relation::Finite(s) => Some(FinCo::Finite(s.clone())),
            Relation::Cofinite(s) => Some(FinCo::Cofinite(s.clone())),
            Relation::Full => Some(FinCo::Cofinite(BTreeSet::new())),
            Relation::Empty => Some(FinCo::Finite(BTreeSet::new())),
            Relation::Tower { .. } => None,
            Relation::Override { base, add, remove } => Some(match base.fin_co()? {
                FinCo::Finite(s) => FinCo::Finite(
                    s.union(add)
                        .filter(|x| !remove.contains(*x))
                        .cloned()
                        .collect(),
                ),
                FinCo::Cofinite(s) => FinCo::Cofinite(
                    s.union(remove)
                        .filter(|x| !add.contains(*x))
                        .cloned()
                        .collect(),
                ),
            }),
        }
    }

    /// Collapses overrides over finite/cofinite bases; `Finite(∅)` becomes
    /// `Empty` and `Cofinite(∅)` becomes `Full`.
    pub fn simplify(&self) -> Relation {
        match self.fin_co() {
            Some(FinCo::Finite(s)) if s.is_empty() => Relation::Empty,
            Some(FinCo::Finite(s)) => Relation::Finite(s),
            Some(FinCo::Cofinite(s)) if s.is_empty() => Relation::Full,
            Some(FinCo::Cofinite(s)) => Relation::Cofinite(s),
            None => match self {
                Relation::Override { base, add, remove } => {
                    let (inner, mut a, mut r) = base.peel();
                    for x in add {
                        r.remove(x);
                        a.insert(x.clone());
                    }
                    for x in remove {
                        a.remove(x);
                        r.insert(x.clone());
                    }
                    if a.is_empty() && r.is_empty() {
                        inner
                    } else {
                        Relation::Override {
                            base: Box::new(inner),
                            add: a,
                            remove: r,
                        }
                    }
                }
                other => other.clone(),
            },
        }
    }

    // Innermost non-override base and the flattened add/remove sets.
    fn peel(&self) -> (Relation, BTreeSet<FormulaPair>, BTreeSet<FormulaPair>) {
        match self {
            Relation::Override { base, add, remove } => {
                let (inner, mut a, mut r) = base.peel();
                for x in add {
                    r.remove(x);
                    a.insert(x.clone());
                }
                for x in remove {
                    a.remove(x);
                    r.insert(x.clone());
                }
                (inner, a, r)
            }
            other => (other.clone(), BTreeSet::new(), BTreeSet::new()),
        }
    }

    /// `self Δ other` when it is finite and computable from the
    /// representations; `None` when it is infinite or not decidable here.
    pub fn finite_difference(&self, other: &Relation) -> Option<BTreeSet<FormulaPair>> {
        if self == other {
            return Some(BTreeSet::new());
        }
        if let (Some(a), Some(b)) = (self.fin_co(), other.fin_co()) {
            return match (a, b) {
                (FinCo::Finite(x), FinCo::Finite(y)) | (FinCo::Cofinite(x), FinCo::Cofinite(y)) => {
                    Some(x.symmetric_difference(&y).cloned().collect())
                }
                _ => None,
            };
        }
        let (base_a, add_a, rem_a) = self.peel();
        let (base_b, add_b, rem_b) = other.peel();
        if !same_membership(&base_a, &base_b) {
            return None;
        }
        Some(
            add_a
                .iter()
                .chain(&rem_a)
                .chain(&add_b)
                .chain(&rem_b)
                .filter(|x| self.contains_pair(x) != other.contains_pair(x))
                .cloned()
                .collect(),
        )
    }

    /// Pairs explicitly named by the representation.
    pub fn mentioned_pairs(&self) -> BTreeSet<FormulaPair> {
        match self {
            Relation::Finite(s) | Relation::Cofinite(s) => s.clone(),
            Relation::Override { base, add, remove } => {
                let mut out = base.mentioned_pairs();
                out.extend(add.iter().cloned());
                out.extend(remove.iter().cloned());
                out
            }
            _ => BTreeSet::new(),
        }
    }
}

fn same_membership(a: &Relation, b: &Relation) -> bool {
    match (a, b) {
        (Relation::Tower { indices: x, .. }, Relation::Tower { indices: y, .. }) => x == y,
        _ => a == b || a.fin_co().is_some() && a.fin_co() == b.fin_co(),
    }
}

// The k with `second = imp_tower(first, k)`, if any.
fn tower_index(first: &Formula, second: &Formula) -> Option<usize> {
    let mut k = 0;
    let mut cur = second;
    loop {
        if cur == first {
            return Some(k);
        }
        match cur.kind() {
            FormulaKind::Bin(Connective::Imp, l, r) if l == first => {
                cur = r;
                k += 1;
            }
            _ => return None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RelationRepr {
    Finite {
        pairs: Vec<FormulaPair>,
    },
    Cofinite {
        excluded: Vec<FormulaPair>,
    },
    Full,
    Empty,
    Tower {
        indices: Vec<usize>,
        variant: TowerVariant,
    },
    Override {
        base: Box<RelationRepr>,
        #[serde(default)]
        add: Vec<FormulaPair>,
        #[serde(default)]
        remove: Vec<FormulaPair>,
    },
}

impl From<Relation> for RelationRepr {
    fn from(r: Relation) -> Self {
        match r {
            Relation::Finite(s) => RelationRepr::Finite {
                pairs: s.into_iter().collect(),
            },
            Relation::Cofinite(s) => RelationRepr::Cofinite {
                excluded: s.into_iter().collect(),
            },
            Relation::Full => RelationRepr::Full,
            Relation::Empty => RelationRepr::Empty,
            Relation::Tower { indices, variant } => RelationRepr::Tower {
                indices: indices.into_iter().collect(),
                variant,
            },
            Relation::Override { base, add, remove } => RelationRepr::Override {
                base: Box::new((*base).into()),
                add: add.into_iter().collect(),
                remove: remove.into_iter().collect(),
            },
        }
    }
}

impl TryFrom<RelationRepr> for Relation {
    type Error = String;

    fn try_from(repr: RelationRepr) -> std::result::Result<Self, Self::Error> {
        Ok(match repr {
            RelationRepr::Finite { pairs } => Relation::finite(pairs),
            RelationRepr::Cofinite { excluded } => Relation::cofinite(excluded),
            RelationRepr::Full => Relation::Full,
            RelationRepr::Empty => Relation::Empty,
            RelationRepr::Tower { indices, variant } => {
                Relation::tower(indices, variant).map_err(|e| e.to_string())?
            }
            RelationRepr::Override { base, add, remove } => Relation::override_with(
                Relation::try_from(*base)?,
                add.into_iter().collect(),
                remove.into_iter().collect(),
            )
            .map_err(|e| e.to_string())?,
        })
    }
}

/// An Epstein model `⟨v, R⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub valuation: Valuation,
    pub relation: Relation,
}

impl Model {
    pub fn new(valuation: Valuation, relation: Relation) -> Model {
        Model {
            valuation,
            relation,
        }
    }

    pub fn satisfies(&self, phi: &Formula) -> bool {
        evaluate(self, phi)
    }
}

pub fn rel_contains(relation: &Relation, first: &Formula, second: &Formula) -> bool {
    relation.contains(first, second)
}

/// Truth of `phi` in `model`.
pub fn evaluate(model: &Model, phi: &Formula) -> bool {
    eval_with(&|i| model.valuation.value(i), &model.relation, phi)
}

fn eval_with(value: &dyn Fn(u32) -> bool, rel: &Relation, phi: &Formula) -> bool {
    match phi.kind() {
        FormulaKind::Letter(i) => value(*i),
        FormulaKind::Neg(x) => !eval_with(value, rel, x),
        FormulaKind::Bin(op, l, r) => {
            let a = eval_with(value, rel, l);
            match op {
                Connective::And => a && eval_with(value, rel, r),
                Connective::Or => a || eval_with(value, rel, r),
                Connective::Imp => !a || eval_with(value, rel, r),
                Connective::Iff => a == eval_with(value, rel, r),
                Connective::RelImp => (!a || eval_with(value, rel, r)) && rel.contains(l, r),
                Connective::RelConj => a && eval_with(value, rel, r) && rel.contains(l, r),
            }
        }
    }
}

pub fn models_all<'a>(model: &Model, formulas: impl IntoIterator<Item = &'a Formula>) -> bool {
    formulas.into_iter().all(|phi| evaluate(model, phi))
}

/// `R ⊨ φ`: true under every valuation, with the default letter bound.
pub fn relation_validates(relation: &Relation, phi: &Formula) -> Result<bool> {
    relation_validates_within(relation, phi, DEFAULT_VALIDATION_BOUND)
}

/// `R ⊨ φ`, enumerating the `2^|vars(φ)|` relevant valuations.
pub fn relation_validates_within(relation: &Relation, phi: &Formula, bound: usize) -> Result<bool> {
    let vars: Vec<u32> = phi.vars().into_iter().collect();
    if vars.len() > bound {
        return Err(Error::Capacity {
            vars: vars.len(),
            bound,
        });
    }
    Ok(falsifying_valuation(relation, phi, &vars).is_none())
}

/// A valuation (over `vars`, default false) under which `phi` fails.
pub fn falsifying_valuation(relation: &Relation, phi: &Formula, vars: &[u32]) -> Option<Valuation> {
    (0u64..1u64 << vars.len()).find_map(|bits| {
        let value = |i: u32| {
            vars.iter()
                .position(|&v| v == i)
                .is_some_and(|k| bits >> k & 1 == 1)
        };
        if eval_with(&value, relation, phi) {
            None
        } else {
            Some(Valuation::true_on(
                vars.iter()
                    .enumerate()
                    .filter(|(k, _)| bits >> k & 1 == 1)
                    .map(|(_, v)| *v),
            ))
        }
    })
}
