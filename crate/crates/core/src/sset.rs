//! Ω sets, S-set membership and sampling, the syntactic bounds `R_min` and
//! `R_max`, an S-set invariance fuzzer, and undefinability counterexamples.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::proofsys::{condition_check, Condition, ConditionVerdict};
use crate::random;
use crate::semantics::{evaluate, Model, Relation, Valuation};
use crate::syntax::{Connective, Formula, FormulaPair};
use crate::translation::{assignment_of, cpl_evaluate, Atom, CplFormula};

/// `⟨φ, ψ⟩ ∈ Ω^M`, i.e. `M ⊭ φ → ψ`.
pub fn in_omega(model: &Model, phi: &Formula, psi: &Formula) -> bool {
    evaluate(model, phi) && !evaluate(model, psi)
}

fn omega_pair(model: &Model, pair: &FormulaPair) -> bool {
    in_omega(model, &pair.first, &pair.second)
}

/// Formulas by weight: letter `p_i` weighs `i + 1`, each connective 1.
/// Each weight class is sorted structurally.
#[derive(Default)]
pub struct FormulaLevels {
    levels: Vec<Vec<Formula>>,
}

impl FormulaLevels {
    pub fn new() -> FormulaLevels {
        FormulaLevels {
            levels: vec![Vec::new()],
        }
    }

    pub fn level(&mut self, weight: usize) -> &[Formula] {
        while self.levels.len() <= weight {
            let w = self.levels.len();
            let mut out = vec![Formula::letter(w as u32 - 1)];
            out.extend(self.levels[w - 1].iter().cloned().map(Formula::neg));
            for lw in 1..w.saturating_sub(1) {
                let rw = w - 1 - lw;
                for op in Connective::ALL {
                    for l in &self.levels[lw] {
                        for r in &self.levels[rw] {
                            out.push(Formula::bin(op, l.clone(), r.clone()));
                        }
                    }
                }
            }
            out.sort();
            self.levels.push(out);
        }
        &self.levels[weight]
    }
}

/// First `count` members of `Ω^M` in (total weight, structural) order.
pub fn enumerate_omega(model: &Model, count: usize) -> Vec<FormulaPair> {
    let mut levels = FormulaLevels::new();
    let mut out = Vec::with_capacity(count);
    let mut total = 2;
    while out.len() < count {
        let mut batch = Vec::new();
        for lw in 1..total {
            let left: Vec<Formula> = levels.level(lw).to_vec();
            let right = levels.level(total - lw);
            for l in left.iter().filter(|l| evaluate(model, l)) {
                for r in right.iter().filter(|r| !evaluate(model, r)) {
                    batch.push(FormulaPair::new(l.clone(), r.clone()));
                }
            }
        }
        batch.sort();
        out.extend(batch.into_iter().take(count - out.len()));
        total += 1;
    }
    out
}

/// Outcome of an S-set membership query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MembershipVerdict {
    Yes,
    /// `distinguishing` has different truth values in the two models.
    No {
        distinguishing: Formula,
    },
    Unknown {
        reason: String,
    },
}

impl MembershipVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, MembershipVerdict::Yes)
    }
}

/// `N ∈ S^M`: same valuation, and every pair on which the relations differ
/// lies in `Ω^M`.
pub fn sset_member(m: &Model, n: &Model) -> MembershipVerdict {
    if let Some(i) = m.valuation.first_difference(&n.valuation) {
        return MembershipVerdict::No {
            distinguishing: Formula::letter(i),
        };
    }
    let Some(diff) = m.relation.finite_difference(&n.relation) else {
        return MembershipVerdict::Unknown {
            reason: "the relations differ on a set that is not finitely representable".into(),
        };
    };
    match diff.into_iter().find(|x| !omega_pair(m, x)) {
        // `φ → ψ` holds in both, so `φ ↪ ψ` tracks the relation
        Some(x) => MembershipVerdict::No {
            distinguishing: Formula::rel_imp(x.first, x.second),
        },
        None => MembershipVerdict::Yes,
    }
}

/// `relation` with the membership of each listed pair flipped.
pub fn toggle(relation: &Relation, pairs: &[FormulaPair]) -> Relation {
    let (mut add, mut remove) = (BTreeSet::new(), BTreeSet::new());
    for x in pairs {
        if relation.contains_pair(x) {
            remove.insert(x.clone());
        } else {
            add.insert(x.clone());
        }
    }
    Relation::override_with(relation.clone(), add, remove)
        .expect("a pair is either present or absent")
        .simplify()
}

/// `k` distinct members of `S^M`, each differing from `M` on a nonempty
/// subset of the first `⌈log₂ k⌉ + 1` Ω-pairs.
pub fn sample_equivalents(m: &Model, k: usize, seed: u64) -> Vec<Model> {
    if k == 0 {
        return Vec::new();
    }
    let bits = k.next_power_of_two().trailing_zeros() as usize + 1;
    let omega = enumerate_omega(m, bits);
    let mut masks: Vec<u64> = (1..1u64 << bits).collect();
    masks.shuffle(&mut random::rng(seed));
    masks
        .into_iter()
        .take(k)
        .map(|mask| {
            let chosen: Vec<FormulaPair> = (0..bits)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| omega[b].clone())
                .collect();
            Model::new(m.valuation.clone(), toggle(&m.relation, &chosen))
        })
        .collect()
}

pub fn rmin_contains(m: &Model, phi: &Formula, psi: &Formula) -> bool {
    evaluate(m, &Formula::rel_imp(phi.clone(), psi.clone()))
}

pub fn rmax_contains(m: &Model, phi: &Formula, psi: &Formula) -> bool {
    rmin_contains(m, phi, psi) || in_omega(m, phi, psi)
}

fn pair_atoms(a: &CplFormula) -> Vec<FormulaPair> {
    a.atoms()
        .into_iter()
        .filter_map(|x| match x {
            Atom::Pair(p) => Some(p),
            Atom::Letter(_) => None,
        })
        .collect()
}

fn cpl_holds(m: &Model, a: &CplFormula) -> bool {
    cpl_evaluate(&assignment_of(m, a.atoms()), a)
}

/// Searches for `M ⊨ A` and `N ∈ S^M` with `N ⊭ A`. Models decide the pair
/// atoms of `A` at random; neighbours flip Ω-pairs among those atoms, one
/// at a time and then in random subsets, up to `toggle_bound` per model.
/// `None` means the budget ran out, not that `A` is invariant.
pub fn falsify_sset_invariance(
    a: &CplFormula,
    model_samples: usize,
    toggle_bound: usize,
    seed: u64,
) -> Option<(Model, Model)> {
    let mut rng = random::rng(seed);
    let pairs = pair_atoms(a);
    let letters = a
        .atoms()
        .iter()
        .filter_map(|x| match x {
            Atom::Letter(i) => Some(*i),
            Atom::Pair(_) => None,
        })
        .max()
        .unwrap_or(0);
    for _ in 0..model_samples {
        let m = Model::new(
            random::valuation(&mut rng, letters),
            random::relation(&mut rng, &pairs),
        );
        if !cpl_holds(&m, a) {
            continue;
        }
        let omega: Vec<FormulaPair> = pairs
            .iter()
            .filter(|x| omega_pair(&m, x))
            .cloned()
            .collect();
        if omega.is_empty() {
            continue;
        }
        let mut tried = 0;
        let mut candidates: Vec<Vec<FormulaPair>> = omega.iter().map(|x| vec![x.clone()]).collect();
        while tried < toggle_bound {
            let chosen = if tried < candidates.len() {
                std::mem::take(&mut candidates[tried])
            } else {
                omega
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .cloned()
                    .collect()
            };
            tried += 1;
            let n = Model::new(m.valuation.clone(), toggle(&m.relation, &chosen));
            if !cpl_holds(&n, a) {
                return Some((m, n));
            }
        }
    }
    None
}

/// Relation condition targeted by an undefinability counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetCondition {
    Symmetry,
    NCondition,
    Both,
}

impl std::str::FromStr for TargetCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetry" => Ok(TargetCondition::Symmetry),
            "n-condition" => Ok(TargetCondition::NCondition),
            "both" => Ok(TargetCondition::Both),
            other => Err(Error::Invalid(format!("unknown condition {other:?}"))),
        }
    }
}

/// A pair present in the relation whose condition-mandated partner is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub present: FormulaPair,
    pub missing: FormulaPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub valuation: Valuation,
    #[serde(flatten)]
    pub verdict: MembershipVerdict,
}

/// A relation meeting a condition, an S-equivalent one that does not, and
/// the evidence for both claims.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub condition: TargetCondition,
    pub base: Relation,
    pub modified: Relation,
    pub toggled_pair: FormulaPair,
    /// Whether the toggled pair was added (the usual case) or removed.
    pub added: bool,
    pub violation_witness: Violation,
    pub membership_checks: Vec<MembershipCheck>,
}

/// Valuations used to spot-check S-set membership of a counterexample.
pub fn sample_valuations() -> Vec<Valuation> {
    vec![
        Valuation::constant(false),
        Valuation::constant(true),
        Valuation::true_on([1, 3]),
    ]
}

fn require_holds(base: &Relation, c: Condition) -> Result<()> {
    match condition_check(base, c) {
        ConditionVerdict::Holds => Ok(()),
        ConditionVerdict::Fails(x) => Err(Error::Precondition(format!(
            "base relation violates {c}: {x} is missing"
        ))),
        ConditionVerdict::Unknown => Err(Error::Undecidable),
    }
}

// Negation tower over an arbitrary base.
fn negs(base: Formula, n: usize) -> Formula {
    (0..n).fold(base, |f, _| Formula::neg(f))
}

const SEARCH_LIMIT: usize = 64;

fn symmetry_toggle(base: &Relation) -> Option<(FormulaPair, bool, Violation)> {
    let tb = FormulaPair::new(Formula::top(), Formula::bottom());
    if !base.contains_pair(&tb.swapped()) {
        // symmetry keeps ⟨⊤,⊥⟩ out as well
        return Some((
            tb.clone(),
            true,
            Violation {
                present: tb.clone(),
                missing: tb.swapped(),
            },
        ));
    }
    Some((
        tb.clone(),
        false,
        Violation {
            present: tb.swapped(),
            missing: tb,
        },
    ))
}

fn ncondition_toggle(base: &Relation) -> Option<(FormulaPair, bool, Violation)> {
    let bot = Formula::bottom();
    // add ⟨¬φ, ⊥⟩ with φ false and ⟨φ, ⊥⟩ absent
    for n in 0..SEARCH_LIMIT {
        let phi = negs(bot.clone(), 2 * n);
        let missing = FormulaPair::new(phi.clone(), bot.clone());
        if !base.contains_pair(&missing) {
            let present = FormulaPair::new(Formula::neg(phi), bot.clone());
            return Some((present.clone(), true, Violation { present, missing }));
        }
    }
    // otherwise remove ⟨φ, ⊥⟩ with φ true and ⟨¬φ, ⊥⟩ present
    for n in 0..SEARCH_LIMIT {
        let phi = negs(Formula::top(), 2 * n);
        let present = FormulaPair::new(Formula::neg(phi.clone()), bot.clone());
        if base.contains_pair(&present) {
            let missing = FormulaPair::new(phi, bot.clone());
            return Some((missing.clone(), false, Violation { present, missing }));
        }
    }
    None
}

/// Builds `R′` from `base` by flipping one pair that lies in `Ω` of every
/// model, so `R′` is S-equivalent to `base` under every valuation, yet
/// `R′` violates `condition`.
pub fn undefinability_counterexample(
    condition: TargetCondition,
    base: &Relation,
) -> Result<CounterexampleRecord> {
    let toggled = match condition {
        TargetCondition::Symmetry => {
            require_holds(base, Condition::Symmetry)?;
            symmetry_toggle(base)
        }
        TargetCondition::NCondition => {
            require_holds(base, Condition::NCondition)?;
            ncondition_toggle(base)
        }
        TargetCondition::Both => {
            require_holds(base, Condition::Symmetry)?;
            require_holds(base, Condition::NCondition)?;
            symmetry_toggle(base)
        }
    };
    let (toggled_pair, added, violation) = toggled.ok_or_else(|| {
        Error::Precondition("no suitable pair to toggle within the search limit".into())
    })?;
    let modified = toggle(base, std::slice::from_ref(&toggled_pair));
    if !modified.contains_pair(&violation.present) || modified.contains_pair(&violation.missing) {
        return Err(Error::Invalid(
            "constructed relation does not violate the condition".into(),
        ));
    }
    let membership_checks = sample_valuations()
        .into_iter()
        .map(|v| {
            let verdict = sset_member(
                &Model::new(v.clone(), base.clone()),
                &Model::new(v.clone(), modified.clone()),
            );
            MembershipCheck {
                valuation: v,
                verdict,
            }
        })
        .collect();
    Ok(CounterexampleRecord {
        condition,
        base: base.clone(),
        modified,
        toggled_pair,
        added,
        violation_witness: violation,
        membership_checks,
    })
}
