//! Realisable and separable pairs, the two-phase saturation, the model
//! read off a saturated pair, and verified interpolant search.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semantics::{evaluate, Model, Relation, Valuation};
use crate::syntax::{Connective, Formula, FormulaKind, FormulaPair};
use crate::translation::{f_valid, sat_all, translate, CplFormula};

/// `⟨Γ, Σ⟩`: formulas to make true and formulas to make false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub gamma: Vec<Formula>,
    pub sigma: Vec<Formula>,
}

fn push_unique(xs: &mut Vec<Formula>, x: Formula) {
    if !xs.contains(&x) {
        xs.push(x);
    }
}

impl Pair {
    pub fn new(
        gamma: impl IntoIterator<Item = Formula>,
        sigma: impl IntoIterator<Item = Formula>,
    ) -> Pair {
        let mut p = Pair::default();
        for g in gamma {
            push_unique(&mut p.gamma, g);
        }
        for s in sigma {
            push_unique(&mut p.sigma, s);
        }
        p
    }

    pub fn with_gamma(&self, x: Formula) -> Pair {
        let mut p = self.clone();
        push_unique(&mut p.gamma, x);
        p
    }

    pub fn with_sigma(&self, x: Formula) -> Pair {
        let mut p = self.clone();
        push_unique(&mut p.sigma, x);
        p
    }

    /// Letters occurring on both sides.
    pub fn shared_letters(&self) -> BTreeSet<u32> {
        let side = |xs: &[Formula]| xs.iter().flat_map(|x| x.vars()).collect::<BTreeSet<u32>>();
        side(&self.gamma)
            .intersection(&side(&self.sigma))
            .copied()
            .collect()
    }
}

/// A model making all of `Γ` true and all of `Σ` false, if one exists.
pub fn realisable(t: &Pair) -> Option<Model> {
    let fs: Vec<CplFormula> = t
        .gamma
        .iter()
        .map(translate)
        .chain(t.sigma.iter().map(|s| CplFormula::neg(translate(s))))
        .collect();
    sat_all(&fs).map(|a| a.to_model())
}

/// Letters of `phi` outside its `⊤`/`⊥` subformulas; the constants count
/// as variable-free.
pub fn free_vars(phi: &Formula) -> BTreeSet<u32> {
    if phi.is_top() || phi.is_bottom() {
        return BTreeSet::new();
    }
    match phi.kind() {
        FormulaKind::Letter(i) => BTreeSet::from([*i]),
        FormulaKind::Neg(x) => free_vars(x),
        FormulaKind::Bin(_, l, r) => {
            let mut out = free_vars(l);
            out.extend(free_vars(r));
            out
        }
    }
}

fn contains_constant(phi: &Formula) -> bool {
    phi.subformulas()
        .iter()
        .any(|s| s.is_top() || s.is_bottom())
}

/// `χ` uses only shared letters and neither `⟨Γ, {χ}⟩` nor `⟨{χ}, Σ⟩` is
/// realisable.
pub fn separates(chi: &Formula, t: &Pair) -> bool {
    free_vars(chi).is_subset(&t.shared_letters())
        && realisable(&Pair::new(t.gamma.clone(), [chi.clone()])).is_none()
        && realisable(&Pair::new([chi.clone()], t.sigma.clone())).is_none()
}

/// Candidate separators for `t`, level by level: level 0 holds `⊤`, `⊥`,
/// the shared letters and the subformulas of `t` over shared letters;
/// level `k` adds `k` connectives on top. Within a level, candidates are
/// ordered by size and then structurally.
pub struct Candidates {
    levels: Vec<Vec<Formula>>,
    seen: HashSet<Formula>,
}

impl Candidates {
    pub fn new(t: &Pair) -> Candidates {
        let shared = t.shared_letters();
        let mut leaves: BTreeSet<Formula> = shared.iter().map(|&i| Formula::letter(i)).collect();
        leaves.insert(Formula::top());
        leaves.insert(Formula::bottom());
        for x in t.gamma.iter().chain(&t.sigma) {
            for s in x.subformulas() {
                if free_vars(&s).is_subset(&shared) {
                    leaves.insert(s);
                }
            }
        }
        let mut level: Vec<Formula> = leaves.into_iter().collect();
        level.sort_by(|a, b| (a.node_count(), a).cmp(&(b.node_count(), b)));
        let seen = level.iter().cloned().collect();
        Candidates {
            levels: vec![level],
            seen,
        }
    }

    /// Candidates with exactly `k` connectives above the leaves.
    pub fn level(&mut self, k: usize) -> &[Formula] {
        while self.levels.len() <= k {
            let n = self.levels.len();
            let mut out = Vec::new();
            for x in &self.levels[n - 1] {
                out.push(Formula::neg(x.clone()));
            }
            for i in 0..n {
                for op in Connective::ALL {
                    for l in &self.levels[i] {
                        for r in &self.levels[n - 1 - i] {
                            out.push(Formula::bin(op, l.clone(), r.clone()));
                        }
                    }
                }
            }
            out.retain(|x| self.seen.insert(x.clone()));
            out.sort_by(|a, b| (a.node_count(), a).cmp(&(b.node_count(), b)));
            self.levels.push(out);
        }
        &self.levels[k]
    }
}

/// First candidate (up to `depth` connectives above the leaves) that
/// separates `t`. Counter-models found along the way are cached and used
/// to discard later candidates before calling the solver.
pub fn find_separator(t: &Pair, depth: usize) -> Option<Formula> {
    let mut cands = Candidates::new(t);
    let mut gamma_models: Vec<Model> = Vec::new();
    let mut sigma_models: Vec<Model> = Vec::new();
    for k in 0..=depth {
        for chi in cands.level(k).to_vec() {
            if gamma_models.iter().any(|m| !evaluate(m, &chi))
                || sigma_models.iter().any(|m| evaluate(m, &chi))
            {
                continue;
            }
            if let Some(m) = realisable(&Pair::new(t.gamma.clone(), [chi.clone()])) {
                gamma_models.push(m);
                continue;
            }
            if let Some(m) = realisable(&Pair::new([chi.clone()], t.sigma.clone())) {
                sigma_models.push(m);
                continue;
            }
            return Some(chi);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Root,
    Unsigned,
    Negated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// The pair after this step.
    pub pair: Pair,
    pub branch: Branch,
    /// Whether the unsigned extension (or, at the root, the pair itself)
    /// had a separator within the bound.
    pub separator_found: bool,
}

/// Extends `⟨{φ}, {ψ}⟩` by the proper subformulas of `φ` on the left and
/// then of `ψ` on the right, each unsigned when that keeps the pair without
/// a separator (within `depth`) and negated otherwise.
pub fn saturate(phi: &Formula, psi: &Formula, depth: usize) -> (Pair, Vec<TraceStep>) {
    let mut t = Pair::new([phi.clone()], [psi.clone()]);
    let mut trace = vec![TraceStep {
        pair: t.clone(),
        branch: Branch::Root,
        separator_found: find_separator(&t, depth).is_some(),
    }];
    for x in phi.proper_subformulas() {
        let unsigned = t.with_gamma(x.clone());
        let found = find_separator(&unsigned, depth).is_some();
        t = if found {
            t.with_gamma(Formula::neg(x))
        } else {
            unsigned
        };
        trace.push(TraceStep {
            pair: t.clone(),
            branch: if found {
                Branch::Negated
            } else {
                Branch::Unsigned
            },
            separator_found: found,
        });
    }
    for y in psi.proper_subformulas() {
        let unsigned = t.with_sigma(y.clone());
        let found = find_separator(&unsigned, depth).is_some();
        t = if found {
            t.with_sigma(Formula::neg(y))
        } else {
            unsigned
        };
        trace.push(TraceStep {
            pair: t.clone(),
            branch: if found {
                Branch::Negated
            } else {
                Branch::Unsigned
            },
            separator_found: found,
        });
    }
    (t, trace)
}

/// The model a saturated pair describes: `p` is true iff `p ∈ Γ` or
/// `¬p ∈ Σ`; `⟨φ, ψ⟩` is related iff `φ ↪ ψ` or `φ △ ψ` is in `Γ`, or
/// `¬(φ ↪ ψ)` or `¬(φ △ ψ)` is in `Σ`.
pub fn model_from_pair(t: &Pair) -> Model {
    let mut valuation = Valuation::constant(false);
    for g in &t.gamma {
        if let Some(i) = g.as_letter() {
            valuation.set(i, true);
        }
    }
    let mut pairs: BTreeSet<FormulaPair> = t
        .gamma
        .iter()
        .filter_map(|g| g.relatedness_pair().map(|(_, p)| p))
        .collect();
    for s in &t.sigma {
        if let Some(x) = s.as_neg() {
            if let Some(i) = x.as_letter() {
                valuation.set(i, true);
            }
            if let Some((_, p)) = x.relatedness_pair() {
                pairs.insert(p);
            }
        }
    }
    let relation = if pairs.is_empty() {
        Relation::Empty
    } else {
        Relation::Finite(pairs)
    };
    Model::new(valuation, relation)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub left: bool,
    pub right: bool,
    pub vars: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationResult {
    pub interpolant: Formula,
    pub checks: Checks,
    pub trace: Vec<TraceStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InterpolationResult {
    pub fn verified(&self) -> bool {
        self.checks.left && self.checks.right && self.checks.vars
    }
}

/// Re-checks `χ` as an interpolant for `φ → ψ` from scratch.
pub fn check_interpolant(phi: &Formula, psi: &Formula, chi: &Formula) -> Checks {
    let shared: BTreeSet<u32> = phi.vars().intersection(&psi.vars()).copied().collect();
    Checks {
        left: f_valid(&Formula::imp(phi.clone(), chi.clone())),
        right: f_valid(&Formula::imp(chi.clone(), psi.clone())),
        vars: free_vars(chi).is_subset(&shared),
    }
}

/// An interpolant for the `F`-valid implication `φ → ψ`, found as a
/// separator of `⟨{φ}, {ψ}⟩` and verified independently. `Ok(None)` when
/// none exists within `depth`.
pub fn interpolate(
    phi: &Formula,
    psi: &Formula,
    depth: usize,
) -> Result<Option<InterpolationResult>> {
    if !f_valid(&Formula::imp(phi.clone(), psi.clone())) {
        return Err(Error::Precondition(format!("{phi} -> {psi} is not valid")));
    }
    let t = Pair::new([phi.clone()], [psi.clone()]);
    let Some(chi) = find_separator(&t, depth) else {
        return Ok(None);
    };
    let checks = check_interpolant(phi, psi, &chi);
    let shares_p0 = phi.vars().contains(&0) && psi.vars().contains(&0);
    let note = (contains_constant(&chi) && !shares_p0).then(|| {
        "the interpolant uses T/F as variable-free constants; their letter p0 is not shared"
            .to_string()
    });
    Ok(Some(InterpolationResult {
        interpolant: chi,
        checks,
        trace: vec![TraceStep {
            pair: t,
            branch: Branch::Root,
            separator_found: true,
        }],
        note,
    }))
}

/// `⟨v ≡ 0, ∅⟩`, which falsifies every `φ ↪ ψ`: no relatedness implication
/// is a theorem, so interpolation for `↪` holds vacuously.
pub fn rel_imp_noninterpolation_demo() -> Model {
    let m = Model::new(Valuation::constant(false), Relation::Empty);
    let samples = [
        "p ~> p",
        "T ~> T",
        "F ~> T",
        "q ~> r",
        "(p & q) ~> p",
        "(p ~> q) ~> (p ~> q)",
    ];
    for s in samples {
        let phi: Formula = s.parse().expect("fixed formula");
        assert!(!evaluate(&m, &phi), "{s} should be false");
    }
    m
}
