//! Hilbert systems `F`, `FS`, `FN`, `FSN` and extensions by extra axioms:
//! schema matching, proof checking, bounded Lindenbaum extension, canonical
//! models and relation conditions.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semantics::{FinCo, Model, Relation, Valuation};
use crate::syntax::{match_schema, parse, Formula, FormulaKind, FormulaPair, Substitution};
use crate::translation::{is_cpl_instance, sat_all, translate, CplFormula};

/// A named axiom schema; its letters are schema variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomSchema {
    pub name: String,
    pub pattern: Formula,
}

impl AxiomSchema {
    fn builtin(name: &str, pattern: &str) -> AxiomSchema {
        AxiomSchema {
            name: name.into(),
            pattern: parse(pattern).expect("built-in schema parses"),
        }
    }

    pub fn instance(&self, sigma: &Substitution) -> Formula {
        self.pattern.substitute(sigma)
    }
}

pub fn schema_a1() -> AxiomSchema {
    AxiomSchema::builtin("A1", "(p ~> q) -> (p -> q)")
}

pub fn schema_a2() -> AxiomSchema {
    AxiomSchema::builtin("A2", "(p ^ q) <-> (p ~> q) & (p & q)")
}

pub fn schema_s() -> AxiomSchema {
    AxiomSchema::builtin("s", "(p ~> q) -> ((q ~> p) | !(q -> p))")
}

pub fn schema_n1() -> AxiomSchema {
    AxiomSchema::builtin("n1", "(!p ~> q) -> ((p ~> q) | !(p -> q))")
}

pub fn schema_n2() -> AxiomSchema {
    AxiomSchema::builtin("n2", "((!!p ~> q) & !(!p -> q)) -> (p ~> q)")
}

pub fn schema_sn() -> AxiomSchema {
    AxiomSchema::builtin("sn", "(!(p -> q) & (!p ~> q)) -> (q ~> p)")
}

pub fn schema_ns() -> AxiomSchema {
    AxiomSchema::builtin("ns", "(!(!p -> q) & (q ~> !p)) -> (p ~> q)")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    F,
    FS,
    FN,
    FSN,
    Custom,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::F => "F",
            SystemKind::FS => "FS",
            SystemKind::FN => "FN",
            SystemKind::FSN => "FSN",
            SystemKind::Custom => "Custom",
        })
    }
}

/// Schemas plus a finite set `Λ` of extra axioms, closed under substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofSystem {
    pub kind: SystemKind,
    pub schemas: Vec<AxiomSchema>,
    pub lambda: Vec<Formula>,
}

impl ProofSystem {
    pub fn new(kind: SystemKind) -> ProofSystem {
        let mut schemas = vec![schema_a1(), schema_a2()];
        match kind {
            SystemKind::F | SystemKind::Custom => {}
            SystemKind::FS => schemas.push(schema_s()),
            SystemKind::FN => schemas.extend([schema_n1(), schema_n2()]),
            SystemKind::FSN => schemas.extend([
                schema_s(),
                schema_n1(),
                schema_n2(),
                schema_sn(),
                schema_ns(),
            ]),
        }
        ProofSystem {
            kind,
            schemas,
            lambda: Vec::new(),
        }
    }

    pub fn f() -> ProofSystem {
        ProofSystem::new(SystemKind::F)
    }

    /// `F` extended by `lambda`.
    pub fn custom(lambda: Vec<Formula>) -> ProofSystem {
        ProofSystem {
            lambda,
            ..ProofSystem::new(SystemKind::Custom)
        }
    }

    pub fn with_lambda(mut self, lambda: Vec<Formula>) -> ProofSystem {
        self.lambda = lambda;
        self
    }

    /// The relation condition this system is complete for, if any.
    pub fn mode(&self) -> CanonicalMode {
        match self.kind {
            SystemKind::FS => CanonicalMode::S,
            SystemKind::FN => CanonicalMode::N,
            SystemKind::FSN => CanonicalMode::SN,
            SystemKind::F | SystemKind::Custom => CanonicalMode::Plain,
        }
    }

    /// First schema, in registry order, of which `phi` is an instance.
    pub fn is_axiom_instance(&self, phi: &Formula) -> Option<(String, Substitution)> {
        self.schemas
            .iter()
            .find_map(|s| match_schema(&s.pattern, phi).map(|sigma| (s.name.clone(), sigma)))
    }

    /// Index of the first extra axiom `phi` instantiates.
    pub fn lambda_instance(&self, phi: &Formula) -> Option<(usize, Substitution)> {
        self.lambda
            .iter()
            .enumerate()
            .find_map(|(i, l)| match_schema(l, phi).map(|sigma| (i, sigma)))
    }
}

impl std::str::FromStr for ProofSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "F" => SystemKind::F,
            "FS" => SystemKind::FS,
            "FN" => SystemKind::FN,
            "FSN" => SystemKind::FSN,
            other => return Err(Error::Invalid(format!("unknown proof system {other:?}"))),
        };
        Ok(ProofSystem::new(kind))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Justification {
    Premise { index: usize },
    Schema { name: String },
    Cpl,
    Lambda { index: usize },
    Mp { imp: usize, ant: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofLine {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Proof {
    #[serde(default)]
    pub premises: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

/// System selector as it appears in proof files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Named(String),
    Custom { custom_axioms: Vec<Formula> },
}

impl SystemSpec {
    pub fn to_system(&self) -> Result<ProofSystem> {
        match self {
            SystemSpec::Named(name) => name.parse(),
            SystemSpec::Custom { custom_axioms } => Ok(ProofSystem::custom(custom_axioms.clone())),
        }
    }
}

/// A proof together with the system it is meant for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofDocument {
    pub system: SystemSpec,
    #[serde(flatten)]
    pub proof: Proof,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineVerdict {
    pub line: usize,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofReport {
    pub ok: bool,
    pub lines: Vec<LineVerdict>,
}

impl ProofReport {
    pub fn errors(&self) -> impl Iterator<Item = &LineVerdict> {
        self.lines.iter().filter(|l| !l.ok)
    }
}

fn check_line(sys: &ProofSystem, proof: &Proof, i: usize) -> std::result::Result<(), String> {
    let line = &proof.lines[i];
    let phi = &line.formula;
    match &line.just {
        Justification::Premise { index } => {
            let premise = proof.premises.get(*index).ok_or_else(|| {
                format!(
                    "premise index {index} out of range ({} premises)",
                    proof.premises.len()
                )
            })?;
            if premise != phi {
                return Err(format!("formula differs from premise {index} ({premise})"));
            }
        }
        Justification::Schema { name } => {
            let schema = sys
                .schemas
                .iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| format!("system {} has no schema {name:?}", sys.kind))?;
            if match_schema(&schema.pattern, phi).is_none() {
                return Err(format!(
                    "not an instance of schema {name} ({})",
                    schema.pattern
                ));
            }
        }
        Justification::Cpl => {
            if !is_cpl_instance(phi) {
                return Err("boolean skeleton is not a classical tautology".into());
            }
        }
        Justification::Lambda { index } => {
            let axiom = sys.lambda.get(*index).ok_or_else(|| {
                format!(
                    "extra axiom index {index} out of range ({} axioms)",
                    sys.lambda.len()
                )
            })?;
            if match_schema(axiom, phi).is_none() {
                return Err(format!("not an instance of extra axiom {index} ({axiom})"));
            }
        }
        Justification::Mp { imp, ant } => {
            for (what, j) in [("implication", imp), ("antecedent", ant)] {
                if *j >= i {
                    return Err(format!("{what} line {j} does not precede line {i}"));
                }
            }
            let expected = Formula::imp(proof.lines[*ant].formula.clone(), phi.clone());
            if proof.lines[*imp].formula != expected {
                return Err(format!("line {imp} is not `{expected}`"));
            }
        }
    }
    Ok(())
}

/// Checks every line independently; the proof is correct iff all are.
pub fn check_proof(sys: &ProofSystem, proof: &Proof) -> ProofReport {
    let lines: Vec<LineVerdict> = (0..proof.lines.len())
        .map(|i| match check_line(sys, proof, i) {
            Ok(()) => LineVerdict {
                line: i,
                ok: true,
                error: None,
            },
            Err(e) => LineVerdict {
                line: i,
                ok: false,
                error: Some(e),
            },
        })
        .collect();
    ProofReport {
        ok: !lines.is_empty() && lines.iter().all(|l| l.ok),
        lines,
    }
}

/// `⊢ (p ^ q) -> (p -> q)` in `F`: two axiom instances, a classical
/// tautology tying them together, and two applications of modus ponens.
pub fn sample_proof() -> Proof {
    let f = |s: &str| parse(s).expect("fixed formula");
    let line = |s: &str, just| ProofLine {
        formula: f(s),
        just,
    };
    Proof {
        premises: Vec::new(),
        lines: vec![
            line(
                "(p ^ q) <-> (p ~> q) & (p & q)",
                Justification::Schema { name: "A2".into() },
            ),
            line(
                "(p ~> q) -> (p -> q)",
                Justification::Schema { name: "A1".into() },
            ),
            line(
                "((p ^ q) <-> (p ~> q) & (p & q)) -> ((p ~> q) -> (p -> q)) -> (p ^ q) -> (p -> q)",
                Justification::Cpl,
            ),
            line(
                "((p ~> q) -> (p -> q)) -> (p ^ q) -> (p -> q)",
                Justification::Mp { imp: 2, ant: 0 },
            ),
            line("(p ^ q) -> (p -> q)", Justification::Mp { imp: 3, ant: 1 }),
        ],
    }
}

/// Subformula closure of `formulas` plus one negation of each, in
/// first-occurrence order with subformulas before their parents.
pub fn closure<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for phi in formulas {
        for s in phi.subformulas() {
            for g in [s.clone(), Formula::neg(s)] {
                if seen.insert(g.clone()) {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Finite approximation of a maximal consistent set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedMcs {
    pub universe: Vec<Formula>,
    pub members: BTreeSet<Formula>,
}

impl BoundedMcs {
    pub fn contains(&self, phi: &Formula) -> bool {
        self.members.contains(phi)
    }
}

/// Instances of the system's schemas and extra axioms obtained by matching
/// every pattern subformula that mentions all of the pattern's letters
/// against the universe (and against `φ ↪ ψ` for each `φ △ ψ` there).
pub fn universe_instances(sys: &ProofSystem, universe: &[Formula]) -> Vec<Formula> {
    let mut targets: Vec<Formula> = universe.to_vec();
    for u in universe {
        if let FormulaKind::Bin(crate::syntax::Connective::RelConj, l, r) = u.kind() {
            targets.push(Formula::rel_imp(l.clone(), r.clone()));
        }
    }
    let patterns = sys
        .schemas
        .iter()
        .map(|s| &s.pattern)
        .chain(sys.lambda.iter());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pattern in patterns {
        let vars = pattern.vars();
        if vars.is_empty() {
            if seen.insert(pattern.clone()) {
                out.push(pattern.clone());
            }
            continue;
        }
        let keys: Vec<Formula> = pattern
            .subformulas()
            .into_iter()
            .filter(|s| s.vars() == vars)
            .collect();
        for key in &keys {
            for t in &targets {
                if let Some(sigma) = match_schema(key, t) {
                    let inst = pattern.substitute(&sigma);
                    if seen.insert(inst.clone()) {
                        out.push(inst);
                    }
                }
            }
        }
    }
    out
}

/// Satisfiability of `set` together with the given axiom instances.
fn consistent(set: &[&Formula], instances: &[CplFormula]) -> bool {
    let mut fs: Vec<CplFormula> = instances.to_vec();
    fs.extend(set.iter().map(|f| translate(f)));
    sat_all(&fs).is_some()
}

/// Greedily extends `sigma` within `universe`: each formula, in universe
/// order, is kept when the working set stays consistent together with the
/// system's instances over the universe. `None` when `sigma` itself fails.
pub fn bounded_lindenbaum(
    sys: &ProofSystem,
    sigma: &[Formula],
    universe: &[Formula],
) -> Result<Option<BoundedMcs>> {
    let in_universe: HashSet<&Formula> = universe.iter().collect();
    for u in universe {
        if let Some(missing) = u
            .proper_subformulas()
            .into_iter()
            .find(|s| !in_universe.contains(s))
        {
            return Err(Error::UniverseNotClosed(missing.to_string()));
        }
    }
    if let Some(outside) = sigma.iter().find(|s| !in_universe.contains(s)) {
        return Err(Error::Precondition(format!(
            "{outside} is not in the universe"
        )));
    }
    let instances: Vec<CplFormula> = universe_instances(sys, universe)
        .iter()
        .map(translate)
        .collect();
    let mut members: Vec<&Formula> = sigma.iter().collect();
    if !consistent(&members, &instances) {
        return Ok(None);
    }
    for u in universe {
        if members.contains(&u) {
            continue;
        }
        members.push(u);
        if !consistent(&members, &instances) {
            members.pop();
        }
    }
    Ok(Some(BoundedMcs {
        universe: universe.to_vec(),
        members: members.into_iter().cloned().collect(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanonicalMode {
    Plain,
    S,
    N,
    SN,
}

impl std::str::FromStr for CanonicalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(CanonicalMode::Plain),
            "S" | "s" => Ok(CanonicalMode::S),
            "N" | "n" => Ok(CanonicalMode::N),
            "SN" | "sn" => Ok(CanonicalMode::SN),
            other => Err(Error::Invalid(format!("unknown canonical mode {other:?}"))),
        }
    }
}

/// Pairs `⟨φ, ψ⟩` with `φ ↪ ψ` (or `φ △ ψ`) a member.
pub fn canonical_pairs(mcs: &BoundedMcs) -> BTreeSet<FormulaPair> {
    mcs.members
        .iter()
        .filter_map(|m| m.relatedness_pair().map(|(_, p)| p))
        .collect()
}

/// Valuation from member letters; relation from member relatedness
/// formulas, with the swapped pairs (S), the pairs `⟨φ, ψ⟩` for members
/// `¬φ ↪ ψ` (N), or both (SN), then closed under the mode's conditions.
pub fn canonical_model(mcs: &BoundedMcs, mode: CanonicalMode) -> Model {
    let valuation = Valuation::true_on(mcs.members.iter().filter_map(Formula::as_letter));
    let plain = canonical_pairs(mcs);
    let mut pairs = plain.clone();
    let (sym, neg) = match mode {
        CanonicalMode::Plain => (false, false),
        CanonicalMode::S => (true, false),
        CanonicalMode::N => (false, true),
        CanonicalMode::SN => (true, true),
    };
    if sym {
        pairs.extend(plain.iter().map(FormulaPair::swapped));
    }
    if neg {
        pairs.extend(plain.iter().filter_map(|p| {
            p.first
                .as_neg()
                .map(|x| FormulaPair::new(x.clone(), p.second.clone()))
        }));
    }
    let relation = Relation::Finite(close_pairs(pairs, sym, neg));
    Model::new(valuation, relation.simplify())
}

/// Least superset closed under symmetry and/or the n-condition.
pub fn close_pairs(
    mut pairs: BTreeSet<FormulaPair>,
    symmetric: bool,
    n_condition: bool,
) -> BTreeSet<FormulaPair> {
    let mut frontier: Vec<FormulaPair> = pairs.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        let mut next = Vec::new();
        if symmetric {
            next.push(p.swapped());
        }
        if n_condition {
            if let Some(x) = p.first.as_neg() {
                next.push(FormulaPair::new(x.clone(), p.second.clone()));
            }
        }
        for q in next {
            if pairs.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    pairs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Symmetry,
    NCondition,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Symmetry => "symmetry",
            Condition::NCondition => "n-condition",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionVerdict {
    Holds,
    /// The pair the condition demands but the relation lacks.
    Fails(FormulaPair),
    Unknown,
}

// The pair `c` demands given that `p` is present.
fn demanded(p: &FormulaPair, c: Condition) -> Option<FormulaPair> {
    match c {
        Condition::Symmetry => Some(p.swapped()),
        Condition::NCondition => p
            .first
            .as_neg()
            .map(|x| FormulaPair::new(x.clone(), p.second.clone())),
    }
}

/// Whether `relation` satisfies `condition`; exact on finite and cofinite
/// representations and on towers.
pub fn condition_check(relation: &Relation, condition: Condition) -> ConditionVerdict {
    if let Relation::Tower { indices, .. } = relation {
        let Some(&k) = indices.iter().next() else {
            return ConditionVerdict::Holds;
        };
        let p = Formula::letter(1);
        return ConditionVerdict::Fails(match condition {
            Condition::Symmetry => FormulaPair::new(crate::syntax::imp_tower(&p, k), p),
            Condition::NCondition => {
                FormulaPair::new(p.clone(), crate::syntax::imp_tower(&Formula::neg(p), k))
            }
        });
    }
    match relation.fin_co() {
        Some(FinCo::Finite(pairs)) => pairs
            .iter()
            .filter_map(|p| demanded(p, condition))
            .find(|q| !pairs.contains(q))
            .map_or(ConditionVerdict::Holds, ConditionVerdict::Fails),
        // a missing pair violates the condition iff a pair demanding it is present
        Some(FinCo::Cofinite(excluded)) => excluded
            .iter()
            .find(|missing| match condition {
                Condition::Symmetry => !excluded.contains(&missing.swapped()),
                Condition::NCondition => !excluded.contains(&FormulaPair::new(
                    Formula::neg(missing.first.clone()),
                    missing.second.clone(),
                )),
            })
            .cloned()
            .map_or(ConditionVerdict::Holds, ConditionVerdict::Fails),
        None => ConditionVerdict::Unknown,
    }
}
