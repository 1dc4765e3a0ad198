//! Verified, reproducible constructions behind the completeness,
//! incompleteness and inexpressibility results.
//!
//! Universal claims over substitutions are checked on seeded samples plus
//! the critical substitutions the arguments turn on.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::random;
use crate::semantics::{evaluate, relation_validates, Model, Relation, Valuation};
use crate::syntax::{
    imp_tower, lambda_tower, letters, Connective, Formula, FormulaKind, FormulaPair, Substitution,
};

/// Substitution depth used for sampled instances.
pub const SAMPLE_DEPTH: usize = 3;
/// Letters `p1..=p3` appear in sampled substitution images.
pub const SAMPLE_LETTERS: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub desc: String,
    /// Number of cases examined.
    pub n: usize,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub lemma: String,
    pub objects: Map<String, Value>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl WitnessReport {
    fn new(lemma: &str, params: Value) -> WitnessReport {
        let mut objects = Map::new();
        objects.insert("params".into(), params);
        WitnessReport {
            lemma: lemma.into(),
            objects,
            checks: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn object(&mut self, key: &str, value: impl Serialize) {
        self.objects.insert(
            key.into(),
            serde_json::to_value(value).expect("serializable object"),
        );
    }

    fn check(&mut self, desc: impl Into<String>, n: usize, pass: bool) {
        self.checks.push(Check {
            desc: desc.into(),
            n,
            pass,
        });
        if !pass {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass && self.checks.iter().all(|c| c.pass)
    }
}

fn p() -> Formula {
    Formula::letter(letters::P)
}

fn q() -> Formula {
    Formula::letter(letters::Q)
}

/// `p -> (q ~> p)`.
pub fn alpha() -> Formula {
    Formula::imp(p(), Formula::rel_imp(q(), p()))
}

fn sample_substitutions(n: usize, seed: u64) -> Vec<Substitution> {
    let mut rng = random::rng(seed);
    (0..n)
        .map(|_| {
            random::substitution(
                &mut rng,
                &[letters::P, letters::Q],
                SAMPLE_DEPTH,
                SAMPLE_LETTERS,
            )
        })
        .collect()
}

/// If `R` lacks `⟨p, p⟩`, the instance `p -> (p ~> p)` of `α` fails under
/// the all-true valuation; otherwise `R ⊨ p ~> p` and the implication from
/// the sampled instances of `α` holds trivially.
pub fn alpha_forces_pp(relation: &Relation, sample: usize, seed: u64) -> Result<WitnessReport> {
    let mut r = WitnessReport::new(
        "alpha-forces-pp",
        json!({"relation": relation, "sample": sample, "seed": seed}),
    );
    r.object("alpha", alpha());
    let pp = Formula::rel_imp(p(), p());
    if !relation.contains(&p(), &p()) {
        let sigma = Substitution::new().with(letters::Q, p());
        let instance = sigma.apply(&alpha());
        let model = Model::new(Valuation::constant(true), relation.clone());
        r.object("substitution", json!({"q": p()}));
        r.object("instance", &instance);
        r.object("model", &model);
        r.check("<p, p> is absent from R", 1, true);
        r.check(
            "the all-true model falsifies p -> (p ~> p)",
            1,
            !evaluate(&model, &instance),
        );
    } else {
        let validates = relation_validates(relation, &pp)?;
        r.check("R validates p ~> p", 1, validates);
        let sigmas = sample_substitutions(sample, seed);
        let mut held = 0;
        for sigma in &sigmas {
            if relation_validates(relation, &sigma.apply(&alpha()))? {
                held += 1;
            }
        }
        r.object("instances_validated", held);
        r.check(
            "sampled instances of alpha all validated implies R validates p ~> p",
            sigmas.len(),
            held < sigmas.len() || validates,
        );
    }
    Ok(r)
}

/// `⟨v ≡ 0, FOR² ∖ {⟨p, p⟩}⟩` satisfies every instance of `α` but not
/// `p ~> p`.
pub fn alpha_nonderivability_model(sample: usize, seed: u64) -> WitnessReport {
    let mut r = WitnessReport::new(
        "alpha-nonderivability",
        json!({"sample": sample, "seed": seed}),
    );
    let model = Model::new(
        Valuation::constant(false),
        Relation::cofinite([FormulaPair::new(p(), p())]),
    );
    r.object("model", &model);
    r.check(
        "M falsifies p ~> p",
        1,
        !evaluate(&model, &Formula::rel_imp(p(), p())),
    );
    let critical = Substitution::new().with(letters::Q, p()).apply(&alpha());
    r.check("M satisfies p -> (p ~> p)", 1, evaluate(&model, &critical));
    let fresh = Substitution::new()
        .with(letters::P, q())
        .with(letters::Q, Formula::letter(letters::R))
        .apply(&alpha());
    r.check("M satisfies q -> (r ~> q)", 1, evaluate(&model, &fresh));
    let sigmas = sample_substitutions(sample, seed);
    let failures: Vec<Formula> = sigmas
        .iter()
        .map(|s| s.apply(&alpha()))
        .filter(|x| !evaluate(&model, x))
        .collect();
    r.object("failing_instances", &failures);
    r.check(
        "M satisfies sampled instances of alpha",
        sigmas.len(),
        failures.is_empty(),
    );
    r
}

fn require_indices(name: &str, set: &BTreeSet<usize>) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Precondition(format!("{name} must be nonempty")));
    }
    if set.contains(&0) {
        return Err(Error::Precondition(format!(
            "{name} must contain only indices >= 1"
        )));
    }
    Ok(())
}

/// Separates the logics generated by `{p ~> p^k : k ∈ T}` and by the same
/// over `V` with the model `⟨v, FOR² ∖ {⟨p, p^n⟩}⟩`, `n` the least index in
/// exactly one of the sets.
pub fn kt_separation(
    t: &BTreeSet<usize>,
    v: &BTreeSet<usize>,
    sample: usize,
    seed: u64,
) -> Result<WitnessReport> {
    require_indices("T", t)?;
    require_indices("V", v)?;
    let Some(&n) = t.symmetric_difference(v).next() else {
        return Err(Error::Precondition("T and V must differ".into()));
    };
    let (owner, other) = if t.contains(&n) { ("T", v) } else { ("V", t) };
    let mut r = WitnessReport::new(
        "kt-separation",
        json!({"t": t, "v": v, "sample": sample, "seed": seed}),
    );
    let pn = imp_tower(&p(), n);
    let separator = Formula::rel_imp(p(), pn.clone());
    let model = Model::new(
        Valuation::constant(false),
        Relation::cofinite([FormulaPair::new(p(), pn)]),
    );
    r.object("n", n);
    r.object("separator", &separator);
    r.object("separator_from", owner);
    r.object("model", &model);
    r.check(
        format!("M falsifies {separator}"),
        1,
        !evaluate(&model, &separator),
    );
    let mut instances: Vec<Formula> = other
        .iter()
        .map(|&k| Formula::rel_imp(p(), imp_tower(&p(), k)))
        .collect();
    let mut rng = random::rng(seed);
    let ks: Vec<usize> = other.iter().copied().collect();
    for i in 0..sample {
        let image = random::formula(&mut rng, SAMPLE_DEPTH, SAMPLE_LETTERS);
        let k = ks[i % ks.len()];
        instances.push(Formula::rel_imp(image.clone(), imp_tower(&image, k)));
    }
    let mut failures = Vec::new();
    for x in &instances {
        if !relation_validates(&model.relation, x)? {
            failures.push(x.clone());
        }
    }
    r.object("failing_instances", &failures);
    r.check(
        "R validates sampled instances over the other index set",
        instances.len(),
        failures.is_empty(),
    );
    Ok(r)
}

/// `q ~> p^n` with the tower `p^0 = q ~> p`.
pub fn lambda_axiom(n: usize) -> Formula {
    Formula::rel_imp(q(), lambda_tower(&p(), &q(), n))
}

/// Shows that `{σ(q ~> p^n) : n ∈ S}` forces `p ~> p` semantically while
/// a model of all its instances falsifies `p ~> p`.
pub fn lambda_incompleteness(
    s: &BTreeSet<usize>,
    sample: usize,
    seed: u64,
) -> Result<WitnessReport> {
    require_indices("S", s)?;
    let mut r = WitnessReport::new(
        "lambda-incompleteness",
        json!({"s": s, "sample": sample, "seed": seed}),
    );
    let lacking = Model::new(
        Valuation::constant(true),
        Relation::cofinite([FormulaPair::new(p(), p())]),
    );
    r.object("forcing_model", &lacking);
    let sigma = Substitution::new().with(letters::Q, p());
    for &n in s {
        let instance = sigma.apply(&lambda_axiom(n));
        r.check(
            format!("relation without <p, p> falsifies {instance} when p is true"),
            1,
            !evaluate(&lacking, &instance),
        );
    }
    let model = Model::new(
        Valuation::constant(false),
        Relation::cofinite([FormulaPair::new(p(), p())]),
    );
    r.object("model", &model);
    r.check(
        "M falsifies p ~> p",
        1,
        !evaluate(&model, &Formula::rel_imp(p(), p())),
    );
    let mut instances: Vec<Formula> = s.iter().map(|&n| lambda_axiom(n)).collect();
    instances.extend(s.iter().map(|&n| sigma.apply(&lambda_axiom(n))));
    let sigmas = sample_substitutions(sample, seed);
    let ns: Vec<usize> = s.iter().copied().collect();
    for (i, sub) in sigmas.iter().enumerate() {
        instances.push(sub.apply(&lambda_axiom(ns[i % ns.len()])));
    }
    let failures: Vec<Formula> = instances
        .iter()
        .filter(|x| !evaluate(&model, x))
        .cloned()
        .collect();
    r.object("failing_instances", &failures);
    r.check(
        "M satisfies sampled instances",
        instances.len(),
        failures.is_empty(),
    );
    Ok(r)
}

// Truth-table signature of a formula under both relations, over all
// valuations of the sweep letters, plus its identity with the constants.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Signature {
    with_pair: u64,
    without: u64,
    shape: Shape,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
enum Shape {
    Other,
    P0,
    NotP0,
    Top,
    Bottom,
}

struct Sweep {
    letters: Vec<u32>,
    full_mask: u64,
}

impl Sweep {
    fn rows(&self) -> usize {
        1 << self.letters.len()
    }

    fn letter(&self, i: u32) -> Signature {
        let k = self
            .letters
            .iter()
            .position(|&l| l == i)
            .expect("sweep letter");
        let bits = (0..self.rows())
            .filter(|row| row >> k & 1 == 1)
            .fold(0u64, |acc, row| acc | 1 << row);
        Signature {
            with_pair: bits,
            without: bits,
            shape: if i == 0 { Shape::P0 } else { Shape::Other },
        }
    }

    fn neg(&self, x: Signature) -> Signature {
        Signature {
            with_pair: !x.with_pair & self.full_mask,
            without: !x.without & self.full_mask,
            shape: match x.shape {
                Shape::P0 => Shape::NotP0,
                Shape::Top => Shape::Bottom,
                _ => Shape::Other,
            },
        }
    }

    fn bin(&self, op: Connective, l: Signature, r: Signature) -> Signature {
        let m = self.full_mask;
        let classical = |a: u64, b: u64| match op {
            Connective::And | Connective::RelConj => a & b,
            Connective::Or => a | b,
            Connective::Imp | Connective::RelImp => (!a | b) & m,
            Connective::Iff => !(a ^ b) & m,
        };
        let related = l.shape == Shape::Top && r.shape == Shape::Bottom;
        let (with_pair, without) = if op.is_relatedness() {
            (
                if related {
                    classical(l.with_pair, r.with_pair)
                } else {
                    0
                },
                0,
            )
        } else {
            (
                classical(l.with_pair, r.with_pair),
                classical(l.without, r.without),
            )
        };
        let shape = if op == Connective::Or && l.shape == Shape::P0 && r.shape == Shape::NotP0 {
            Shape::Top
        } else {
            Shape::Other
        };
        Signature {
            with_pair,
            without,
            shape,
        }
    }

    fn signature_of(&self, phi: &Formula) -> Signature {
        match phi.kind() {
            FormulaKind::Letter(i) => self.letter(*i),
            FormulaKind::Neg(x) => self.neg(self.signature_of(x)),
            FormulaKind::Bin(op, l, r) => self.bin(*op, self.signature_of(l), self.signature_of(r)),
        }
    }
}

/// Per signature class: how many formulas, and one representative.
type Classes = HashMap<Signature, (u128, Formula)>;

/// Every formula over `{p, q}` with at most `size_bound` connectives fails
/// "`R ⊨ χ` iff `⟨⊤, ⊥⟩ ∈ R`" on `{⟨⊤, ⊥⟩}` or on `∅`.
pub fn inexpressibility_sweep(size_bound: usize) -> Result<WitnessReport> {
    inexpressibility_sweep_over(&[letters::P, letters::Q], size_bound, 0)
}

/// The sweep over the given letters (at most 6). Formulas are grouped by
/// their truth tables under both relations, which decide `R ⊨ χ`; the
/// grouping is cross-checked against direct evaluation on every formula of
/// up to three connectives and on seeded samples of each larger size.
pub fn inexpressibility_sweep_over(
    sweep_letters: &[u32],
    size_bound: usize,
    seed: u64,
) -> Result<WitnessReport> {
    let mut ls: Vec<u32> = sweep_letters.to_vec();
    ls.sort_unstable();
    ls.dedup();
    if ls.is_empty() || ls.len() > 6 {
        return Err(Error::Invalid(
            "the sweep needs between 1 and 6 letters".into(),
        ));
    }
    let sweep = Sweep {
        full_mask: if ls.len() == 6 {
            u64::MAX
        } else {
            (1u64 << (1 << ls.len())) - 1
        },
        letters: ls.clone(),
    };
    let r0 = Relation::finite([FormulaPair::new(Formula::top(), Formula::bottom())]);
    let empty = Relation::Empty;
    let mut r = WitnessReport::new(
        "inexpressibility-sweep",
        json!({"letters": ls.iter().map(|&i| Formula::letter(i)).collect::<Vec<_>>(), "size_bound": size_bound, "seed": seed}),
    );
    r.object("with_pair", &r0);
    r.object("without", &empty);

    // classes[k]: formulas with exactly k connectives
    let mut classes: Vec<Classes> = Vec::new();
    let mut level0 = Classes::new();
    for &i in &ls {
        let e = level0
            .entry(sweep.letter(i))
            .or_insert((0, Formula::letter(i)));
        e.0 += 1;
    }
    classes.push(level0);
    for k in 1..=size_bound {
        let mut next = Classes::new();
        let mut add = |sig: Signature, count: u128, example: &dyn Fn() -> Formula| {
            next.entry(sig).or_insert_with(|| (0, example())).0 += count;
        };
        for (sig, (count, ex)) in &classes[k - 1] {
            add(sweep.neg(*sig), *count, &|| Formula::neg(ex.clone()));
        }
        for i in 0..k {
            for (ls_, (lc, lx)) in &classes[i] {
                for (rs, (rc, rx)) in &classes[k - 1 - i] {
                    for op in Connective::ALL {
                        add(sweep.bin(op, *ls_, *rs), lc * rc, &|| {
                            Formula::bin(op, lx.clone(), rx.clone())
                        });
                    }
                }
            }
        }
        classes.push(next);
    }

    let all = sweep.full_mask;
    let survives = |s: &Signature| s.with_pair == all && s.without != all;
    let mut total: u128 = 0;
    let mut survivors: u128 = 0;
    let mut examples = Vec::new();
    let mut per_size = Vec::new();
    for level in &classes {
        let count: u128 = level.values().map(|(c, _)| c).sum();
        per_size.push(count.to_string());
        total += count;
        for (sig, (c, ex)) in level {
            if survives(sig) {
                survivors += c;
                examples.push(ex.clone());
            }
        }
    }
    r.object("formulas_per_size", &per_size);
    r.object("formulas_total", total.to_string());
    r.object("survivors", survivors.to_string());
    examples.sort();
    r.object("survivor_examples", &examples);
    r.check(
        "no formula expresses membership of <T, F>",
        total as usize,
        survivors == 0,
    );

    // explicit enumeration of the small sizes against the oracle
    let explicit_bound = size_bound.min(3);
    let mut explicit: Vec<Vec<Formula>> = vec![ls.iter().map(|&i| Formula::letter(i)).collect()];
    for k in 1..=explicit_bound {
        let mut out: Vec<Formula> = explicit[k - 1].iter().cloned().map(Formula::neg).collect();
        for i in 0..k {
            for l in &explicit[i] {
                for rr in &explicit[k - 1 - i] {
                    for op in Connective::ALL {
                        out.push(Formula::bin(op, l.clone(), rr.clone()));
                    }
                }
            }
        }
        explicit.push(out);
    }
    let mut mismatches = 0usize;
    let mut class_mismatches = 0usize;
    let mut checked = 0usize;
    let mut direct_survivors = 0usize;
    let mut oracle = |phi: &Formula, sig: Signature| -> Result<()> {
        checked += 1;
        let a = relation_validates(&r0, phi)?;
        let b = relation_validates(&empty, phi)?;
        if a != (sig.with_pair == all) || b != (sig.without == all) {
            mismatches += 1;
        }
        if a && !b {
            direct_survivors += 1;
        }
        Ok(())
    };
    for (k, level) in explicit.iter().enumerate() {
        let mut counts: HashMap<Signature, u128> = HashMap::new();
        for phi in level {
            let sig = sweep.signature_of(phi);
            *counts.entry(sig).or_default() += 1;
            oracle(phi, sig)?;
        }
        let dp: HashMap<Signature, u128> = classes[k].iter().map(|(s, (c, _))| (*s, *c)).collect();
        if counts != dp {
            class_mismatches += 1;
        }
    }
    let mut rng = random::rng(seed);
    for (k, level) in classes.iter().enumerate().skip(explicit_bound + 1) {
        for _ in 0..200 {
            let phi = random_with_connectives(&mut rng, k, &ls);
            let sig = sweep.signature_of(&phi);
            if !level.contains_key(&sig) {
                class_mismatches += 1;
            }
            oracle(&phi, sig)?;
        }
    }
    r.object("oracle_checked", checked);
    r.check(
        "truth-table classes agree with direct validation (exhaustive up to 3 connectives, sampled above)",
        checked,
        mismatches == 0 && class_mismatches == 0,
    );
    r.check(
        "no directly validated formula expresses membership",
        checked,
        direct_survivors == 0,
    );
    Ok(r)
}

fn random_with_connectives(rng: &mut impl rand::Rng, k: usize, ls: &[u32]) -> Formula {
    use rand::seq::SliceRandom;
    if k == 0 {
        return Formula::letter(*ls.choose(rng).expect("letters"));
    }
    if rng.gen_bool(0.2) {
        return Formula::neg(random_with_connectives(rng, k - 1, ls));
    }
    let left = rng.gen_range(0..k);
    let op = *Connective::ALL.choose(rng).expect("nonempty");
    Formula::bin(
        op,
        random_with_connectives(rng, left, ls),
        random_with_connectives(rng, k - 1 - left, ls),
    )
}

fn param<T: serde::de::DeserializeOwned>(report: &WitnessReport, key: &str) -> Result<T> {
    let v = report
        .objects
        .get("params")
        .and_then(|p| p.get(key))
        .ok_or_else(|| Error::Invalid(format!("report lacks parameter {key:?}")))?;
    Ok(serde_json::from_value(v.clone())?)
}

/// Re-runs the construction recorded in `report` from its parameters.
pub fn rerun(report: &WitnessReport) -> Result<WitnessReport> {
    match report.lemma.as_str() {
        "alpha-forces-pp" => alpha_forces_pp(
            &param(report, "relation")?,
            param(report, "sample")?,
            param(report, "seed")?,
        ),
        "alpha-nonderivability" => Ok(alpha_nonderivability_model(
            param(report, "sample")?,
            param(report, "seed")?,
        )),
        "kt-separation" => kt_separation(
            &param(report, "t")?,
            &param(report, "v")?,
            param(report, "sample")?,
            param(report, "seed")?,
        ),
        "lambda-incompleteness" => lambda_incompleteness(
            &param(report, "s")?,
            param(report, "sample")?,
            param(report, "seed")?,
        ),
        "inexpressibility-sweep" => {
            let ls: Vec<Formula> = param(report, "letters")?;
            let ls: Vec<u32> = ls
                .iter()
                .map(|f| {
                    f.as_letter()
                        .ok_or_else(|| Error::Invalid(format!("{f} is not a letter")))
                })
                .collect::<Result<_>>()?;
            inexpressibility_sweep_over(&ls, param(report, "size_bound")?, param(report, "seed")?)
        }
        other => Err(Error::Invalid(format!("unknown lemma {other:?}"))),
    }
}

/// `report` passes and re-running it reproduces it exactly.
pub fn reverify(report: &WitnessReport) -> Result<bool> {
    Ok(report.passed() && rerun(report)? == *report)
}
