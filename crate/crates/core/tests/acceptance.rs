//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use epstein::cli;
use epstein::interpolation::{check_interpolant, interpolate, realisable, Pair};
use epstein::proofsys::{
    bounded_lindenbaum, canonical_model, check_proof, close_pairs, closure, condition_check,
    sample_proof, schema_n1, schema_n2, schema_ns, schema_s, schema_sn, AxiomSchema, CanonicalMode,
    Condition, ConditionVerdict, Justification, ProofSystem,
};
use epstein::random;
use epstein::semantics::{evaluate, relation_validates, Model, Relation};
use epstein::sset::{
    enumerate_omega, falsify_sset_invariance, sample_equivalents, sample_valuations, sset_member,
    toggle, undefinability_counterexample, TargetCondition,
};
use epstein::syntax::{parse, Formula, FormulaPair};
use epstein::translation::{
    assignment_of, atoms, cpl_evaluate, f_valid, find_model, parse_cpl, translate, CplFormula,
};
use epstein::witnesses::{self, reverify, WitnessReport};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn f(s: &str) -> Formula {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn cli_run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("epstein").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn axiom_validity() -> Outcome {
    let start = Instant::now();
    for axiom in ["(p ~> q) -> (p -> q)", "(p ^ q) <-> (p ~> q) & (p & q)"] {
        let (code, out) = cli_run(&["theorem", axiom]);
        ensure(code == 0 && out == "valid\n", || {
            format!("{axiom}: exit {code}, {out:?}")
        })?;
    }
    let (code, out) = cli_run(&["theorem", "p ~> p"]);
    ensure(code == 1, || format!("p ~> p: exit {code}"))?;
    let json = out
        .strip_prefix("invalid\n")
        .ok_or("missing verdict line")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("countermodel.json");
    std::fs::write(&path, json).map_err(|e| e.to_string())?;
    let (code, out) = cli_run(&[
        "eval",
        "--model",
        path.to_str().unwrap(),
        "--formula",
        "p ~> p",
    ]);
    ensure(code == 1 && out == "false\n", || {
        format!("re-evaluation gave exit {code}, {out:?}")
    })?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("both axioms valid; p ~> p rejected, countermodel re-verified through eval".into())
}

fn translation_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(2);
    let mut agree = 0;
    for _ in 0..1000 {
        let phi = random::formula(&mut rng, 5, 3);
        let m = random::model_for(&mut rng, [&phi], 3);
        let a = assignment_of(&m, atoms(&phi));
        if evaluate(&m, &phi) == cpl_evaluate(&a, &translate(&phi)) {
            agree += 1;
        }
    }
    ensure(agree == 1000, || format!("{} disagreements", 1000 - agree))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("1000/1000 agree".into())
}

fn micro_example() -> Outcome {
    let r = Relation::finite([FormulaPair::new(f("p"), f("p"))]);
    let got = ["p ~> p", "q ~> q", "p", "!p"]
        .map(|s| relation_validates(&r, &f(s)).map_err(|e| e.to_string()));
    let got: Vec<bool> = got.into_iter().collect::<Result<_, _>>()?;
    ensure(got == [true, false, false, false], || {
        format!("got {got:?}")
    })?;
    Ok("validates p ~> p; rejects q ~> q, p, !p".into())
}

fn sset_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(4);
    let mut neighbours = 0;
    let mut comparisons = 0;
    for _ in 0..100 {
        let seeds: Vec<Formula> = (0..3).map(|_| random::formula(&mut rng, 3, 3)).collect();
        let m = random::model_for(&mut rng, &seeds, 3);
        let omega = enumerate_omega(&m, 50);
        ensure(omega.len() == 50, || "fewer than 50 Ω pairs".into())?;
        for _ in 0..20 {
            let k = rng.gen_range(1..=3);
            let chosen: Vec<FormulaPair> = omega.choose_multiple(&mut rng, k).cloned().collect();
            let n = Model::new(m.valuation.clone(), toggle(&m.relation, &chosen));
            ensure(sset_member(&m, &n).is_yes(), || {
                format!("toggling {chosen:?} left the S-set")
            })?;
            neighbours += 1;
            // formulas that mention the toggled pairs, then random ones
            let mut phis: Vec<Formula> = Vec::with_capacity(200);
            for pair in &chosen {
                let (a, b) = (pair.first.clone(), pair.second.clone());
                phis.push(Formula::rel_imp(a.clone(), b.clone()));
                phis.push(Formula::rel_conj(a.clone(), b.clone()));
                phis.push(Formula::or(Formula::rel_imp(a.clone(), b.clone()), f("q")));
                phis.push(Formula::neg(Formula::rel_imp(a, b)));
            }
            while phis.len() < 200 {
                phis.push(random::formula(&mut rng, 4, 3));
            }
            for phi in &phis {
                ensure(evaluate(&m, phi) == evaluate(&n, phi), || {
                    format!("theories differ on {phi}")
                })?;
                comparisons += 1;
            }
        }
        let eq = sample_equivalents(&m, 10, rng.gen());
        let distinct: BTreeSet<String> = eq
            .iter()
            .map(|x| serde_json::to_string(x).unwrap())
            .collect();
        ensure(eq.len() == 10 && distinct.len() == 10, || {
            "sample_equivalents not 10 distinct".into()
        })?;
        ensure(eq.iter().all(|x| sset_member(&m, x).is_yes()), || {
            "unverified equivalent".into()
        })?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{neighbours} neighbours Yes, {comparisons} formula comparisons agree, 100×10 equivalents verified"))
}

fn invariance_fuzzer() -> Outcome {
    let bare = parse_cpl("a<p0 | !p0, !(p0 | !p0)>").map_err(|e| e.to_string())?;
    ensure(falsify_sset_invariance(&bare, 100, 20, 0).is_some(), || {
        "no witness for the bare atom".into()
    })?;
    let mut rng = random::rng(5);
    for i in 0..100 {
        let phi = random::formula(&mut rng, 4, 3);
        let st: CplFormula = translate(&phi);
        if let Some((m, n)) = falsify_sset_invariance(&st, 100, 20, i) {
            return Err(format!("translation of {phi} separated {m:?} and {n:?}"));
        }
    }
    Ok("bare pair atom falsified; 100 translations survive".into())
}

fn proof_checker() -> Outcome {
    let sys = ProofSystem::f();
    let proof = sample_proof();
    ensure(check_proof(&sys, &proof).ok, || {
        "documented proof rejected".into()
    })?;
    let mut mutants = Vec::new();
    let mut m = proof.clone();
    m.lines[4].just = Justification::Mp { imp: 2, ant: 1 };
    mutants.push(("wrong MP index", m));
    let mut m = proof.clone();
    m.lines[1].just = Justification::Schema { name: "A2".into() };
    mutants.push(("wrong schema name", m));
    let mut m = proof.clone();
    m.lines[0].formula = f("(p ^ q) <-> (p ~> q) & (p | q)");
    mutants.push(("corrupted formula", m));
    let mut m = proof.clone();
    m.lines[0].just = Justification::Premise { index: 0 };
    mutants.push(("bad premise index", m));
    let mut m = proof.clone();
    m.lines[2].formula =
        f("((p ^ q) <-> (p ~> q) & (p & q)) -> ((p ~> q) -> (p -> q)) -> (p ~> q)");
    mutants.push(("cpl on non-tautologous skeleton", m));
    for (name, m) in &mutants {
        ensure(!check_proof(&sys, m).ok, || {
            format!("mutation accepted: {name}")
        })?;
    }
    Ok("proof accepted; 5/5 mutations rejected".into())
}

fn soundness_run(
    rng: &mut random::SeededRng,
    schemas: &[AxiomSchema],
    symmetric: bool,
    n_condition: bool,
) -> Result<usize, String> {
    let mut evaluated = 0;
    for _ in 0..200 {
        let instances: Vec<Formula> = (0..20)
            .map(|i| {
                let schema = &schemas[i % schemas.len()];
                let sigma = random::substitution(rng, &[1, 2], 2, 2);
                schema.instance(&sigma)
            })
            .collect();
        let pairs: BTreeSet<FormulaPair> = instances
            .iter()
            .flat_map(random::relevant_pairs)
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let relation = Relation::finite(close_pairs(pairs, symmetric, n_condition));
        for (flag, c) in [
            (symmetric, Condition::Symmetry),
            (n_condition, Condition::NCondition),
        ] {
            if flag {
                ensure(
                    condition_check(&relation, c) == ConditionVerdict::Holds,
                    || format!("{c} fails"),
                )?;
            }
        }
        for phi in &instances {
            for _ in 0..4 {
                let v = random::valuation(rng, 2);
                let m = Model::new(v, relation.clone());
                ensure(evaluate(&m, phi), || {
                    format!("{phi} fails in {}", serde_json::to_string(&m).unwrap())
                })?;
                evaluated += 1;
            }
        }
    }
    Ok(evaluated)
}

fn soundness_sampling() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(7);
    let s = soundness_run(&mut rng, &[schema_s()], true, false)?;
    let n = soundness_run(&mut rng, &[schema_n1(), schema_n2()], false, true)?;
    let sn = soundness_run(&mut rng, &[schema_sn(), schema_ns()], true, true)?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "zero failures: FS {s}, FN {n}, FSN {sn} evaluations"
    ))
}

fn bounded_completeness() -> Outcome {
    let mut rng = random::rng(8);
    let systems = [
        ("F", CanonicalMode::Plain),
        ("FS", CanonicalMode::S),
        ("FN", CanonicalMode::N),
        ("FSN", CanonicalMode::SN),
    ];
    let mut done = 0;
    let mut extension_consistent = [0usize; 4];
    while done < 25 {
        let k = rng.gen_range(1..=3);
        let sigma: Vec<Formula> = (0..k).map(|_| random::formula(&mut rng, 2, 3)).collect();
        let universe = closure(&sigma);
        if universe.len() > 40 || find_model(&sigma).is_none() {
            continue;
        }
        done += 1;
        for (i, (name, mode)) in systems.iter().enumerate() {
            let sys: ProofSystem = name.parse().map_err(|e: epstein::Error| e.to_string())?;
            let mcs = bounded_lindenbaum(&sys, &sigma, &universe).map_err(|e| e.to_string())?;
            let Some(mcs) = mcs else {
                ensure(*name != "F", || {
                    format!("consistent Σ {sigma:?} rejected by F")
                })?;
                continue;
            };
            extension_consistent[i] += 1;
            let m = canonical_model(&mcs, *mode);
            for phi in &universe {
                ensure(evaluate(&m, phi) == mcs.contains(phi), || {
                    format!("{name}: truth lemma fails at {phi}")
                })?;
            }
            let wanted: &[Condition] = match mode {
                CanonicalMode::Plain => &[],
                CanonicalMode::S => &[Condition::Symmetry],
                CanonicalMode::N => &[Condition::NCondition],
                CanonicalMode::SN => &[Condition::Symmetry, Condition::NCondition],
            };
            for &c in wanted {
                ensure(
                    condition_check(&m.relation, c) == ConditionVerdict::Holds,
                    || format!("{name}: {c} fails"),
                )?;
            }
        }
    }
    Ok(format!(
        "25 Σ; canonical models exact on the universe (F {}, FS {}, FN {}, FSN {} consistent), conditions hold",
        extension_consistent[0], extension_consistent[1], extension_consistent[2], extension_consistent[3]
    ))
}

const CURATED: [(&str, &str); 20] = [
    ("p ^ q", "p | s"),
    ("(p ~> q) & p", "q | r"),
    ("p & q", "p | r"),
    ("p", "p | q"),
    ("p & (p -> q)", "q | r"),
    ("(p ~> q) & r", "p -> q"),
    ("p ^ q", "q | s"),
    ("(p ~> q) & (q ~> r) & p", "r | s"),
    ("!(p | q)", "!p | r"),
    ("(p ^ q) & r", "p ~> q"),
    ("(p ~> q) & s", "(p ~> q) | r"),
    ("(p ~> q) & !q", "!p | s"),
    ("p & !p", "p & q"),
    ("p & r", "q -> p"),
    ("(p <-> q) & p", "q | r"),
    ("(p ^ q) & (q ~> r)", "r | s"),
    ("(p ~> q) & (p ~> r) & p", "q & r | s"),
    ("!(p -> q) & r", "p & !q | s"),
    ("(p ^ r) & s", "r | q"),
    ("(p ~> q) & (q ~> p) & (p | q)", "p & q | r"),
];

fn interpolation_corpus() -> Outcome {
    let start = Instant::now();
    for (a, b) in CURATED {
        let (phi, psi) = (f(a), f(b));
        ensure(
            phi.vars().intersection(&psi.vars()).next().is_some(),
            || format!("{a} / {b} share no letter"),
        )?;
        let result = interpolate(&phi, &psi, 3)
            .map_err(|e| format!("{a} -> {b}: {e}"))?
            .ok_or_else(|| format!("{a} -> {b}: no interpolant at depth 3"))?;
        let checks = check_interpolant(&phi, &psi, &result.interpolant);
        ensure(
            checks.left && checks.right && checks.vars && result.verified(),
            || format!("{a} -> {b}: {} fails {checks:?}", result.interpolant),
        )?;
    }
    let mut rng = random::rng(9);
    for _ in 0..500 {
        let g: Vec<Formula> = (0..rng.gen_range(1..=2))
            .map(|_| random::formula(&mut rng, 3, 3))
            .collect();
        let s: Vec<Formula> = (0..rng.gen_range(1..=2))
            .map(|_| random::formula(&mut rng, 3, 3))
            .collect();
        let conj = g.iter().cloned().reduce(Formula::and).expect("nonempty");
        let disj = s.iter().cloned().reduce(Formula::or).expect("nonempty");
        let valid = f_valid(&Formula::imp(conj, disj));
        let t = Pair::new(g, s);
        match realisable(&t) {
            Some(m) => {
                ensure(!valid, || {
                    format!("{t:?} realisable although the implication is valid")
                })?;
                ensure(
                    t.gamma.iter().all(|x| evaluate(&m, x))
                        && t.sigma.iter().all(|x| !evaluate(&m, x)),
                    || format!("bad realising model for {t:?}"),
                )?;
            }
            None => ensure(valid, || {
                format!("{t:?} unrealisable although the implication is invalid")
            })?,
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok("20/20 interpolants verified; duality holds on 500 pairs".into())
}

fn reverified(r: &WitnessReport) -> Result<(), String> {
    ensure(reverify(r).map_err(|e| e.to_string())?, || {
        format!("{} failed or did not reproduce: {r:?}", r.lemma)
    })
}

fn witness_demos() -> Outcome {
    let start = Instant::now();
    let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<_>>();
    reverified(&witnesses::alpha_nonderivability_model(100, 0))?;
    reverified(
        &witnesses::kt_separation(&set(&[1]), &set(&[2]), 100, 0).map_err(|e| e.to_string())?,
    )?;
    reverified(
        &witnesses::lambda_incompleteness(&set(&[1, 3]), 100, 0).map_err(|e| e.to_string())?,
    )?;
    for condition in [
        TargetCondition::Symmetry,
        TargetCondition::NCondition,
        TargetCondition::Both,
    ] {
        let rec = undefinability_counterexample(condition, &Relation::Empty)
            .map_err(|e| e.to_string())?;
        let wanted: &[Condition] = match condition {
            TargetCondition::Symmetry => &[Condition::Symmetry],
            TargetCondition::NCondition => &[Condition::NCondition],
            TargetCondition::Both => &[Condition::Symmetry, Condition::NCondition],
        };
        for &c in wanted {
            ensure(
                condition_check(&rec.base, c) == ConditionVerdict::Holds,
                || format!("base violates {c}"),
            )?;
        }
        ensure(
            wanted.iter().any(|&c| {
                matches!(
                    condition_check(&rec.modified, c),
                    ConditionVerdict::Fails(_)
                )
            }),
            || format!("{condition:?}: modified relation still satisfies the condition"),
        )?;
        for v in sample_valuations() {
            let m = Model::new(v.clone(), rec.base.clone());
            let n = Model::new(v, rec.modified.clone());
            ensure(sset_member(&m, &n).is_yes(), || {
                format!("{condition:?}: not S-equivalent")
            })?;
        }
        ensure(
            rec.membership_checks.iter().all(|c| c.verdict.is_yes()),
            || "recorded check failed".into(),
        )?;
    }
    let sweep = witnesses::inexpressibility_sweep(5).map_err(|e| e.to_string())?;
    reverified(&sweep)?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "all witnesses pass and reproduce; sweep over {} formulas, {} survivors",
        sweep.objects["formulas_total"].as_str().unwrap_or("?"),
        sweep.objects["survivors"].as_str().unwrap_or("?")
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("axiom validity", axiom_validity),
        ("translation invariance", translation_invariance),
        ("single-pair relation example", micro_example),
        ("S-set suite", sset_suite),
        ("invariance fuzzer", invariance_fuzzer),
        ("proof checker", proof_checker),
        ("soundness sampling", soundness_sampling),
        ("bounded completeness", bounded_completeness),
        ("interpolation corpus", interpolation_corpus),
        ("witness demos", witness_demos),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
