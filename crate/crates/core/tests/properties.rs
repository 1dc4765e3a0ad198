//! Property tests for the invariants the library relies on.

use std::collections::BTreeSet;

use proptest::prelude::*;

use epstein::interpolation::{
    find_separator, model_from_pair, realisable, saturate, separates, Branch, Pair,
};
use epstein::proofsys::{check_proof, sample_proof, Justification, Proof, ProofSystem};
use epstein::random;
use epstein::semantics::{evaluate, models_all, rel_contains, Model, Relation, Valuation};
use epstein::sset::{
    rmax_contains, rmin_contains, sample_equivalents, sset_member, toggle, MembershipVerdict,
};
use epstein::syntax::{
    imp_tower, match_schema, parse, Connective, Formula, FormulaPair, Substitution,
};
use epstein::translation::{
    assignment_of, atoms, cpl_evaluate, f_valid, is_cpl_instance, sat, translate, CplFormula,
};
use epstein::witnesses;

fn connective() -> impl Strategy<Value = Connective> {
    proptest::sample::select(Connective::ALL.to_vec())
}

fn formula(depth: u32, letters: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        8 => (1..=letters).prop_map(Formula::letter),
        1 => Just(Formula::top()),
        1 => Just(Formula::bottom()),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            1 => inner.clone().prop_map(Formula::neg),
            4 => (connective(), inner.clone(), inner).prop_map(|(op, l, r)| Formula::bin(op, l, r)),
        ]
    })
    .boxed()
}

fn substitution(letters: u32) -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(1..=letters, formula(2, letters), 0..=letters as usize)
        .prop_map(|m| m.into_iter().collect())
}

/// A model whose relation decides the relatedness pairs of `phis` at random.
fn model_for(phis: &[&Formula], seed: u64) -> Model {
    random::model_for(&mut random::rng(seed), phis.iter().copied(), 4)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn print_parse_round_trip(phi in formula(6, 4)) {
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn substitution_composition(phi in formula(4, 3), s in substitution(3), t in substitution(3)) {
        prop_assert_eq!(s.compose(&t).apply(&phi), s.apply(&t.apply(&phi)));
    }

    #[test]
    fn schema_matching(schema in formula(3, 3), target in formula(4, 3), s in substitution(3)) {
        if let Some(sigma) = match_schema(&schema, &target) {
            prop_assert_eq!(sigma.apply(&schema), target);
        }
        let inst = s.restrict(&schema.vars()).apply(&schema);
        let found = match_schema(&schema, &inst);
        prop_assert!(found.is_some());
        prop_assert_eq!(found.unwrap().apply(&schema), inst);
    }

    #[test]
    fn tower_lengths(base in formula(2, 2), n in 0usize..8) {
        let tower = imp_tower(&base, n);
        let mut spine = 0;
        let mut cur = &tower;
        while cur != &base {
            let (op, l, r) = cur.as_bin().expect("tower spine");
            prop_assert_eq!(op, Connective::Imp);
            prop_assert_eq!(l, &base);
            spine += 1;
            cur = r;
        }
        prop_assert_eq!(spine, n);
    }

    #[test]
    fn relatedness_axioms_hold(phi in formula(4, 3), psi in formula(4, 3), seed: u64) {
        let a2_left = Formula::rel_conj(phi.clone(), psi.clone());
        let a2_right = Formula::and(Formula::rel_imp(phi.clone(), psi.clone()), Formula::and(phi.clone(), psi.clone()));
        let a1 = Formula::imp(Formula::rel_imp(phi.clone(), psi.clone()), Formula::imp(phi.clone(), psi.clone()));
        let m = model_for(&[&a2_left, &a2_right], seed);
        prop_assert_eq!(evaluate(&m, &a2_left), evaluate(&m, &a2_right));
        prop_assert!(evaluate(&m, &a1));
    }

    #[test]
    fn evaluation_is_local(phi in formula(4, 3), noise in formula(3, 6), seed: u64, flips in proptest::collection::vec(4u32..10, 0..4)) {
        let m = model_for(&[&phi], seed);
        let mut v = m.valuation.clone();
        for i in flips {
            v.set(i, !v.value(i));
        }
        // flip pairs that are not subformula pairs of φ
        let subs: BTreeSet<Formula> = phi.subformulas().into_iter().collect();
        let outside: Vec<FormulaPair> = noise
            .subformulas()
            .into_iter()
            .flat_map(|x| [FormulaPair::new(x.clone(), noise.clone()), FormulaPair::new(noise.clone(), x)])
            .filter(|p| !(subs.contains(&p.first) && subs.contains(&p.second)))
            .collect();
        let n = Model::new(v, toggle(&m.relation, &outside));
        prop_assert_eq!(evaluate(&m, &phi), evaluate(&n, &phi));
    }

    #[test]
    fn override_coherence(
        pool in proptest::collection::vec((formula(2, 2), formula(2, 2)), 1..8),
        picks in proptest::collection::vec(0u8..4, 8),
        probe in formula(2, 2),
    ) {
        let pairs: Vec<FormulaPair> = pool.into_iter().map(|(a, b)| FormulaPair::new(a, b)).collect();
        let mut base = BTreeSet::new();
        let mut add = BTreeSet::new();
        let mut remove = BTreeSet::new();
        for (x, pick) in pairs.iter().zip(&picks) {
            match pick {
                0 => { base.insert(x.clone()); }
                1 => { add.insert(x.clone()); }
                2 if !add.contains(x) => { remove.insert(x.clone()); }
                _ => {}
            }
        }
        for b in [Relation::finite(base.clone()), Relation::cofinite(base)] {
            let o = Relation::override_with(b.clone(), add.clone(), remove.clone()).unwrap();
            let mut probes = pairs.clone();
            probes.push(FormulaPair::new(probe.clone(), probe.clone()));
            for x in &probes {
                let want = add.contains(x) || (rel_contains(&b, &x.first, &x.second) && !remove.contains(x));
                prop_assert_eq!(rel_contains(&o, &x.first, &x.second), want);
                prop_assert_eq!(o.simplify().contains_pair(x), want);
            }
        }
    }

    #[test]
    fn translation_preserves_truth(phi in formula(5, 3), seed: u64) {
        let m = model_for(&[&phi], seed);
        let st = translate(&phi);
        prop_assert_eq!(evaluate(&m, &phi), cpl_evaluate(&assignment_of(&m, atoms(&phi)), &st));
    }

    #[test]
    fn validity_agrees_with_models(phi in formula(4, 3), seed: u64) {
        if f_valid(&phi) {
            let mut rng = random::rng(seed);
            for _ in 0..100 {
                let m = random::model_for(&mut rng, [&phi], 3);
                prop_assert!(evaluate(&m, &phi));
            }
        } else {
            let a = sat(&CplFormula::neg(translate(&phi))).expect("invalid formula has a falsifying assignment");
            prop_assert!(!evaluate(&a.to_model(), &phi));
        }
    }

    #[test]
    fn tautology_instances_are_valid(phi in formula(4, 3)) {
        if is_cpl_instance(&phi) {
            prop_assert!(f_valid(&phi));
        }
    }

    #[test]
    fn sat_is_deterministic(phi in formula(5, 3)) {
        let st = translate(&phi);
        prop_assert_eq!(sat(&st), sat(&st));
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn sset_membership_matches_theories(seed: u64, extra in formula(3, 3), toggles in proptest::collection::vec(any::<prop::sample::Index>(), 1..4), flip_letter in proptest::option::of(1u32..4)) {
        let mut rng = random::rng(seed);
        let seeds = [extra.clone(), random::formula(&mut rng, 3, 3)];
        let m = random::model_for(&mut rng, &seeds, 3);
        let mut candidates: Vec<FormulaPair> = extra.subformulas().into_iter()
            .flat_map(|a| extra.subformulas().into_iter().map(move |b| FormulaPair::new(a.clone(), b)))
            .collect();
        candidates.extend(epstein::sset::enumerate_omega(&m, 10));
        let chosen: Vec<FormulaPair> = toggles.iter().map(|i| i.get(&candidates).clone()).collect();
        let mut v = m.valuation.clone();
        if let Some(i) = flip_letter {
            v.set(i, !v.value(i));
        }
        let n = Model::new(v, toggle(&m.relation, &chosen));
        match sset_member(&m, &n) {
            MembershipVerdict::Yes => {
                for _ in 0..200 {
                    let phi = random::formula(&mut rng, 5, 3);
                    prop_assert_eq!(evaluate(&m, &phi), evaluate(&n, &phi));
                }
                for x in &chosen {
                    let phi = Formula::rel_imp(x.first.clone(), x.second.clone());
                    prop_assert_eq!(evaluate(&m, &phi), evaluate(&n, &phi));
                }
            }
            MembershipVerdict::No { distinguishing } => {
                prop_assert_ne!(evaluate(&m, &distinguishing), evaluate(&n, &distinguishing));
            }
            MembershipVerdict::Unknown { reason } => prop_assert!(false, "unexpected unknown: {}", reason),
        }
    }

    #[test]
    fn sampled_equivalents_are_members(seed: u64, k in 1usize..8) {
        let phi = random::formula(&mut random::rng(seed), 3, 3);
        let m = model_for(&[&phi], seed);
        let eq = sample_equivalents(&m, k, seed);
        prop_assert_eq!(eq.len(), k);
        for (i, x) in eq.iter().enumerate() {
            prop_assert!(sset_member(&m, x).is_yes());
            for y in &eq[..i] {
                prop_assert_ne!(x, y);
            }
        }
    }

    #[test]
    fn relation_lies_between_min_and_max(phi in formula(3, 3), a in formula(2, 3), b in formula(2, 3), seed: u64) {
        let m = model_for(&[&phi, &Formula::rel_imp(a.clone(), b.clone())], seed);
        for x in phi.subformulas().into_iter().chain([a.clone(), b.clone()]) {
            for y in [&a, &b, &phi] {
                if rmin_contains(&m, &x, y) {
                    prop_assert!(rel_contains(&m.relation, &x, y));
                }
                if rel_contains(&m.relation, &x, y) {
                    prop_assert!(rmax_contains(&m, &x, y));
                }
            }
        }
    }

    #[test]
    fn relations_within_the_sandwich_are_equivalent(phi in formula(3, 3), seed: u64, bits: u64) {
        // choose R' between R_min and R_max on the pairs φ mentions
        let m = model_for(&[&phi], seed);
        let subs = phi.subformulas();
        let mut add = BTreeSet::new();
        let mut remove = BTreeSet::new();
        let mut k = 0;
        for x in &subs {
            for y in &subs {
                let pair = FormulaPair::new(x.clone(), y.clone());
                let free = rmax_contains(&m, x, y) && !rmin_contains(&m, x, y);
                if free {
                    if bits >> (k % 64) & 1 == 1 { add.insert(pair); } else { remove.insert(pair); }
                    k += 1;
                }
            }
        }
        let r = Relation::override_with(m.relation.clone(), add, remove).unwrap();
        let n = Model::new(m.valuation.clone(), r);
        prop_assert!(sset_member(&m, &n).is_yes());
        prop_assert_eq!(evaluate(&m, &phi), evaluate(&n, &phi));
    }

    #[test]
    fn realisability_is_dual_to_validity(phi in formula(3, 3), psi in formula(3, 3)) {
        let t = Pair::new([phi.clone()], [psi.clone()]);
        prop_assert_eq!(realisable(&t).is_none(), f_valid(&Formula::imp(phi, psi)));
    }

    #[test]
    fn separators_separate(phi in formula(2, 3), psi in formula(2, 3)) {
        let t = Pair::new([phi], [psi]);
        if let Some(chi) = find_separator(&t, 1) {
            prop_assert!(separates(&chi, &t));
        }
    }

    #[test]
    fn saturation_trace_is_consistent(phi in formula(2, 3), psi in formula(2, 3)) {
        let (last, trace) = saturate(&phi, &psi, 1);
        prop_assert_eq!(&trace.last().unwrap().pair, &last);
        for step in &trace {
            if step.branch == Branch::Unsigned {
                prop_assert!(!step.separator_found);
                prop_assert!(find_separator(&step.pair, 1).is_none());
            }
        }
        if find_separator(&last, 1).is_none() {
            let m = model_from_pair(&last);
            prop_assert!(models_all(&m, &last.gamma));
            prop_assert!(last.sigma.iter().all(|x| !evaluate(&m, x)));
        }
    }

    #[test]
    fn checked_proofs_are_valid(s in substitution(2)) {
        // substitution instances of a proof are proofs
        let base = sample_proof();
        let proof = Proof {
            premises: vec![],
            lines: base.lines.iter().map(|l| epstein::proofsys::ProofLine { formula: s.apply(&l.formula), just: l.just.clone() }).collect(),
        };
        let report = check_proof(&ProofSystem::f(), &proof);
        prop_assert!(report.ok);
        prop_assert!(f_valid(proof.conclusion().unwrap()));
    }

    #[test]
    fn index_mutations_are_detected(line in 0usize..5, delta in 1usize..6) {
        let mut proof = sample_proof();
        let bump = |i: usize| (i + delta) % 6;
        proof.lines[line].just = match proof.lines[line].just.clone() {
            Justification::Mp { imp, ant } if delta % 2 == 0 => Justification::Mp { imp: bump(imp), ant },
            Justification::Mp { imp, ant } => Justification::Mp { imp, ant: bump(ant) },
            Justification::Schema { .. } => Justification::Premise { index: delta },
            Justification::Cpl => Justification::Lambda { index: delta },
            other => other,
        };
        prop_assert!(!check_proof(&ProofSystem::f(), &proof).ok);
    }

    #[test]
    fn witnesses_reproduce(seed in 0u64..1000, t in proptest::collection::btree_set(1usize..5, 1..3), v in proptest::collection::btree_set(1usize..5, 1..3)) {
        let r = witnesses::alpha_nonderivability_model(30, seed);
        prop_assert!(witnesses::reverify(&r).unwrap());
        prop_assert!(witnesses::reverify(&witnesses::lambda_incompleteness(&t, 30, seed).unwrap()).unwrap());
        if t != v {
            let r = witnesses::kt_separation(&t, &v, 30, seed).unwrap();
            prop_assert!(witnesses::reverify(&r).unwrap());
            let json = serde_json::to_string(&r).unwrap();
            let back: witnesses::WitnessReport = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}

#[test]
fn sweep_finds_no_expressing_formula_at_any_bound() {
    for bound in 0..=4 {
        let r = witnesses::inexpressibility_sweep(bound).unwrap();
        assert!(r.passed(), "bound {bound}: {r:?}");
    }
}

#[test]
fn valuation_default_matters() {
    let phi = parse("p7 | q").unwrap();
    assert!(evaluate(
        &Model::new(Valuation::constant(true), Relation::Empty),
        &phi
    ));
}
