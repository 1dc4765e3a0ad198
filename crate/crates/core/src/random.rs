//! Seeded generators for formulas, valuations, relations and models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::{Model, Relation, Valuation};
use crate::syntax::{Connective, Formula, FormulaPair, Substitution};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula over `p1..=p{letters}` of depth at most `depth`.
pub fn formula(rng: &mut impl Rng, depth: usize, letters: u32) -> Formula {
    let letters = letters.max(1);
    if depth == 0 || rng.gen_bool(0.25) {
        return Formula::letter(rng.gen_range(1..=letters));
    }
    if rng.gen_bool(0.2) {
        return Formula::neg(formula(rng, depth - 1, letters));
    }
    let op = *Connective::ALL.choose(rng).expect("nonempty");
    Formula::bin(
        op,
        formula(rng, depth - 1, letters),
        formula(rng, depth - 1, letters),
    )
}

/// Like [`formula`] but with only classical connectives.
pub fn classical_formula(rng: &mut impl Rng, depth: usize, letters: u32) -> Formula {
    let letters = letters.max(1);
    if depth == 0 || rng.gen_bool(0.25) {
        return Formula::letter(rng.gen_range(1..=letters));
    }
    if rng.gen_bool(0.2) {
        return Formula::neg(classical_formula(rng, depth - 1, letters));
    }
    let op = *[
        Connective::And,
        Connective::Or,
        Connective::Imp,
        Connective::Iff,
    ]
    .choose(rng)
    .expect("nonempty");
    Formula::bin(
        op,
        classical_formula(rng, depth - 1, letters),
        classical_formula(rng, depth - 1, letters),
    )
}

/// Random bits on `p0..=p{letters}` over a random default.
pub fn valuation(rng: &mut impl Rng, letters: u32) -> Valuation {
    let mut v = Valuation::constant(rng.gen());
    for i in 0..=letters {
        v.set(i, rng.gen());
    }
    v
}

/// A random relation that decides the given pairs at random: mostly a
/// finite subset of them, sometimes a cofinite complement, `Full` or `Empty`.
pub fn relation(rng: &mut impl Rng, pairs: &[FormulaPair]) -> Relation {
    let pick = |rng: &mut dyn rand::RngCore| -> Vec<FormulaPair> {
        pairs
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect()
    };
    match rng.gen_range(0..10) {
        0 => Relation::Full,
        1 => Relation::Empty,
        2 | 3 => Relation::cofinite(pick(rng)),
        _ => Relation::finite(pick(rng)),
    }
}

/// Pairs whose membership can affect the truth of `phi`.
pub fn relevant_pairs(phi: &Formula) -> Vec<FormulaPair> {
    phi.subformulas()
        .into_iter()
        .filter_map(|f| f.relatedness_pair().map(|(_, p)| p))
        .collect()
}

/// A model whose relation decides the relatedness pairs of `phis` at random.
pub fn model_for<'a>(
    rng: &mut impl Rng,
    phis: impl IntoIterator<Item = &'a Formula>,
    letters: u32,
) -> Model {
    let mut pairs: Vec<FormulaPair> = phis.into_iter().flat_map(relevant_pairs).collect();
    pairs.sort();
    pairs.dedup();
    Model::new(valuation(rng, letters), relation(rng, &pairs))
}

pub fn substitution(
    rng: &mut impl Rng,
    domain: &[u32],
    depth: usize,
    letters: u32,
) -> Substitution {
    domain
        .iter()
        .map(|&i| (i, formula(rng, depth, letters)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let a: Vec<Formula> = (0..5).map(|_| formula(&mut rng(7), 4, 3)).collect();
        let mut r = rng(7);
        let b = formula(&mut r, 4, 3);
        assert_eq!(a[0], b);
        assert!(b.depth() <= 4);
        assert!(b.vars().iter().all(|&i| (1..=3).contains(&i)));
    }

    #[test]
    fn classical_has_no_relatedness() {
        let mut r = rng(1);
        for _ in 0..50 {
            let f = classical_formula(&mut r, 4, 3);
            assert!(f
                .subformulas()
                .iter()
                .all(|g| g.relatedness_pair().is_none()));
        }
    }
}
