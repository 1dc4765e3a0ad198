//! Models with the same theory: the S-set of a model.

use std::error::Error;

use epstein::semantics::{evaluate, Model, Relation, Valuation};
use epstein::sset::{enumerate_omega, sample_equivalents, sset_member, toggle};
use epstein::syntax::parse;
use epstein::translation::{parse_cpl, translate};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let m = Model::new(Valuation::true_on([1]), Relation::Empty);
    let omega = enumerate_omega(&m, 5);
    println!("first Ω pairs (material implication fails):");
    for pair in &omega {
        println!("  {pair}");
    }

    // toggling an Ω pair cannot change any truth value
    let n = Model::new(m.valuation.clone(), toggle(&m.relation, &omega[..1]));
    assert!(sset_member(&m, &n).is_yes());
    for text in ["p ~> q", "q ~> p", "(p ^ p) | q"] {
        let phi = parse(text)?;
        assert_eq!(evaluate(&m, &phi), evaluate(&n, &phi));
    }

    let others = sample_equivalents(&m, 4, 7);
    println!(
        "{} sampled equivalents, all members: {}",
        others.len(),
        others.iter().all(|x| sset_member(&m, x).is_yes())
    );

    // translations are S-invariant; a bare pair atom need not be
    println!("St(q ~> p) = {}", translate(&parse("q ~> p")?));
    let bare = parse_cpl("a<p0 | !p0, !(p0 | !p0)>")?;
    println!("bare atom {bare}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
