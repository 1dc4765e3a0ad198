//! Bounded Lindenbaum extensions and their canonical models.

use std::error::Error;

use epstein::proofsys::{
    bounded_lindenbaum, canonical_model, closure, condition_check, CanonicalMode, Condition,
    ProofSystem,
};
use epstein::semantics::evaluate;
use epstein::syntax::parse;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sigma = vec![parse("p ~> q")?, parse("!(q ~> p)")?, parse("q")?];
    let universe = closure(&sigma);
    let mcs = bounded_lindenbaum(&ProofSystem::f(), &sigma, &universe)?.ok_or("Σ is consistent")?;
    println!(
        "{} of {} universe formulas chosen",
        mcs.members.len(),
        universe.len()
    );

    let m = canonical_model(&mcs, CanonicalMode::Plain);
    for phi in &universe {
        assert_eq!(evaluate(&m, phi), mcs.contains(phi), "truth lemma at {phi}");
    }
    println!("canonical model agrees with the extension on the universe");

    // in FS the same premises are inconsistent: ~> becomes symmetric on true pairs
    let fs: ProofSystem = "FS".parse()?;
    let sym = bounded_lindenbaum(
        &fs,
        &[
            parse("p ~> q")?,
            parse("!(q ~> p)")?,
            parse("p")?,
            parse("q")?,
        ],
        &universe,
    )?;
    println!("FS-consistent: {}", sym.is_some());

    let mcs = bounded_lindenbaum(&fs, &[parse("p ~> q")?], &closure(&[parse("p ~> q")?]))?
        .ok_or("consistent")?;
    let m = canonical_model(&mcs, CanonicalMode::S);
    println!(
        "symmetry: {:?}",
        condition_check(&m.relation, Condition::Symmetry)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
