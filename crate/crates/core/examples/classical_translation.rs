//! Deciding the base logic through the translation into classical logic.

use std::error::Error;

use epstein::semantics::evaluate;
use epstein::syntax::parse;
use epstein::translation::{countermodel, f_consequence, f_valid, translate};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a1 = parse("(p ~> q) -> (p -> q)")?;
    println!("{a1}\n  translates to {}", translate(&a1));
    assert!(f_valid(&a1));

    let pp = parse("p ~> p")?;
    let m = countermodel(&pp).ok_or("p ~> p should have a countermodel")?;
    println!("{pp} fails in {}", serde_json::to_string(&m)?);
    assert!(!evaluate(&m, &pp));

    let premises = [parse("p ~> q")?, parse("p")?];
    assert!(f_consequence(&premises, &parse("q")?));
    assert!(!f_consequence(&premises, &parse("q ~> p")?));
    println!("p ~> q, p entail q but not q ~> p");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
