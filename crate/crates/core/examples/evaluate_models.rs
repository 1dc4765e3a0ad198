//! Truth in a model and validity over a relation.

use std::error::Error;

use epstein::semantics::{evaluate, relation_validates, Model, Relation, Valuation};
use epstein::syntax::{parse, FormulaPair};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = parse("p")?;
    let related = Relation::finite([FormulaPair::new(p.clone(), p.clone())]);

    // only ⟨p, p⟩ is related, so p ~> p holds everywhere but q ~> q nowhere
    for text in ["p ~> p", "q ~> q", "p", "!p"] {
        let phi = parse(text)?;
        println!(
            "R validates {text:8} {}",
            relation_validates(&related, &phi)?
        );
    }
    assert!(relation_validates(&related, &parse("p ~> p")?)?);
    assert!(!relation_validates(&related, &parse("q ~> q")?)?);

    let m = Model::new(Valuation::true_on([1]), related);
    let conj = parse("p ^ p")?;
    println!("{conj} in M: {}", evaluate(&m, &conj));
    assert!(evaluate(&m, &conj));

    // models are JSON artifacts
    let json = serde_json::to_string(&m)?;
    println!("{json}");
    let back: Model = serde_json::from_str(&json)?;
    assert_eq!(back, m);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
