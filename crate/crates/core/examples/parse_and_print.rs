//! Parsing, printing and structural operations on formulas.

use std::error::Error;

use epstein::syntax::{letters, match_schema, parse, Formula, Substitution};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let phi = parse("(p ^ q) <-> (p ~> q) & (p & q)")?;
    println!("parsed:   {phi}");
    println!(
        "size:     {} nodes, depth {}",
        phi.node_count(),
        phi.depth()
    );

    // printing is inverse to parsing
    assert_eq!(parse(&phi.to_string())?, phi);

    // `->` and `~>` associate to the right
    assert_eq!(parse("p -> q -> r")?, parse("p -> (q -> r)")?);

    let sigma = Substitution::new().with(letters::Q, parse("r | !r")?);
    let inst = sigma.apply(&phi);
    println!("instance: {inst}");
    let back = match_schema(&phi, &inst).ok_or("instance should match its schema")?;
    assert_eq!(back.apply(&phi), inst);

    println!("T = {}, F = {}", Formula::top(), Formula::bottom());
    match parse("p ~> ") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => return Err("truncated input parsed".into()),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
