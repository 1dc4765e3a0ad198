//! Interpolants over shared letters.

use std::error::Error;

use epstein::interpolation::{check_interpolant, interpolate, rel_imp_noninterpolation_demo};
use epstein::syntax::parse;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (a, b) in [("p ^ q", "p | s"), ("(p ~> q) & p", "q | r")] {
        let (phi, psi) = (parse(a)?, parse(b)?);
        let result = interpolate(&phi, &psi, 3)?.ok_or("no interpolant found")?;
        println!("{a}  ->  {b}\n  interpolant {}", result.interpolant);
        let checks = check_interpolant(&phi, &psi, &result.interpolant);
        assert!(checks.left && checks.right && checks.vars);
    }

    // invalid implications are refused up front
    assert!(interpolate(&parse("p")?, &parse("q")?, 2).is_err());

    let m = rel_imp_noninterpolation_demo();
    println!(
        "no ~> formula is a theorem, so ~> interpolation is vacuous: {}",
        serde_json::to_string(&m)?
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
