//! Frame conditions invisible to theories, and a formula sweep showing
//! that membership of ⟨⊤, ⊥⟩ is not expressible.

use std::error::Error;

use epstein::semantics::Relation;
use epstein::sset::{undefinability_counterexample, TargetCondition};
use epstein::witnesses::inexpressibility_sweep;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for condition in [
        TargetCondition::Symmetry,
        TargetCondition::NCondition,
        TargetCondition::Both,
    ] {
        let record = undefinability_counterexample(condition, &Relation::Empty)?;
        println!(
            "{condition:?}: toggled {} ; {} present but {} missing",
            record.toggled_pair, record.violation_witness.present, record.violation_witness.missing
        );
        assert!(record.membership_checks.iter().all(|c| c.verdict.is_yes()));
    }

    let sweep = inexpressibility_sweep(3)?;
    println!(
        "{} formulas over p, q checked; survivors {}",
        sweep.objects["formulas_total"].as_str().unwrap_or("?"),
        sweep.objects["survivors"].as_str().unwrap_or("?")
    );
    assert!(sweep.passed());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
