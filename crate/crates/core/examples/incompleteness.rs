//! Witness models for incompleteness and separation of extensions.

use std::collections::BTreeSet;
use std::error::Error;

use epstein::witnesses::{
    alpha_nonderivability_model, kt_separation, lambda_incompleteness, reverify,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<_>>();
    let reports = [
        alpha_nonderivability_model(50, 0),
        kt_separation(&set(&[1]), &set(&[2]), 50, 0)?,
        lambda_incompleteness(&set(&[1, 3]), 50, 0)?,
    ];
    for r in &reports {
        println!("{}: {:?}", r.lemma, r.verdict);
        for c in &r.checks {
            println!(
                "  [{}] {} (n = {})",
                if c.pass { "ok" } else { "FAIL" },
                c.desc,
                c.n
            );
        }
        assert!(reverify(r)?);
    }
    println!("separator: {}", reports[1].objects["separator"]);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
