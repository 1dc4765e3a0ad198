//! Checking Hilbert-style proofs in F and its extensions.

use std::error::Error;

use epstein::proofsys::{check_proof, sample_proof, Justification, ProofSystem};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let proof = sample_proof();
    for (i, line) in proof.lines.iter().enumerate() {
        println!(
            "{i}: {:32} {}",
            line.formula.to_string(),
            serde_json::to_string(&line.just)?
        );
    }
    let report = check_proof(&ProofSystem::f(), &proof);
    println!("accepted: {}", report.ok);
    assert!(report.ok);

    let mut broken = proof.clone();
    broken.lines[3].just = Justification::Mp { imp: 2, ant: 1 };
    let report = check_proof(&ProofSystem::f(), &broken);
    for e in report.errors() {
        println!("line {}: {}", e.line, e.error.as_deref().unwrap_or("?"));
    }
    assert!(!report.ok);

    let fs: ProofSystem = "FS".parse()?;
    println!(
        "FS axiom? {:?}",
        fs.is_axiom_instance(&"(p ~> q) -> ((q ~> p) | !(q -> p))".parse()?)
            .map(|x| x.0)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
