//! Generate random divergence-free initial data, build the relaxed
//! triple, and certify every admissibility hypothesis.

use std::sync::Arc;

use subsol_core::verifier::VerifierConfig;
use subsol_core::{fields_io, subsolution, verifier, SpectralGrid};

fn main() -> subsol_core::Result<()> {
    let grid = Arc::new(SpectralGrid::new(2, 32)?);
    let spec = fields_io::GeneratorSpec::new(fields_io::GeneratorKind::Random, 7);
    let v0 = fields_io::generate(&spec, &grid)?;
    let snapshot = subsolution::make_snapshot(&v0, 1.0)?;
    assert_eq!(snapshot.qbar(), 0.0);
    let report = verifier::full_report(&v0, &[0.1, 1.0, 10.0], &VerifierConfig::default())?;
    assert!(report.passes.all());
    println!("{}", report.conclusion);
    Ok(())
}
