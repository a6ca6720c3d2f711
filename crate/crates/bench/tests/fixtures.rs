use cpog_bench::fixtures;
use cpog_core::evaluator::unweighted_count;
use cpog_core::generator::GenOptions;
use cpog_core::{check_proof, CheckOptions, Verdict};

#[test]
fn every_fixture_proof_verifies() {
    let fs = fixtures();
    assert_eq!(fs.len(), 3);
    for f in &fs {
        let out = f.proof(&GenOptions::default());
        let checked = check_proof(&f.cnf, out.steps.iter(), CheckOptions::default());
        assert_eq!(checked.verdict, Verdict::FullEquivalence, "{}", f.name);
        assert!(unweighted_count(&checked.pog.unwrap()).is_ok());
    }
}

#[test]
fn fixture_names_are_distinct() {
    let mut names: Vec<String> = fixtures().into_iter().map(|f| f.name).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 3);
}
