use cpog_core::checker::{CheckError, RupError};
use cpog_core::instances::WORKED_CNF;
use cpog_core::{
    check_proof, parse_cpog, parse_dimacs, CheckOptions, CnfFormula, Verdict,
};

const DECLARATIONS: &str = "\
6 p 5 -3 -4 0
9 p 6 3 4 0
12 s 7 5 6 7 10 0
15 p 8 -1 7 0
18 p 9 1 -2 7 0
22 s 10 8 9 16 19 0
r 10
";

const FORWARD: &str = "\
25 a 5 1 3 0 3 6 0
26 a 6 1 -3 0 4 9 0
27 a 3 7 1 0 13 25 0
28 a 7 1 0 27 14 26 0
29 a 8 1 0 28 15 0
30 a 5 -1 3 0 1 6 0
31 a 6 -1 -3 0 2 9 0
32 a 3 7 -1 0 13 30 0
33 a 7 -1 0 32 14 31 0
34 a 9 -1 0 5 33 18 0
35 a 1 10 0 23 29 0
36 a 10 0 35 24 34 0
";

const DELETIONS: &str = "\
d 35 23 29 0
d 34 5 33 18 0
d 33 32 14 31 0
d 32 13 30 0
d 31 2 9 0
d 30 1 6 0
d 29 28 15 0
d 28 27 14 26 0
d 27 13 25 0
d 26 4 9 0
d 25 3 6 0
d 1 36 8 10 12 16 21 22 0
d 2 36 7 11 12 16 21 22 0
d 3 36 8 10 12 17 21 22 0
d 4 36 7 11 12 17 19 22 0
d 5 36 16 20 22 0
";

fn verdict(cnf: &CnfFormula, text: &str, one_sided: bool) -> Verdict {
    let steps = parse_cpog(text).expect("parses");
    check_proof(cnf, steps.iter(), CheckOptions { one_sided }).verdict
}

fn worked() -> CnfFormula {
    parse_dimacs(WORKED_CNF).unwrap()
}

fn rejected_with(v: Verdict) -> (Option<usize>, CheckError) {
    match v {
        Verdict::Rejected { step, error } => (step, error),
        other => panic!("accepted: {other:?}"),
    }
}

#[test]
fn worked_proof_is_fully_verified() {
    let text = format!("{DECLARATIONS}{FORWARD}{DELETIONS}");
    assert_eq!(verdict(&worked(), &text, false), Verdict::FullEquivalence);
    assert_eq!(verdict(&worked(), &text, true), Verdict::FullEquivalence);
}

#[test]
fn rat_but_not_rup_clause_is_rejected() {
    let phi1 = CnfFormula::from_dimacs(3, &[&[1, 3]]);
    let (step, error) = rejected_with(verdict(&phi1, "2 a 2 -3 0 1 0\n", false));
    assert_eq!(step, Some(1));
    assert_eq!(error, CheckError::Rup(RupError::Satisfied(1)));
}

#[test]
fn sum_hints_must_cite_defining_clauses() {
    let text = DECLARATIONS.replace("22 s 10 8 9 16 19 0", "22 s 10 8 9 1 19 0");
    let (step, error) = rejected_with(verdict(&worked(), &text, false));
    assert_eq!(step, Some(6));
    assert_eq!(error, CheckError::Rup(RupError::NotDefining(1)));
}

#[test]
fn product_arguments_must_be_disjoint() {
    let text = DECLARATIONS.replace("15 p 8 -1 7 0", "15 p 8 -3 7 0");
    let (step, error) = rejected_with(verdict(&worked(), &text, false));
    assert_eq!(step, Some(4));
    assert_eq!(error, CheckError::DependencyOverlap { var: 8, input: 3 });
}

#[test]
fn final_conditions() {
    let cnf = worked();
    let without_last = DELETIONS.replace("d 5 36 16 20 22 0\n", "");
    let text = format!("{DECLARATIONS}{FORWARD}{without_last}");
    let (step, error) = rejected_with(verdict(&cnf, &text, false));
    assert_eq!(step, None);
    assert_eq!(error, CheckError::InputClausesActive(1));

    let keep_35 = DELETIONS.replace("d 35 23 29 0\n", "");
    let text = format!("{DECLARATIONS}{FORWARD}{keep_35}");
    let (_, error) = rejected_with(verdict(&cnf, &text, false));
    assert_eq!(error, CheckError::AssertedCount(2));

    let no_root = DECLARATIONS.replace("r 10\n", "");
    let (_, error) = rejected_with(verdict(&cnf, &no_root, false));
    assert_eq!(error, CheckError::NoRoot);
}

#[test]
fn deletions_are_checked() {
    let cnf = worked();
    let text = format!("{DECLARATIONS}{FORWARD}d 7 36 0\n");
    let (_, error) = rejected_with(verdict(&cnf, &text, false));
    assert_eq!(error, CheckError::DeleteDefining(7));

    let text = format!("{DECLARATIONS}{FORWARD}d 1 36 8 10 12 16 22 0\n");
    let (step, error) = rejected_with(verdict(&cnf, &text, false));
    assert_eq!(step, Some(20));
    assert!(matches!(error, CheckError::Rup(_)));

    let text = format!("{DECLARATIONS}{FORWARD}d 99 36 0\n");
    let (_, error) = rejected_with(verdict(&cnf, &text, false));
    assert_eq!(error, CheckError::UnknownClause(99));
}

#[test]
fn clause_ids_follow_the_counter() {
    let text = DECLARATIONS.replace("9 p 6 3 4 0", "10 p 6 3 4 0");
    let (_, error) = rejected_with(verdict(&worked(), &text, false));
    assert_eq!(error, CheckError::BadId { expected: 9, found: 10 });
}

#[test]
fn reverse_only_proofs() {
    let cnf = worked();
    let reverse: String = DELETIONS
        .lines()
        .filter(|l| l.starts_with("d ") && l.split(' ').nth(1).unwrap().parse::<u64>().unwrap() <= 5)
        .map(|l| l.replace(" 36 ", " 25 ") + "\n")
        .collect();
    let text = format!("{DECLARATIONS}25 a 10 0 0\n{reverse}");
    assert_eq!(verdict(&cnf, &text, true), Verdict::ReverseOnly);
    assert!(!verdict(&cnf, &text, false).is_accepted());
}

#[test]
fn checked_pog_matches_the_declarations() {
    let text = format!("{DECLARATIONS}{FORWARD}{DELETIONS}");
    let steps = parse_cpog(&text).unwrap();
    let out = check_proof(&worked(), steps.iter(), CheckOptions::default());
    let pog = out.pog.unwrap();
    assert_eq!(pog.nodes().len(), 6);
    assert_eq!(pog.root().unwrap().value(), 10);
    pog.check_partitioned().unwrap();
}
