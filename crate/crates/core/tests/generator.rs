use cpog_core::compiler::compile_to_d4;
use cpog_core::evaluator::unweighted_count;
use cpog_core::generator::{
    generate_from_d4, GenError, GenMode, GenOptions, LemmaPolicy, Strategy,
};
use cpog_core::instances::{self, WORKED_D4};
use cpog_core::oracle::brute_count;
use cpog_core::satproof::Oracle;
use cpog_core::{check_proof, serialize_cpog, CheckOptions, CnfFormula, CpogStep, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts(mode: GenMode) -> GenOptions {
    GenOptions {
        mode,
        ..GenOptions::default()
    }
}

fn run(cnf: &CnfFormula, d4: &str, o: &GenOptions) -> (Verdict, u64, Vec<CpogStep>) {
    let out = generate_from_d4(cnf, d4, o).expect("generation");
    let checked = check_proof(cnf, out.steps.iter(), CheckOptions {
        one_sided: o.mode == GenMode::OneSided,
    });
    let count = checked
        .pog
        .as_ref()
        .map(|p| u64::try_from(unweighted_count(p).unwrap()).unwrap())
        .unwrap_or(u64::MAX);
    (checked.verdict, count, out.steps)
}

/// Text after the root declaration.
fn body(steps: &[CpogStep]) -> String {
    let r = steps
        .iter()
        .position(|s| matches!(s, CpogStep::DeclareRoot { .. }))
        .unwrap();
    serialize_cpog(&steps[r + 1..])
}

#[test]
fn worked_example_structural_proof() {
    let cnf = instances::worked_cnf();
    let o = GenOptions {
        lemmas: false,
        ..opts(GenMode::Structural)
    };
    let (v, count, steps) = run(&cnf, WORKED_D4, &o);
    assert_eq!(v, Verdict::FullEquivalence);
    assert_eq!(count, 6);
    let decls = serialize_cpog(&steps[..7]);
    assert_eq!(
        decls,
        "6 p 5 -3 -4 0\n9 p 6 3 4 0\n12 s 7 5 6 7 10 0\n15 p 8 -1 7 0\n18 p 9 1 -2 7 0\n22 s 10 8 9 16 19 0\nr 10\n"
    );
    let expected = "\
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
    assert_eq!(body(&steps), expected);
}

#[test]
fn lemma_with_guarded_hypotheses() {
    let cnf = instances::worked_cnf();
    let o = GenOptions {
        lemma_policy: LemmaPolicy::SynthesizeAll,
        ..opts(GenMode::Structural)
    };
    let (v, _, steps) = run(&cnf, WORKED_D4, &o);
    assert_eq!(v, Verdict::FullEquivalence);
    let text = body(&steps);
    let forward: Vec<&str> = text.lines().take_while(|l| !l.starts_with('d')).collect();
    assert_eq!(
        forward,
        [
            "25 p 11 -3 4 0",
            "28 p 12 3 -4 0",
            "31 a 5 11 12 3 0 25 6 0",
            "32 a 6 11 12 -3 0 28 9 0",
            "33 a 3 7 11 12 0 13 31 0",
            "34 a 7 11 12 0 33 14 32 0",
            "35 a -11 1 0 26 27 3 0",
            "36 a -12 1 0 29 30 4 0",
            "37 a 7 1 0 35 36 34 0",
            "38 a 8 1 0 37 15 0",
            "39 a -11 -1 0 26 27 1 0",
            "40 a -12 -1 0 29 30 2 0",
            "41 a 7 -1 0 39 40 34 0",
            "42 a 9 -1 0 5 41 18 0",
            "43 a 1 10 0 23 38 0",
            "44 a 10 0 43 24 42 0",
        ]
    );
}

#[test]
fn every_mode_is_accepted_on_the_worked_example() {
    let cnf = instances::worked_cnf();
    for mode in [GenMode::Hybrid, GenMode::Structural, GenMode::Monolithic] {
        for lemmas in [false, true] {
            let o = GenOptions {
                lemmas,
                ..opts(mode)
            };
            let (v, count, _) = run(&cnf, WORKED_D4, &o);
            assert_eq!(v, Verdict::FullEquivalence, "{mode:?}");
            assert_eq!(count, 6);
        }
    }
    let (v, _, steps) = run(&cnf, WORKED_D4, &opts(GenMode::OneSided));
    assert_eq!(v, Verdict::ReverseOnly);
    assert!(body(&steps).starts_with("25 a 10 0 0\nd 1 25 "));
    let out = generate_from_d4(&cnf, WORKED_D4, &GenOptions::default()).unwrap();
    assert_eq!(out.stats.strategy, Strategy::Monolithic);
}

#[test]
fn random_formulas_through_every_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let modes = [
        GenMode::Structural,
        GenMode::Monolithic,
        GenMode::Hybrid,
        GenMode::OneSided,
    ];
    for round in 0..200 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(0..=4 * n as usize);
        let cnf = instances::random_cnf(&mut rng, n, m, 4);
        let d4 = compile_to_d4(&cnf);
        let expected = brute_count(&cnf).unwrap();
        let mode = modes[round % modes.len()];
        let o = GenOptions {
            lemmas: rng.gen_bool(0.5),
            grouping: rng.gen_bool(0.5),
            threshold: if rng.gen_bool(0.5) { 1_000_000 } else { 8 },
            lemma_policy: if rng.gen_bool(0.5) {
                LemmaPolicy::ReuseInput
            } else {
                LemmaPolicy::SynthesizeAll
            },
            ..opts(mode)
        };
        let (v, count, _) = run(&cnf, &d4, &o);
        let want = if mode == GenMode::OneSided {
            Verdict::ReverseOnly
        } else {
            Verdict::FullEquivalence
        };
        assert_eq!(v, want, "round {round}: {cnf:?}\n{d4}");
        assert_eq!(count, expected, "round {round}");
    }
}

#[test]
fn literals_beyond_propagation_use_the_solver() {
    let cnf = CnfFormula::from_dimacs(4, &[&[1, 2], &[1, -2], &[3, 4], &[3, -4]]);
    let d4 = "a 1 0\nt 2 0\n1 2 1 3 0\n";
    let grouped = generate_from_d4(&cnf, d4, &opts(GenMode::Structural)).unwrap();
    assert_eq!(grouped.stats.sat_calls, 1);
    assert_eq!(grouped.stats.groups, 1);
    let single = GenOptions {
        grouping: false,
        ..opts(GenMode::Structural)
    };
    let separate = generate_from_d4(&cnf, d4, &single).unwrap();
    assert_eq!(separate.stats.sat_calls, 2);
    for out in [grouped, separate] {
        let v = check_proof(&cnf, out.steps.iter(), CheckOptions::default()).verdict;
        assert_eq!(v, Verdict::FullEquivalence);
    }
    let lit_root = CnfFormula::from_dimacs(2, &[&[1, 2], &[1, -2]]);
    let (v, count, _) = run(&lit_root, "a 1 0\nt 2 0\n1 2 1 0\n", &opts(GenMode::Structural));
    assert_eq!(v, Verdict::FullEquivalence);
    assert_eq!(count, 2);
}

#[test]
fn constant_roots() {
    let unsat = CnfFormula::from_dimacs(2, &[&[1], &[-1, 2], &[-2]]);
    for mode in [GenMode::Hybrid, GenMode::Structural, GenMode::Monolithic] {
        let (v, count, _) = run(&unsat, "f 1 0\n", &opts(mode));
        assert_eq!(v, Verdict::FullEquivalence);
        assert_eq!(count, 0);
    }
    let valid = CnfFormula::from_dimacs(2, &[&[1, -1]]);
    let (v, count, steps) = run(&valid, "t 1 0\n", &opts(GenMode::Structural));
    assert_eq!(v, Verdict::FullEquivalence);
    assert_eq!(count, 4);
    assert_eq!(serialize_cpog(&steps[..2]), "2 p 3 0\nr 3\n");
    let empty = CnfFormula::from_dimacs(3, &[]);
    let (v, count, _) = run(&empty, "t 1 0\n", &opts(GenMode::Monolithic));
    assert_eq!(v, Verdict::FullEquivalence);
    assert_eq!(count, 8);
}

#[test]
fn incorrect_compilations_are_reported() {
    let cnf = instances::worked_cnf();
    let too_small = "o 1 0\no 2 0\nt 3 0\nf 4 0\n1 2 -1 0\n1 4 1 0\n2 3 -3 -4 0\n2 3 3 4 0\n";
    for mode in [GenMode::Structural, GenMode::Monolithic] {
        assert!(matches!(
            generate_from_d4(&cnf, too_small, &opts(mode)),
            Err(GenError::NotImplied(_) | GenError::Mismatch(_))
        ));
    }
    let too_big = "o 1 0\no 2 0\nt 3 0\n1 2 -1 0\n1 3 1 0\n2 3 -3 -4 0\n2 3 3 4 0\n";
    for mode in [GenMode::Structural, GenMode::Monolithic] {
        assert!(matches!(
            generate_from_d4(&cnf, too_big, &opts(mode)),
            Err(GenError::ReverseFails(_))
        ));
    }
    assert!(matches!(
        generate_from_d4(&cnf, "o 1 0\nt 2 0\n1 2 9 0\n1 2 -9 0\n", &opts(GenMode::Structural)),
        Err(GenError::ForeignVariable(9))
    ));
    assert!(matches!(
        generate_from_d4(&cnf, "o 1 0\n1 2 0\n", &opts(GenMode::Structural)),
        Err(GenError::Ddnnf(_))
    ));
}

#[test]
fn solver_failures_propagate() {
    let cnf = instances::worked_cnf();
    let o = GenOptions {
        oracle: Oracle::External("exit 3".into()),
        ..opts(GenMode::Monolithic)
    };
    assert!(matches!(
        generate_from_d4(&cnf, WORKED_D4, &o),
        Err(GenError::Solver(_))
    ));
}

#[test]
fn lemmas_keep_shared_subgraphs_linear() {
    let cnf = instances::chain_cnf(10);
    let d4 = compile_to_d4(&cnf);
    let with = generate_from_d4(&cnf, &d4, &opts(GenMode::Structural)).unwrap();
    let without = generate_from_d4(
        &cnf,
        &d4,
        &GenOptions {
            lemmas: false,
            ..opts(GenMode::Structural)
        },
    )
    .unwrap();
    assert!(with.stats.lemmas > 0);
    assert_eq!(with.stats.max_expansions, 1);
    assert!(without.stats.max_expansions > 100);
    assert!(with.stats.forward_steps * 10 < without.stats.forward_steps);
    for out in [with, without] {
        let v = check_proof(&cnf, out.steps.iter(), CheckOptions::default()).verdict;
        assert_eq!(v, Verdict::FullEquivalence);
    }
}

#[test]
fn variables_dropped_by_the_compiler_stay_free() {
    let cnf = cpog_core::parse_dimacs(
        "p cnf 9 11\n5 1 9 0\n3 0\n-5 -3 -9 -7 0\n-4 -2 6 0\n6 7 0\n8 -3 -6 9 0\n-7 1 -3 0\n-1 6 0\n6 -9 4 0\n5 -3 0\n5 -6 4 -3 0\n",
    )
    .unwrap();
    let d4 = compile_to_d4(&cnf);
    for lemmas in [false, true] {
        let o = GenOptions {
            lemmas,
            ..opts(GenMode::Structural)
        };
        let (v, count, _) = run(&cnf, &d4, &o);
        assert_eq!(v, Verdict::FullEquivalence);
        assert_eq!(count, brute_count(&cnf).unwrap());
    }
}

#[test]
fn lemma_contexts_that_fix_node_variables() {
    let cnf = cpog_core::parse_dimacs(
        "p cnf 8 8\n-7 8 5 -2 0\n7 0\n5 -4 -6 7 0\n6 -7 -5 -1 0\n6 3 -4 0\n-4 0\n1 -4 2 8 0\n-1 -6 4 3 0\n",
    )
    .unwrap();
    let d4 = compile_to_d4(&cnf);
    for policy in [LemmaPolicy::ReuseInput, LemmaPolicy::SynthesizeAll] {
        let o = GenOptions {
            lemma_policy: policy,
            ..opts(GenMode::Structural)
        };
        let (v, count, _) = run(&cnf, &d4, &o);
        assert_eq!(v, Verdict::FullEquivalence);
        assert_eq!(count, brute_count(&cnf).unwrap());
    }
}
