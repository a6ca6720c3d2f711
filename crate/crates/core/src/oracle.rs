//! Brute-force reference implementations for tests and debugging.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{CnfFormula, Lit};
use crate::cpog::CpogStep;
use crate::evaluator::Ring;
use crate::pog::{Pog, PogNode};

pub const COUNT_LIMIT: u64 = 24;
pub const WEIGHTED_LIMIT: u64 = 20;
pub const EQUIV_LIMIT: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{n} variables exceeds the enumeration limit of {limit}")]
pub struct TooLarge {
    pub n: u64,
    pub limit: u64,
}

fn guard(n: u64, limit: u64) -> Result<(), TooLarge> {
    if n > limit {
        Err(TooLarge { n, limit })
    } else {
        Ok(())
    }
}

/// Calls `f` on every total assignment over `n` variables.
pub fn for_each_assignment(n: u64, mut f: impl FnMut(&[bool])) {
    let mut alpha = vec![false; n as usize];
    for bits in 0u64..(1u64 << n) {
        for (i, a) in alpha.iter_mut().enumerate() {
            *a = bits >> i & 1 == 1;
        }
        f(&alpha);
    }
}

pub fn brute_count(cnf: &CnfFormula) -> Result<u64, TooLarge> {
    guard(cnf.var_count(), COUNT_LIMIT)?;
    let mut count = 0;
    for_each_assignment(cnf.var_count(), |a| {
        if cnf.is_satisfied_by(a) {
            count += 1;
        }
    });
    Ok(count)
}

/// Sum over assignments accepted by `pred` of the product of literal weights.
/// `weights[i]` holds (W(x), W(x̄)) for variable `i + 1`.
pub fn brute_weighted_models<R: Ring>(
    n: u64,
    pred: impl Fn(&[bool]) -> bool,
    ring: &R,
    weights: &[(R::Elem, R::Elem)],
) -> Result<R::Elem, TooLarge> {
    guard(n, WEIGHTED_LIMIT)?;
    let mut total = ring.zero();
    for_each_assignment(n, |a| {
        if pred(a) {
            let mut term = ring.one();
            for (i, &x) in a.iter().enumerate() {
                let w = if x { &weights[i].0 } else { &weights[i].1 };
                term = ring.mul(&term, w);
            }
            total = ring.add(&total, &term);
        }
    });
    Ok(total)
}

pub fn brute_weighted<R: Ring>(
    cnf: &CnfFormula,
    ring: &R,
    weights: &[(R::Elem, R::Elem)],
) -> Result<R::Elem, TooLarge> {
    brute_weighted_models(cnf.var_count(), |a| cnf.is_satisfied_by(a), ring, weights)
}

/// Values of input and extension variables, determined by the defining clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtendedAssignment {
    values: HashMap<u64, bool>,
}

impl ExtendedAssignment {
    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values
            .get(&lit.var().index())
            .map(|&v| v == lit.is_positive())
    }
}

/// Extends `alpha` over each extension variable in declaration order by choosing the unique
/// value that satisfies its defining clauses.
pub fn extend_assignment(pog: &Pog, alpha: &[bool]) -> ExtendedAssignment {
    let mut ext = ExtendedAssignment::default();
    for (i, &a) in alpha.iter().enumerate() {
        ext.values.insert(i as u64 + 1, a);
    }
    for (k, node) in pog.nodes().iter().enumerate() {
        let step = match node {
            PogNode::Product { var, args } => CpogStep::DeclareProduct {
                id: 1 + k as u64,
                var: *var,
                args: args.clone(),
            },
            PogNode::Sum { var, left, right } => CpogStep::DeclareSum {
                id: 1 + k as u64,
                var: *var,
                left: *left,
                right: *right,
                hint: vec![],
            },
        };
        let clauses = step.defining_clauses();
        let var = node.var().index();
        let fits = |v: bool, ext: &ExtendedAssignment| {
            clauses.iter().all(|(_, c)| {
                c.iter().any(|&l| {
                    if l.var().index() == var {
                        v == l.is_positive()
                    } else {
                        ext.value(l).expect("well-founded")
                    }
                })
            })
        };
        let (t, f) = (fits(true, &ext), fits(false, &ext));
        assert!(t != f, "defining clauses must determine variable {var}");
        ext.values.insert(var, t);
    }
    ext
}

/// Whether the CNF and the POG root have exactly the same models over the inputs.
pub fn equiv_over_x(cnf: &CnfFormula, pog: &Pog) -> Result<bool, TooLarge> {
    guard(cnf.var_count(), EQUIV_LIMIT)?;
    let root = pog.root().expect("POG must have a root");
    let mut equal = true;
    for_each_assignment(cnf.var_count(), |a| {
        if equal {
            let r = extend_assignment(pog, a).value(root).expect("root declared");
            equal = r == cnf.is_satisfied_by(a);
        }
    });
    Ok(equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{parse_dimacs, Var};
    use crate::evaluator::{Q25Ring, Q25};

    const WORKED: &str = "p cnf 4 5\n-1 3 -4 0\n-1 -3 4 0\n3 -4 0\n1 -3 4 0\n-1 -2 0\n";

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v)
    }

    fn worked_pog() -> Pog {
        let var = |v| Var::new(v).unwrap();
        let mut p = Pog::new(4);
        p.add_product(var(5), vec![lit(-3), lit(-4)]).unwrap();
        p.add_product(var(6), vec![lit(3), lit(4)]).unwrap();
        p.add_sum(var(7), lit(5), lit(6)).unwrap();
        p.add_product(var(8), vec![lit(-1), lit(7)]).unwrap();
        p.add_product(var(9), vec![lit(1), lit(-2), lit(7)]).unwrap();
        p.add_sum(var(10), lit(8), lit(9)).unwrap();
        p.set_root(lit(10)).unwrap();
        p
    }

    #[test]
    fn counts() {
        assert_eq!(brute_count(&parse_dimacs(WORKED).unwrap()).unwrap(), 6);
        assert_eq!(brute_count(&CnfFormula::from_dimacs(3, &[&[1, 3]])).unwrap(), 6);
        assert_eq!(
            brute_count(&CnfFormula::from_dimacs(3, &[&[1, 3], &[2, -3]])).unwrap(),
            4
        );
        assert_eq!(brute_count(&CnfFormula::from_dimacs(3, &[])).unwrap(), 8);
        assert!(brute_count(&CnfFormula::from_dimacs(25, &[])).is_err());
    }

    #[test]
    fn weighted() {
        let half = vec![(Q25::half(), Q25::half()); 4];
        let cnf = parse_dimacs(WORKED).unwrap();
        assert_eq!(
            brute_weighted(&cnf, &Q25Ring, &half).unwrap().to_decimal(),
            "0.375"
        );
        let unsat = CnfFormula::from_dimacs(1, &[&[1], &[-1]]);
        assert!(brute_weighted(&unsat, &Q25Ring, &half[..1]).unwrap().is_zero());
        let q = Q25::parse_decimal("0.3").unwrap();
        let unit = CnfFormula::from_dimacs(1, &[&[1]]);
        let w = vec![(q.clone(), Q25::one().sub(&q))];
        assert_eq!(brute_weighted(&unit, &Q25Ring, &w).unwrap(), q);
    }

    #[test]
    fn extension() {
        let p = worked_pog();
        let e = extend_assignment(&p, &[false, true, false, false]);
        for v in [5, 7, 8, 10] {
            assert_eq!(e.value(lit(v)), Some(true), "{v}");
        }
        let e = extend_assignment(&p, &[true, true, false, false]);
        assert_eq!(e.value(lit(10)), Some(false));
        let mut c = Pog::new(1);
        c.add_product(Var::new(2).unwrap(), vec![]).unwrap();
        assert_eq!(extend_assignment(&c, &[false]).value(lit(2)), Some(true));
    }

    #[test]
    fn equivalence() {
        let p = worked_pog();
        assert!(equiv_over_x(&parse_dimacs(WORKED).unwrap(), &p).unwrap());
        let phi1 = CnfFormula::from_dimacs(4, &[&[1, 3]]);
        assert!(!equiv_over_x(&phi1, &p).unwrap());
        let mut one = Pog::new(2);
        one.add_product(Var::new(3).unwrap(), vec![]).unwrap();
        one.set_root(lit(3)).unwrap();
        assert!(equiv_over_x(&CnfFormula::from_dimacs(2, &[&[1, -1]]), &one).unwrap());
        assert!(!equiv_over_x(&CnfFormula::from_dimacs(2, &[&[1]]), &one).unwrap());
    }
}
