//! Instance families for tests and benchmarks.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cnf::{Clause, CnfFormula, Lit, Var};
use crate::pog::Pog;

/// The five-clause formula over four variables used throughout the documentation.
pub const WORKED_CNF: &str = "p cnf 4 5\n-1 3 -4 0\n-1 -3 4 0\n3 -4 0\n1 -3 4 0\n-1 -2 0\n";

/// A decision-DNNF for [`WORKED_CNF`].
pub const WORKED_D4: &str =
    "o 1 0\no 2 0\nt 3 0\n1 2 -1 0\n1 2 1 -2 0\n2 3 -3 -4 0\n2 3 3 4 0\n";

pub fn worked_cnf() -> CnfFormula {
    crate::cnf::parse_dimacs(WORKED_CNF).expect("valid")
}

/// Clauses over `n` variables with widths in `1..=max_width`, distinct variables per clause.
pub fn random_cnf<R: Rng>(rng: &mut R, n: u64, m: usize, max_width: usize) -> CnfFormula {
    let vars: Vec<u64> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let w = rng.gen_range(1..=max_width.min(n as usize));
            let lits = vars
                .choose_multiple(rng, w)
                .map(|&v| Lit::from_dimacs(if rng.gen_bool(0.5) { v as i64 } else { -(v as i64) }))
                .collect();
            Clause::new(lits)
        })
        .collect();
    CnfFormula::new(n, clauses).expect("in range")
}

/// A random partitioned POG over `n` inputs, built from decisions and disjoint products.
pub fn random_pog<R: Rng>(rng: &mut R, n: u64) -> Pog {
    let mut pog = Pog::new(n);
    let mut next = n + 1;
    let mut vars: Vec<u64> = (1..=n).collect();
    vars.shuffle(rng);
    let root = build(rng, &mut pog, &mut next, &vars, 0);
    pog.set_root(root).expect("declared");
    pog
}

fn signed<R: Rng>(rng: &mut R, v: u64) -> Lit {
    let l = Var::new(v).expect("positive").positive();
    if rng.gen_bool(0.5) {
        l
    } else {
        l.negate()
    }
}

fn fresh(next: &mut u64) -> Var {
    let v = Var::new(*next).expect("positive");
    *next += 1;
    v
}

fn build<R: Rng>(rng: &mut R, pog: &mut Pog, next: &mut u64, vars: &[u64], depth: u32) -> Lit {
    let r: f64 = rng.gen();
    if vars.len() == 1 || depth > 6 && r < 0.5 {
        return signed(rng, vars[0]);
    }
    if r < 0.35 {
        let cut = rng.gen_range(1..vars.len());
        let mut args = Vec::new();
        for part in [&vars[..cut], &vars[cut..]] {
            let a = build(rng, pog, next, part, depth + 1);
            let negate = !pog.is_input(a.var()) && rng.gen_bool(0.2);
            args.push(if negate { a.negate() } else { a });
        }
        let v = fresh(next);
        pog.add_product(v, args).expect("fresh");
        return v.positive();
    }
    let x = signed(rng, vars[0]);
    let rest = &vars[1..];
    let branch = |pog: &mut Pog, next: &mut u64, lit: Lit, rng: &mut R| {
        let sub = build(rng, pog, next, rest, depth + 1);
        let v = fresh(next);
        pog.add_product(v, vec![lit, sub]).expect("fresh");
        v.positive()
    };
    let left = branch(pog, next, x, rng);
    let right = branch(pog, next, x.negate(), rng);
    let v = fresh(next);
    pog.add_sum(v, left, right).expect("fresh");
    v.positive()
}

/// Variables `a_j = 2j - 1` and `b_j = 2j` with clauses `(¬a_j ∨ ¬b_j)` and
/// `(¬a_j ∨ ¬a_{j+1} ∨ ¬b_{j+1})`. Compiles to a graph with exponential tree size.
pub fn chain_cnf(m: u64) -> CnfFormula {
    let a = |j: u64| -(2 * j as i64 - 1);
    let b = |j: u64| -(2 * j as i64);
    let mut clauses = Vec::new();
    for j in 1..=m {
        clauses.push(Clause::from_dimacs(&[a(j), b(j)]));
        if j < m {
            clauses.push(Clause::from_dimacs(&[a(j), a(j + 1), b(j + 1)]));
        }
    }
    CnfFormula::new(2 * m, clauses).expect("in range")
}

/// `n` unit clauses and the single-product graph that represents them.
pub fn big_product(n: u64) -> (CnfFormula, String) {
    let clauses = (1..=n as i64).map(|v| Clause::from_dimacs(&[v])).collect();
    let cnf = CnfFormula::new(n, clauses).expect("in range");
    let mut d4 = String::with_capacity(8 * n as usize + 32);
    d4.push_str("a 1 0\nt 2 0\n1 2");
    for v in 1..=n {
        write!(d4, " {v}").unwrap();
    }
    d4.push_str(" 0\n");
    (cnf, d4)
}

/// `k` variable-disjoint copies of the worked formula under one product, with its graph.
pub fn worked_copies(k: u64) -> (CnfFormula, String) {
    let mut clauses = Vec::new();
    let base = worked_cnf();
    for c in 0..k {
        let off = 4 * c as i64;
        for cl in base.clauses() {
            let lits: Vec<i64> = cl
                .lits()
                .iter()
                .map(|l| l.value().signum() * (l.value().abs() + off))
                .collect();
            clauses.push(Clause::from_dimacs(&lits));
        }
    }
    let cnf = CnfFormula::new(4 * k, clauses).expect("in range");
    let mut d4 = String::from("a 1 0\nt 2 0\n");
    for c in 0..k {
        let (o, s) = (3 * c + 3, 3 * c + 4);
        writeln!(d4, "o {o} 0\no {s} 0").unwrap();
    }
    for c in 0..k {
        let off = 4 * c as i64;
        let (o, s) = (3 * c + 3, 3 * c + 4);
        let x = |v: i64| v.signum() * (v.abs() + off);
        writeln!(d4, "1 {o} 0").unwrap();
        writeln!(d4, "{o} {s} {} 0", x(-1)).unwrap();
        writeln!(d4, "{o} {s} {} {} 0", x(1), x(-2)).unwrap();
        writeln!(d4, "{s} 2 {} {} 0", x(-3), x(-4)).unwrap();
        writeln!(d4, "{s} 2 {} {} 0", x(3), x(4)).unwrap();
    }
    (cnf, d4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_count;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_shape() {
        let c = chain_cnf(3);
        assert_eq!(c.var_count(), 6);
        assert_eq!(c.clause_count(), 5);
    }

    #[test]
    fn random_pogs_are_partitioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let p = random_pog(&mut rng, n);
            p.check_partitioned().unwrap();
        }
    }

    #[test]
    fn copies_count() {
        let (cnf, d4) = worked_copies(2);
        assert_eq!(brute_count(&cnf).unwrap(), 36);
        assert!(crate::generator::parse_d4(&d4).is_ok());
        let (cnf, _) = big_product(5);
        assert_eq!(brute_count(&cnf).unwrap(), 1);
    }
}
