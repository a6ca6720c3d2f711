//! A small top-down decision-DNNF compiler: unit propagation, component splitting,
//! lowest-index decisions with the negative branch first, and a component cache.

use std::collections::HashMap;

use crate::cnf::{clause_is_tautology, CnfFormula, Lit};
use crate::generator::{DArc, DKind, DNode, DdnnfGraph};

type Clauses = Vec<Vec<Lit>>;

struct Compiler {
    nodes: Vec<DNode>,
    cache: HashMap<Clauses, usize>,
    t: Option<usize>,
    f: Option<usize>,
}

fn assign(clauses: &[Vec<Lit>], lits: &[Lit]) -> Clauses {
    let val: HashMap<u64, bool> = lits
        .iter()
        .map(|l| (l.var().index(), l.is_positive()))
        .collect();
    let mut out = Vec::with_capacity(clauses.len());
    'outer: for c in clauses {
        let mut d = Vec::with_capacity(c.len());
        for &l in c {
            match val.get(&l.var().index()) {
                Some(&v) if v == l.is_positive() => continue 'outer,
                Some(_) => {}
                None => d.push(l),
            }
        }
        out.push(d);
    }
    out
}

/// Units implied by propagation, or `None` on conflict.
fn propagate(clauses: &[Vec<Lit>]) -> Option<Vec<Lit>> {
    let mut units: Vec<Lit> = Vec::new();
    let mut val: HashMap<u64, bool> = HashMap::new();
    loop {
        let mut changed = false;
        for c in clauses {
            let mut free = None;
            let mut n_free = 0;
            let mut sat = false;
            for &l in c {
                match val.get(&l.var().index()) {
                    Some(&v) if v == l.is_positive() => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        if free != Some(l) {
                            n_free += 1;
                        }
                        free = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match (n_free, free) {
                (0, _) => return None,
                (1, Some(l)) => {
                    val.insert(l.var().index(), l.is_positive());
                    units.push(l);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(units);
        }
    }
}

fn components(clauses: Clauses) -> Vec<Clauses> {
    let mut parent: HashMap<u64, u64> = HashMap::new();
    fn find(p: &mut HashMap<u64, u64>, x: u64) -> u64 {
        let mut r = x;
        while let Some(&q) = p.get(&r) {
            if q == r {
                break;
            }
            r = q;
        }
        let mut y = x;
        while y != r {
            let next = p[&y];
            p.insert(y, r);
            y = next;
        }
        r
    }
    for c in &clauses {
        for l in c {
            parent.entry(l.var().index()).or_insert(l.var().index());
        }
        for w in c.windows(2) {
            let a = find(&mut parent, w[0].var().index());
            let b = find(&mut parent, w[1].var().index());
            if a != b {
                parent.insert(a.max(b), a.min(b));
            }
        }
    }
    let mut groups: Vec<Clauses> = Vec::new();
    let mut slot: HashMap<u64, usize> = HashMap::new();
    for c in clauses {
        let r = find(&mut parent, c[0].var().index());
        let i = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[i].push(c);
    }
    groups
}

fn canonical(mut clauses: Clauses) -> Clauses {
    for c in &mut clauses {
        c.sort();
        c.dedup();
    }
    clauses.retain(|c| !clause_is_tautology(c));
    clauses.sort();
    clauses.dedup();
    clauses
}

impl Compiler {
    fn push(&mut self, kind: DKind, arcs: Vec<DArc>) -> usize {
        self.nodes.push(DNode {
            id: self.nodes.len() as u64 + 1,
            kind,
            arcs,
        });
        self.nodes.len() - 1
    }

    fn constant(&mut self, value: bool) -> usize {
        let slot = if value { self.t } else { self.f };
        if let Some(k) = slot {
            return k;
        }
        let k = self.push(if value { DKind::True } else { DKind::False }, Vec::new());
        if value {
            self.t = Some(k);
        } else {
            self.f = Some(k);
        }
        k
    }

    fn formula(&mut self, clauses: Clauses) -> usize {
        let Some(units) = propagate(&clauses) else {
            return self.constant(false);
        };
        let rest = canonical(assign(&clauses, &units));
        let mut arcs = Vec::new();
        if !units.is_empty() {
            let t = self.constant(true);
            arcs.push(DArc {
                lits: units,
                child: t,
            });
        }
        for comp in components(rest) {
            let k = self.component(comp);
            if self.nodes[k].kind == DKind::False {
                return k;
            }
            arcs.push(DArc {
                lits: Vec::new(),
                child: k,
            });
        }
        match arcs.len() {
            0 => self.constant(true),
            1 if arcs[0].lits.is_empty() => arcs[0].child,
            _ => self.push(DKind::And, arcs),
        }
    }

    fn component(&mut self, clauses: Clauses) -> usize {
        let key = canonical(clauses);
        if let Some(&k) = self.cache.get(&key) {
            return k;
        }
        let x = key
            .iter()
            .flatten()
            .map(|l| l.var())
            .min()
            .expect("nonempty component");
        let mut arcs = Vec::with_capacity(2);
        for l in [x.negative(), x.positive()] {
            let child = self.formula(assign(&key, &[l]));
            arcs.push(DArc {
                lits: vec![l],
                child,
            });
        }
        let k = self.push(DKind::Or, arcs);
        self.cache.insert(key, k);
        k
    }
}

/// Compiles a formula into a decision-DNNF graph.
pub fn compile(cnf: &CnfFormula) -> DdnnfGraph {
    let mut c = Compiler {
        nodes: Vec::new(),
        cache: HashMap::new(),
        t: None,
        f: None,
    };
    let clauses: Clauses = cnf.clauses().iter().map(|c| c.lits().to_vec()).collect();
    let root = c.formula(canonical(clauses));
    DdnnfGraph::new(c.nodes, root).expect("compiler output is well formed")
}

/// Compiles a formula and renders the graph as d4 text.
pub fn compile_to_d4(cnf: &CnfFormula) -> String {
    compile(cnf).to_d4()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::parse_d4;

    #[test]
    fn worked_example_shape() {
        let cnf = CnfFormula::from_dimacs(
            4,
            &[&[-1, 3, -4], &[-1, -3, 4], &[3, -4], &[1, -3, 4], &[-1, -2]],
        );
        let g = compile(&cnf);
        let root = &g.nodes()[g.root()];
        assert_eq!(root.kind, DKind::Or);
        assert_eq!(g.decision(g.root()), Some(Lit::from_dimacs(-1)));
        assert_eq!(parse_d4(&g.to_d4()).unwrap().nodes().len(), g.nodes().len());
    }

    #[test]
    fn constants_and_units() {
        let unsat = CnfFormula::from_dimacs(1, &[&[1], &[-1]]);
        assert_eq!(compile(&unsat).nodes()[0].kind, DKind::False);
        let valid = CnfFormula::from_dimacs(2, &[]);
        assert_eq!(compile(&valid).nodes()[0].kind, DKind::True);
        let units = CnfFormula::from_dimacs(3, &[&[1], &[-2, 3], &[-3]]);
        let g = compile(&units);
        let r = &g.nodes()[g.root()];
        assert_eq!(r.kind, DKind::And);
        assert_eq!(r.arcs[0].lits.len(), 3);
    }

    #[test]
    fn shared_components_are_cached() {
        let cnf = CnfFormula::from_dimacs(4, &[&[-1, -2], &[-1, -3, -4], &[-3, -4]]);
        let g = compile(&cnf);
        assert!(g.indegrees().iter().any(|&d| d > 1));
    }
}
