//! Forward implication proof: every input model satisfies the POG root.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;

use super::translate::{NodeInfo, Translation};
use super::{GenError, GenOptions, GenStats, LemmaPolicy, Strategy};
use crate::cnf::{clause_is_tautology, CnfFormula, Lit, Var};
use crate::cpog::{product_clauses, CpogStep};
use crate::pog::{Pog, PogNode};
use crate::satproof::SolveOutcome;

/// A partial assignment that remembers insertion order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Assign {
    order: Vec<Lit>,
    vals: HashMap<u64, bool>,
}

impl Assign {
    pub fn value(&self, l: Lit) -> Option<bool> {
        self.vals
            .get(&l.var().index())
            .map(|&v| v == l.is_positive())
    }

    pub fn push(&mut self, l: Lit) {
        if self.vals.insert(l.var().index(), l.is_positive()).is_none() {
            self.order.push(l);
        }
    }

    pub fn with(&self, l: Lit) -> Assign {
        let mut a = self.clone();
        a.push(l);
        a
    }

    pub fn negated(&self) -> impl Iterator<Item = Lit> + '_ {
        self.order.iter().map(|l| l.negate())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum Target {
    Clause(u64),
    /// The node literal already holds under the context.
    Trivial,
}

impl Target {
    fn id(self) -> Option<u64> {
        match self {
            Target::Clause(id) => Some(id),
            Target::Trivial => None,
        }
    }
}

/// Clauses simplified by an assignment; `prov[i]` lists the source IDs of `clauses[i]`.
pub(crate) struct Simplified {
    pub clauses: Vec<Vec<Lit>>,
    pub prov: Vec<Vec<u64>>,
}

pub(crate) fn simplify<'c>(
    ids: &[u64],
    lookup: impl Fn(u64) -> &'c [Lit],
    sigma: &Assign,
) -> Simplified {
    let mut out = Simplified {
        clauses: Vec::new(),
        prov: Vec::new(),
    };
    let mut seen: HashMap<Vec<Lit>, usize> = HashMap::new();
    'outer: for &id in ids {
        let mut c: Vec<Lit> = Vec::new();
        for &l in lookup(id) {
            match sigma.value(l) {
                Some(true) => continue 'outer,
                Some(false) => {}
                None => {
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        if clause_is_tautology(&c) {
            continue;
        }
        let mut key = c.clone();
        key.sort();
        if let Some(&i) = seen.get(&key) {
            out.prov[i].push(id);
        } else {
            seen.insert(key, out.clauses.len());
            out.clauses.push(c);
            out.prov.push(vec![id]);
        }
    }
    out
}

struct Bcp {
    /// Derived literals with their reason clause IDs, in derivation order.
    derived: Vec<(Lit, u64)>,
    position: HashMap<u64, usize>,
    conflict: Option<u64>,
}

enum Justified {
    Hint(Vec<u64>),
    /// The context itself is contradictory; the hint refutes it.
    Conflict(Vec<u64>),
}

#[derive(Clone)]
struct Lemma {
    target: u64,
    /// Guard product variable, its first clause ID, and the guarded clause.
    guards: Vec<(Var, u64, Vec<Lit>)>,
}

pub(crate) struct Forward<'a> {
    cnf: &'a CnfFormula,
    opts: &'a GenOptions,
    strategy: Strategy,
    pog: &'a Pog,
    info: &'a [NodeInfo],
    deps: Vec<Vec<Var>>,
    small: Vec<bool>,
    indegree: Vec<usize>,
    defining: HashMap<u64, Vec<Lit>>,
    next_var: u64,
    next_id: u64,
    steps: Vec<CpogStep>,
    asserted: Vec<(u64, Vec<u64>)>,
    lemmas: HashMap<usize, Lemma>,
    building: HashSet<usize>,
    expansions: Vec<u32>,
    lemma_count: usize,
    applications: usize,
    fallbacks: usize,
    sat_calls: usize,
    groups: usize,
}

impl<'a> Forward<'a> {
    pub fn new(
        cnf: &'a CnfFormula,
        tr: &'a Translation,
        opts: &'a GenOptions,
        strategy: Strategy,
    ) -> Forward<'a> {
        let pog = &tr.pog;
        let mut defining = HashMap::new();
        for d in &tr.declarations {
            defining.extend(d.defining_clauses());
        }
        let small = if strategy == Strategy::StructuralSwitching {
            let limit = BigUint::from(opts.threshold);
            pog.tree_sizes().into_iter().map(|t| t < limit).collect()
        } else {
            vec![false; pog.nodes().len()]
        };
        Forward {
            cnf,
            opts,
            strategy,
            pog,
            info: &tr.info,
            deps: pog.all_dependency_sets(),
            small,
            indegree: pog.reachable_indegrees(),
            defining,
            next_var: tr.next_var,
            next_id: tr.next_id,
            steps: Vec::new(),
            asserted: Vec::new(),
            lemmas: HashMap::new(),
            building: HashSet::new(),
            expansions: vec![0; pog.nodes().len()],
            lemma_count: 0,
            applications: 0,
            fallbacks: 0,
            sat_calls: 0,
            groups: 0,
        }
    }

    /// Emits the forward proof and returns the ID of the root unit clause.
    pub fn run(&mut self) -> Result<u64, GenError> {
        let root = self.pog.root().expect("root");
        let all: Vec<u64> = (1..=self.cnf.clause_count() as u64).collect();
        let empty = Assign::default();
        let target = if self.strategy == Strategy::Monolithic {
            Target::Clause(self.monolithic(root, &empty, &all)?)
        } else {
            self.validate(root, &empty, &all)?
        };
        let id = target.id().ok_or(GenError::NotImplied(root))?;
        let unit = match self.steps.last() {
            Some(CpogStep::AddRup { id: last, clause, .. })
                if *last == id && clause.lits() == [root] =>
            {
                id
            }
            _ => self.assert_clause(vec![root], vec![id]),
        };
        self.asserted.pop();
        Ok(unit)
    }

    pub fn fill_stats(&self, stats: &mut GenStats) {
        stats.forward_steps = self
            .steps
            .iter()
            .filter(|s| matches!(s, CpogStep::AddRup { .. }))
            .count();
        stats.lemmas = self.lemma_count;
        stats.lemma_applications = self.applications;
        stats.lemma_fallbacks = self.fallbacks;
        stats.sat_calls = self.sat_calls;
        stats.groups = self.groups;
        stats.max_expansions = self.expansions.iter().copied().max().unwrap_or(0);
    }

    /// Forward steps, and the asserted clauses other than the root unit with their hints.
    pub fn into_steps(self) -> (Vec<CpogStep>, Vec<(u64, Vec<u64>)>) {
        (self.steps, self.asserted)
    }

    fn lits_of(&self, id: u64) -> &[Lit] {
        match self.cnf.clause(id) {
            Some(c) => c.lits(),
            None => &self.defining[&id],
        }
    }

    fn simplify(&self, ids: &[u64], sigma: &Assign) -> Simplified {
        simplify(ids, |id| self.lits_of(id), sigma)
    }

    fn assert_clause(&mut self, lits: Vec<Lit>, hint: Vec<u64>) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.asserted.push((id, hint.clone()));
        self.steps.push(CpogStep::add(id, lits, hint));
        id
    }

    fn declare_product(&mut self, args: Vec<Lit>) -> (Var, u64) {
        let var = Var::new(self.next_var).expect("positive");
        self.next_var += 1;
        let id = self.next_id;
        self.next_id += 1 + args.len() as u64;
        self.defining.extend(product_clauses(id, var, &args));
        self.steps.push(CpogStep::DeclareProduct { id, var, args });
        (var, id)
    }

    fn context_clause(u: Lit, rho: &Assign) -> Vec<Lit> {
        let mut c = vec![u];
        c.extend(rho.negated());
        c
    }

    fn validate(&mut self, u: Lit, rho: &Assign, psi: &[u64]) -> Result<Target, GenError> {
        if self.pog.is_input(u.var()) {
            return self.literal(u, rho, psi);
        }
        let k = self.pog.node_index(u.var()).expect("declared node");
        if !u.is_positive() || self.small[k] {
            return Ok(Target::Clause(self.monolithic(u, rho, psi)?));
        }
        if self.opts.lemmas && self.indegree[k] > 1 && !self.building.contains(&k) {
            return self.lemma(k, u, rho, psi);
        }
        self.expand(k, u, rho, psi)
    }

    fn literal(&mut self, u: Lit, rho: &Assign, psi: &[u64]) -> Result<Target, GenError> {
        match rho.value(u) {
            Some(true) => return Ok(Target::Trivial),
            Some(false) => return Err(GenError::NotImplied(u)),
            None => {}
        }
        let hint = match self.justify(rho, psi, &[u])? {
            Justified::Hint(h) | Justified::Conflict(h) => h,
        };
        Ok(Target::Clause(
            self.assert_clause(Self::context_clause(u, rho), hint),
        ))
    }

    fn expand(&mut self, k: usize, u: Lit, rho: &Assign, psi: &[u64]) -> Result<Target, GenError> {
        self.expansions[k] += 1;
        let first = self.info[k].first_id;
        match &self.pog.nodes()[k] {
            PogNode::Product { args, .. } if args.is_empty() => Ok(Target::Clause(first)),
            PogNode::Product { args, .. } => {
                let args = args.clone();
                self.product(k, u, &args, rho, psi)
            }
            PogNode::Sum { left, right, .. } => {
                let (left, right) = (*left, *right);
                let d = self.info[k].decision.expect("sum decision");
                self.sum(u, first, d, left, right, rho, psi)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn sum(
        &mut self,
        u: Lit,
        first: u64,
        d: Lit,
        left: Lit,
        right: Lit,
        rho: &Assign,
        psi: &[u64],
    ) -> Result<Target, GenError> {
        let mut hint = Vec::new();
        match rho.value(d) {
            Some(true) => {
                hint.push(first + 1);
                hint.extend(self.validate(left, rho, psi)?.id());
            }
            Some(false) => {
                hint.push(first + 2);
                hint.extend(self.validate(right, rho, psi)?.id());
            }
            None => {
                let tl = self.validate(left, &rho.with(d), psi)?;
                let tr = self.validate(right, &rho.with(d.negate()), psi)?;
                let mut a_lits = vec![d.negate()];
                a_lits.extend(Self::context_clause(u, rho));
                let mut a_hint = vec![first + 1];
                a_hint.extend(tl.id());
                let a = self.assert_clause(a_lits, a_hint);
                hint.extend([a, first + 2]);
                hint.extend(tr.id());
            }
        }
        Ok(Target::Clause(
            self.assert_clause(Self::context_clause(u, rho), hint),
        ))
    }

    fn product(
        &mut self,
        k: usize,
        u: Lit,
        args: &[Lit],
        rho: &Assign,
        psi: &[u64],
    ) -> Result<Target, GenError> {
        let (lits, nodes): (Vec<Lit>, Vec<Lit>) =
            args.iter().partition(|l| self.pog.is_input(l.var()));
        if let Some(&l) = lits.iter().find(|&&l| rho.value(l) == Some(false)) {
            return Err(GenError::NotImplied(l));
        }
        let want: Vec<Lit> = lits
            .iter()
            .copied()
            .filter(|&l| rho.value(l).is_none())
            .collect();
        let mut hint = match self.justify(rho, psi, &want)? {
            Justified::Hint(h) => h,
            Justified::Conflict(h) => {
                return Ok(Target::Clause(
                    self.assert_clause(Self::context_clause(u, rho), h),
                ))
            }
        };
        if !nodes.is_empty() {
            let mut rho_l = rho.clone();
            for &l in &lits {
                rho_l.push(l);
            }
            let parts = match self.partition(u, &nodes, psi, &rho_l)? {
                Ok(parts) => parts,
                Err(empty) => {
                    hint.push(empty);
                    return Ok(Target::Clause(
                        self.assert_clause(Self::context_clause(u, rho), hint),
                    ));
                }
            };
            for (&child, part) in nodes.iter().zip(parts) {
                let vars: HashSet<u64> = part
                    .iter()
                    .flat_map(|&id| self.lits_of(id).iter().map(|l| l.var().index()))
                    .collect();
                let mut rho_c = rho.clone();
                for &l in &lits {
                    if vars.contains(&l.var().index()) {
                        rho_c.push(l);
                    }
                }
                hint.extend(self.validate(child, &rho_c, &part)?.id());
            }
        }
        hint.push(self.info[k].first_id);
        Ok(Target::Clause(
            self.assert_clause(Self::context_clause(u, rho), hint),
        ))
    }

    /// Splits the clauses simplified by `sigma` into connected components and assigns
    /// each to the child whose dependency set contains it. `Err` carries a clause that
    /// `sigma` falsifies.
    fn partition(
        &self,
        u: Lit,
        children: &[Lit],
        psi: &[u64],
        sigma: &Assign,
    ) -> Result<Result<Vec<Vec<u64>>, u64>, GenError> {
        let gamma = self.simplify(psi, sigma);
        if let Some(i) = gamma.clauses.iter().position(Vec::is_empty) {
            return Ok(Err(gamma.prov[i][0]));
        }
        let mut owner: HashMap<u64, usize> = HashMap::new();
        for (i, c) in children.iter().enumerate() {
            let k = self.pog.node_index(c.var()).ok_or(GenError::Mismatch(u))?;
            for v in &self.deps[k] {
                owner.insert(v.index(), i);
            }
        }
        let mut parts = vec![Vec::new(); children.len()];
        for (c, prov) in gamma.clauses.iter().zip(&gamma.prov) {
            // Variables absent from the graph are free; a clause goes to the one child
            // owning the rest of its variables.
            let mut who = c.iter().filter_map(|l| owner.get(&l.var().index()).copied());
            let Some(i) = who.next() else { continue };
            if who.any(|w| w != i) {
                return Err(GenError::Mismatch(u));
            }
            parts[i].extend_from_slice(prov);
        }
        for p in &mut parts {
            p.sort_unstable();
            p.dedup();
        }
        Ok(Ok(parts))
    }

    fn bcp(&self, psi: &[u64], rho: &Assign) -> Bcp {
        let mut out = Bcp {
            derived: Vec::new(),
            position: HashMap::new(),
            conflict: None,
        };
        let mut free: Vec<Vec<Lit>> = Vec::with_capacity(psi.len());
        let mut count: Vec<usize> = Vec::with_capacity(psi.len());
        let mut sat: Vec<bool> = Vec::with_capacity(psi.len());
        let mut occurs: HashMap<Lit, Vec<usize>> = HashMap::new();
        let mut queue = VecDeque::new();
        for (ci, &id) in psi.iter().enumerate() {
            let mut f: Vec<Lit> = Vec::new();
            let mut satisfied = false;
            for &l in self.lits_of(id) {
                match rho.value(l) {
                    Some(true) => satisfied = true,
                    Some(false) => {}
                    None if !f.contains(&l) => f.push(l),
                    None => {}
                }
            }
            satisfied |= clause_is_tautology(&f);
            if !satisfied {
                match f.len() {
                    0 => {
                        out.conflict = Some(id);
                        return out;
                    }
                    1 => queue.push_back(ci),
                    _ => {}
                }
                for &l in &f {
                    occurs.entry(l).or_default().push(ci);
                }
            }
            count.push(f.len());
            free.push(f);
            sat.push(satisfied);
        }
        let mut local: HashMap<u64, bool> = HashMap::new();
        while let Some(ci) = queue.pop_front() {
            if sat[ci] {
                continue;
            }
            let value = |l: Lit, local: &HashMap<u64, bool>| {
                local.get(&l.var().index()).map(|&v| v == l.is_positive())
            };
            let Some(&l) = free[ci].iter().find(|&&l| value(l, &local).is_none()) else {
                out.conflict = Some(psi[ci]);
                return out;
            };
            local.insert(l.var().index(), l.is_positive());
            out.position.insert(l.var().index(), out.derived.len());
            out.derived.push((l, psi[ci]));
            for &cj in occurs.get(&l).map(Vec::as_slice).unwrap_or(&[]) {
                sat[cj] = true;
            }
            for &cj in occurs.get(&l.negate()).map(Vec::as_slice).unwrap_or(&[]) {
                if sat[cj] {
                    continue;
                }
                count[cj] -= 1;
                match count[cj] {
                    0 => {
                        out.conflict = Some(psi[cj]);
                        return out;
                    }
                    1 => queue.push_back(cj),
                    _ => {}
                }
            }
        }
        out
    }

    /// Reason clauses, in derivation order, needed to derive the given literals by
    /// propagation, followed by the clauses in `tail`.
    fn closure(&self, bcp: &Bcp, seeds: impl IntoIterator<Item = Lit>) -> Vec<u64> {
        let mut need = vec![false; bcp.derived.len()];
        let mut work: Vec<usize> = seeds
            .into_iter()
            .filter_map(|l| bcp.position.get(&l.var().index()).copied())
            .collect();
        while let Some(i) = work.pop() {
            if std::mem::replace(&mut need[i], true) {
                continue;
            }
            let (l, reason) = bcp.derived[i];
            for &r in self.lits_of(reason) {
                if r.var() != l.var() {
                    if let Some(&j) = bcp.position.get(&r.var().index()) {
                        if !need[j] {
                            work.push(j);
                        }
                    }
                }
            }
        }
        bcp.derived
            .iter()
            .zip(need)
            .filter(|(_, n)| *n)
            .map(|((_, r), _)| *r)
            .collect()
    }

    /// Hint clauses that, starting from `rho`, make every literal of `want` true.
    fn justify(&mut self, rho: &Assign, psi: &[u64], want: &[Lit]) -> Result<Justified, GenError> {
        if want.is_empty() {
            return Ok(Justified::Hint(Vec::new()));
        }
        let bcp = self.bcp(psi, rho);
        if let Some(c) = bcp.conflict {
            let mut h = self.closure(&bcp, self.lits_of(c).to_vec());
            h.push(c);
            return Ok(Justified::Conflict(h));
        }
        let mut missing = Vec::new();
        for &l in want {
            match bcp.position.get(&l.var().index()) {
                Some(&i) if bcp.derived[i].0 == l => {}
                Some(_) => return Err(GenError::NotImplied(l)),
                None => missing.push(l),
            }
        }
        let mut hint = self.closure(&bcp, want.iter().copied());
        if missing.len() >= 2 && self.opts.grouping {
            self.groups += 1;
            let (v, first) = self.declare_product(missing.clone());
            let mut ids = psi.to_vec();
            ids.push(first);
            hint.push(self.sat_lift(&ids, rho, v.positive())?);
            hint.extend((1..=missing.len() as u64).map(|j| first + j));
        } else {
            for l in missing {
                hint.push(self.sat_lift(psi, rho, l)?);
            }
        }
        Ok(Justified::Hint(hint))
    }

    /// Proves `(lead ∨ ρ̄)` from the clauses `ids` with one SAT call, lifting each step of
    /// the refutation of the clauses simplified by `ρ ∪ {¬lead}`.
    fn sat_lift(&mut self, ids: &[u64], rho: &Assign, lead: Lit) -> Result<u64, GenError> {
        let sigma = rho.with(lead.negate());
        let simp = self.simplify(ids, &sigma);
        self.sat_calls += 1;
        let proof = match self.opts.oracle.solve(&simp.clauses)? {
            SolveOutcome::Unsat(p) => p,
            SolveOutcome::Sat(_) => return Err(GenError::NotImplied(lead)),
            SolveOutcome::Unknown => return Err(GenError::SolverBudget),
        };
        let k = simp.clauses.len() as u64;
        let suffix = Self::context_clause(lead, rho);
        let mut mapped: Vec<u64> = Vec::with_capacity(proof.steps.len());
        let mut last = None;
        for step in proof.steps {
            let hint: Vec<u64> = step
                .hint
                .iter()
                .map(|&h| {
                    if h <= k {
                        simp.prov[h as usize - 1][0]
                    } else {
                        mapped[(h - k - 1) as usize]
                    }
                })
                .collect();
            let mut lits = step.lits;
            lits.extend_from_slice(&suffix);
            let id = self.assert_clause(lits, hint);
            mapped.push(id);
            last = Some(id);
        }
        last.ok_or(GenError::NotImplied(lead))
    }

    /// Single SAT call over the clauses and the defining clauses below `u`.
    fn monolithic(&mut self, u: Lit, rho: &Assign, psi: &[u64]) -> Result<u64, GenError> {
        let mut ids = psi.to_vec();
        let mut seen = HashSet::new();
        let mut stack = vec![u.var()];
        while let Some(v) = stack.pop() {
            let Some(k) = self.pog.node_index(v) else { continue };
            if !seen.insert(k) {
                continue;
            }
            let node = &self.pog.nodes()[k];
            let count = match node {
                PogNode::Product { args, .. } => args.len() as u64 + 1,
                PogNode::Sum { .. } => 3,
            };
            let first = self.info[k].first_id;
            ids.extend(first..first + count);
            stack.extend(node.args().iter().map(|a| a.var()));
        }
        ids.sort_unstable();
        self.sat_lift(&ids, rho, u)
    }

    fn lemma(&mut self, k: usize, u: Lit, rho: &Assign, psi: &[u64]) -> Result<Target, GenError> {
        if !self.lemmas.contains_key(&k) {
            self.build_lemma(k, u, rho, psi)?;
        }
        let lemma = self.lemmas[&k].clone();
        if lemma.guards.is_empty() {
            self.applications += 1;
            return Ok(Target::Clause(lemma.target));
        }
        let mut activations = Vec::with_capacity(lemma.guards.len());
        for (var, first, clause) in &lemma.guards {
            let hint = if let Some(p) = clause.iter().position(|&l| rho.value(l) == Some(true)) {
                vec![first + 1 + p as u64]
            } else {
                let found = psi.iter().copied().find(|&id| {
                    let lits = self.lits_of(id);
                    lits.iter().all(|&l| rho.value(l) != Some(true))
                        && lits
                            .iter()
                            .all(|&l| rho.value(l) == Some(false) || clause.contains(&l))
                });
                let Some(cid) = found else {
                    self.fallbacks += 1;
                    return self.expand(k, u, rho, psi);
                };
                let mut h: Vec<u64> = clause
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| rho.value(l).is_none())
                    .map(|(j, _)| first + 1 + j as u64)
                    .collect();
                h.push(cid);
                h
            };
            activations.push((var.negative(), hint));
        }
        let mut ids = Vec::with_capacity(activations.len() + 1);
        for (guard, hint) in activations {
            ids.push(self.assert_clause(Self::context_clause(guard, rho), hint));
        }
        ids.push(lemma.target);
        self.applications += 1;
        Ok(Target::Clause(
            self.assert_clause(Self::context_clause(u, rho), ids),
        ))
    }

    fn build_lemma(&mut self, k: usize, u: Lit, rho: &Assign, psi: &[u64]) -> Result<(), GenError> {
        let gamma = self.simplify(psi, rho);
        let mut hyp = Vec::new();
        let mut guards = Vec::new();
        let mut beta = Assign::default();
        // Context literals on the node's own variables become unit hypotheses.
        let deps: HashSet<Var> = self.deps[k].iter().copied().collect();
        let units = rho
            .negated()
            .map(|l| l.negate())
            .filter(|l| deps.contains(&l.var()))
            .map(|l| (vec![l], Vec::new()));
        let clauses: Vec<(Vec<Lit>, Vec<u64>)> =
            gamma.clauses.into_iter().zip(gamma.prov).chain(units).collect();
        for (c, prov) in clauses {
            let reuse = match self.opts.lemma_policy {
                LemmaPolicy::ReuseInput => prov.iter().copied().find(|&id| {
                    id <= self.cnf.clause_count() as u64
                        && self.lits_of(id).iter().all(|&l| rho.value(l).is_none())
                }),
                LemmaPolicy::SynthesizeAll => None,
            };
            if let Some(id) = reuse {
                hyp.push(id);
                continue;
            }
            let (v, first) = self.declare_product(c.iter().map(|l| l.negate()).collect());
            hyp.push(first);
            beta.push(v.negative());
            guards.push((v, first, c));
        }
        hyp.sort_unstable();
        self.building.insert(k);
        let t = self.expand(k, u, &beta, &hyp);
        self.building.remove(&k);
        let target = t?.id().ok_or(GenError::NotImplied(u))?;
        self.lemma_count += 1;
        self.lemmas.insert(k, Lemma { target, guards });
        Ok(())
    }
}
