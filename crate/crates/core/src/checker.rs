//! The trusted CPOG checker: clause database, strict RUP, and step semantics.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{CnfFormula, Lit, Var};
use crate::cpog::{product_clauses, sum_clauses, CpogStep};
use crate::pog::Pog;

/// Largest supported variable count (inputs plus extension variables).
pub const MAX_VARS: u64 = (1 << 31) - 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Input,
    Defining,
    Asserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RupError {
    #[error("hint cites unknown clause {0}")]
    UnknownHint(u64),
    #[error("hint cites deleted clause {0}")]
    InactiveHint(u64),
    #[error("hint cites clause {0}, which is not a defining clause")]
    NotDefining(u64),
    #[error("hint clause {0} is satisfied")]
    Satisfied(u64),
    #[error("hint clause {0} is neither unit nor conflicting")]
    NotUnit(u64),
    #[error("hint clause {0} conflicts before the end of the hint")]
    EarlyConflict(u64),
    #[error("no conflict after the last hint clause")]
    NoConflict,
    #[error("empty hint")]
    EmptyHint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("expected clause ID {expected}, found {found}")]
    BadId { expected: u64, found: u64 },
    #[error("variable {0} is already defined")]
    VarReuse(u64),
    #[error("variable {0} is not defined")]
    UnknownVar(u64),
    #[error("product {var} has overlapping arguments on input variable {input}")]
    DependencyOverlap { var: u64, input: u64 },
    #[error("RUP failure: {0}")]
    Rup(#[from] RupError),
    #[error("clause added without a hint")]
    MissingHint,
    #[error("clause {0} does not exist")]
    UnknownClause(u64),
    #[error("clause {0} is already deleted")]
    AlreadyDeleted(u64),
    #[error("clause {0} is a defining clause and cannot be deleted")]
    DeleteDefining(u64),
    #[error("root declared twice")]
    DuplicateRoot,
    #[error("no root declared")]
    NoRoot,
    #[error("{0} input clauses remain active")]
    InputClausesActive(u64),
    #[error("{0} asserted clauses remain active, expected 1")]
    AssertedCount(u64),
    #[error("remaining asserted clause {0} is not the unit root clause")]
    FinalClauseNotRoot(u64),
}

struct Entry {
    start: usize,
    len: u32,
    origin: Origin,
    active: bool,
}

/// Identified clauses over input and extension variables, with strict RUP checking.
///
/// Literals are stored internally as `2 * var + sign` over a dense variable numbering.
pub struct ClauseDb {
    input_vars: u32,
    ext: HashMap<u64, u32>,
    ext_names: Vec<u64>,
    entries: Vec<Entry>,
    lits: Vec<u32>,
    values: Vec<i8>,
    trail: Vec<u32>,
    active_counts: [u64; 3],
}

fn origin_slot(o: Origin) -> usize {
    match o {
        Origin::Input => 0,
        Origin::Defining => 1,
        Origin::Asserted => 2,
    }
}

impl ClauseDb {
    pub fn new(input_vars: u64) -> Result<ClauseDb, CheckError> {
        if input_vars > MAX_VARS {
            return Err(CheckError::Capacity(format!(
                "{input_vars} input variables (limit {MAX_VARS})"
            )));
        }
        Ok(ClauseDb {
            input_vars: input_vars as u32,
            ext: HashMap::new(),
            ext_names: Vec::new(),
            entries: Vec::new(),
            lits: Vec::new(),
            values: vec![0; input_vars as usize + 1],
            trail: Vec::new(),
            active_counts: [0; 3],
        })
    }

    pub fn input_vars(&self) -> u64 {
        self.input_vars as u64
    }

    fn var_index(&self, var: u64) -> Option<u32> {
        if var <= self.input_vars as u64 {
            Some(var as u32)
        } else {
            self.ext.get(&var).copied()
        }
    }

    fn external_var(&self, idx: u32) -> u64 {
        if idx <= self.input_vars {
            idx as u64
        } else {
            self.ext_names[(idx - self.input_vars - 1) as usize]
        }
    }

    pub fn knows_var(&self, var: Var) -> bool {
        self.var_index(var.index()).is_some()
    }

    /// Internal index of a declared variable.
    pub fn var_slot(&self, var: Var) -> Option<u32> {
        self.var_index(var.index())
    }

    fn intern(&self, lit: Lit) -> Result<u32, CheckError> {
        let v = self
            .var_index(lit.var().index())
            .ok_or(CheckError::UnknownVar(lit.var().index()))?;
        Ok(2 * v + (!lit.is_positive()) as u32)
    }

    fn extern_lit(&self, l: u32) -> Lit {
        let v = self.external_var(l >> 1) as i64;
        Lit::from_dimacs(if l & 1 == 1 { -v } else { v })
    }

    /// Registers a fresh extension variable.
    pub fn declare_var(&mut self, var: Var) -> Result<(), CheckError> {
        if self.knows_var(var) {
            return Err(CheckError::VarReuse(var.index()));
        }
        if self.values.len() as u64 > MAX_VARS {
            return Err(CheckError::Capacity(format!("more than {MAX_VARS} variables")));
        }
        let idx = self.values.len() as u32;
        self.ext.insert(var.index(), idx);
        self.ext_names.push(var.index());
        self.values.push(0);
        Ok(())
    }

    /// The ID the next added clause must carry.
    pub fn next_id(&self) -> u64 {
        self.entries.len() as u64 + 1
    }

    pub fn add_clause(&mut self, id: u64, lits: &[Lit], origin: Origin) -> Result<(), CheckError> {
        if id != self.next_id() {
            return Err(CheckError::BadId {
                expected: self.next_id(),
                found: id,
            });
        }
        let start = self.lits.len();
        for &l in lits {
            match self.intern(l) {
                Ok(x) => self.lits.push(x),
                Err(e) => {
                    self.lits.truncate(start);
                    return Err(e);
                }
            }
        }
        let slice = &mut self.lits[start..];
        slice.sort_unstable();
        let mut len = 0;
        for i in 0..slice.len() {
            if i == 0 || slice[i] != slice[len - 1] {
                slice[len] = slice[i];
                len += 1;
            }
        }
        self.lits.truncate(start + len);
        self.entries.push(Entry {
            start,
            len: len as u32,
            origin,
            active: true,
        });
        self.active_counts[origin_slot(origin)] += 1;
        Ok(())
    }

    fn entry(&self, id: u64) -> Option<&Entry> {
        id.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    pub fn origin(&self, id: u64) -> Option<Origin> {
        self.entry(id).map(|e| e.origin)
    }

    pub fn is_active(&self, id: u64) -> bool {
        self.entry(id).is_some_and(|e| e.active)
    }

    pub fn active_count(&self, origin: Origin) -> u64 {
        self.active_counts[origin_slot(origin)]
    }

    /// Literals of a stored clause, as a set in internal order.
    pub fn clause(&self, id: u64) -> Option<Vec<Lit>> {
        self.entry(id).map(|e| {
            self.lits[e.start..e.start + e.len as usize]
                .iter()
                .map(|&l| self.extern_lit(l))
                .collect()
        })
    }

    pub fn set_active(&mut self, id: u64, active: bool) {
        let i = (id - 1) as usize;
        let e = &mut self.entries[i];
        if e.active != active {
            e.active = active;
            let slot = origin_slot(e.origin);
            if active {
                self.active_counts[slot] += 1;
            } else {
                self.active_counts[slot] -= 1;
            }
        }
    }

    /// IDs of active clauses with the given origin, ascending.
    pub fn active_ids(&self, origin: Origin) -> Vec<u64> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.active && e.origin == origin)
            .map(|(i, _)| i as u64 + 1)
            .collect()
    }

    #[inline]
    fn value(&self, l: u32) -> i8 {
        let v = self.values[(l >> 1) as usize];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    #[inline]
    fn assign(&mut self, l: u32) {
        self.values[(l >> 1) as usize] = if l & 1 == 1 { -1 } else { 1 };
        self.trail.push(l >> 1);
    }

    fn reset(&mut self) {
        for &v in &self.trail {
            self.values[v as usize] = 0;
        }
        self.trail.clear();
    }

    /// Checks that `target` follows from the hinted clauses by unit propagation.
    ///
    /// Every hint clause must become unit or falsified in turn, and only the last may conflict.
    pub fn check_rup(
        &mut self,
        target: &[Lit],
        hint: &[u64],
        defining_only: bool,
    ) -> Result<(), CheckError> {
        let mut seeds = Vec::with_capacity(target.len());
        for &l in target {
            seeds.push(self.intern(l)?);
        }
        let result = self.run_rup(&seeds, hint, defining_only);
        self.reset();
        result.map_err(CheckError::Rup)
    }

    fn run_rup(&mut self, seeds: &[u32], hint: &[u64], defining_only: bool) -> Result<(), RupError> {
        if hint.is_empty() {
            return Err(RupError::EmptyHint);
        }
        let mut seed_conflict = false;
        for &l in seeds {
            match self.value(l) {
                0 => self.assign(l ^ 1),
                1 => seed_conflict = true,
                _ => {}
            }
        }
        for (k, &id) in hint.iter().enumerate() {
            let e = self.entry(id).ok_or(RupError::UnknownHint(id))?;
            if !e.active {
                return Err(RupError::InactiveHint(id));
            }
            if defining_only && e.origin != Origin::Defining {
                return Err(RupError::NotDefining(id));
            }
            if seed_conflict {
                continue;
            }
            let (start, len) = (e.start, e.len as usize);
            let mut unassigned = None;
            let mut count = 0;
            for i in start..start + len {
                let l = self.lits[i];
                match self.value(l) {
                    1 => return Err(RupError::Satisfied(id)),
                    0 => {
                        count += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            match count {
                0 if k + 1 == hint.len() => return Ok(()),
                0 => return Err(RupError::EarlyConflict(id)),
                1 => self.assign(unassigned.expect("one unassigned literal")),
                _ => return Err(RupError::NotUnit(id)),
            }
        }
        if seed_conflict {
            Ok(())
        } else {
            Err(RupError::NoConflict)
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Accept an unhinted assertion of the root unit clause; caps the verdict at reverse-only.
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    FullEquivalence,
    ReverseOnly,
    /// `step` is the 1-based index of the failing step, or `None` for the final conditions.
    Rejected {
        step: Option<usize>,
        error: CheckError,
    },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        !matches!(self, Verdict::Rejected { .. })
    }
}

/// Streaming checker state. Feed steps with [`Checker::apply`], then call [`Checker::finish`].
pub struct Checker {
    db: ClauseDb,
    pog: Pog,
    deps: Vec<Vec<u32>>,
    stamps: Vec<u32>,
    stamp: u32,
    root: Option<Lit>,
    options: CheckOptions,
    assumption: Option<u64>,
    steps: usize,
}

impl Checker {
    pub fn new(cnf: &CnfFormula, options: CheckOptions) -> Result<Checker, CheckError> {
        let mut db = ClauseDb::new(cnf.var_count())?;
        for (i, c) in cnf.clauses().iter().enumerate() {
            db.add_clause(i as u64 + 1, c.lits(), Origin::Input)?;
        }
        Ok(Checker {
            db,
            pog: Pog::new(cnf.var_count()),
            deps: Vec::new(),
            stamps: vec![0; cnf.var_count() as usize + 1],
            stamp: 0,
            root: None,
            options,
            assumption: None,
            steps: 0,
        })
    }

    pub fn db(&self) -> &ClauseDb {
        &self.db
    }

    pub fn steps_applied(&self) -> usize {
        self.steps
    }

    pub fn apply(&mut self, step: &CpogStep) -> Result<(), CheckError> {
        self.steps += 1;
        match step {
            CpogStep::AddRup { id, clause, hint } => self.apply_add(*id, clause.lits(), hint),
            CpogStep::DeleteRup { id, hint } => self.apply_delete(*id, hint),
            CpogStep::DeclareProduct { id, var, args } => self.apply_product(*id, *var, args),
            CpogStep::DeclareSum {
                id,
                var,
                left,
                right,
                hint,
            } => self.apply_sum(*id, *var, *left, *right, hint),
            CpogStep::DeclareRoot { lit } => self.apply_root(*lit),
        }
    }

    fn check_new_id(&self, id: u64) -> Result<(), CheckError> {
        if id != self.db.next_id() {
            return Err(CheckError::BadId {
                expected: self.db.next_id(),
                found: id,
            });
        }
        Ok(())
    }

    fn check_fresh(&self, var: Var) -> Result<(), CheckError> {
        if self.db.knows_var(var) {
            Err(CheckError::VarReuse(var.index()))
        } else {
            Ok(())
        }
    }

    fn check_known(&self, lit: Lit) -> Result<(), CheckError> {
        if self.db.knows_var(lit.var()) {
            Ok(())
        } else {
            Err(CheckError::UnknownVar(lit.var().index()))
        }
    }

    fn apply_add(&mut self, id: u64, lits: &[Lit], hint: &[u64]) -> Result<(), CheckError> {
        self.check_new_id(id)?;
        for &l in lits {
            self.check_known(l)?;
        }
        if hint.is_empty() {
            let is_root_unit = self.root.is_some_and(|r| lits.iter().all(|&l| l == r))
                && !lits.is_empty();
            if !(self.options.one_sided && is_root_unit) {
                return Err(CheckError::MissingHint);
            }
            self.assumption.get_or_insert(id);
        } else {
            self.db.check_rup(lits, hint, false)?;
        }
        self.db.add_clause(id, lits, Origin::Asserted)
    }

    fn apply_delete(&mut self, id: u64, hint: &[u64]) -> Result<(), CheckError> {
        let origin = self.db.origin(id).ok_or(CheckError::UnknownClause(id))?;
        if origin == Origin::Defining {
            return Err(CheckError::DeleteDefining(id));
        }
        if !self.db.is_active(id) {
            return Err(CheckError::AlreadyDeleted(id));
        }
        let lits = self.db.clause(id).expect("clause exists");
        self.db.set_active(id, false);
        if let Err(e) = self.db.check_rup(&lits, hint, false) {
            self.db.set_active(id, true);
            return Err(e);
        }
        Ok(())
    }

    /// Dependency set of a known literal, as input variable indices.
    fn deps_of(&self, lit: Lit) -> DepRef<'_> {
        let idx = self.db.var_slot(lit.var()).expect("known variable");
        if idx <= self.db.input_vars {
            DepRef::Single(idx)
        } else {
            DepRef::Set(&self.deps[(idx - self.db.input_vars - 1) as usize])
        }
    }

    fn apply_product(&mut self, id: u64, var: Var, args: &[Lit]) -> Result<(), CheckError> {
        self.check_new_id(id)?;
        self.check_fresh(var)?;
        for &a in args {
            self.check_known(a)?;
        }
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        let mut union = Vec::new();
        for &a in args {
            let idx = self.db.var_slot(a.var()).expect("known variable");
            let single = [idx];
            let deps: &[u32] = if idx <= self.db.input_vars {
                &single
            } else {
                &self.deps[(idx - self.db.input_vars - 1) as usize]
            };
            for &x in deps {
                if self.stamps[x as usize] == self.stamp {
                    return Err(CheckError::DependencyOverlap {
                        var: var.index(),
                        input: x as u64,
                    });
                }
                self.stamps[x as usize] = self.stamp;
            }
            union.extend_from_slice(deps);
        }
        union.sort_unstable();
        self.db.declare_var(var)?;
        for (cid, lits) in product_clauses(id, var, args) {
            self.db.add_clause(cid, &lits, Origin::Defining)?;
        }
        self.deps.push(union);
        self.pog
            .add_product(var, args.to_vec())
            .expect("checked by the clause database");
        Ok(())
    }

    fn apply_sum(
        &mut self,
        id: u64,
        var: Var,
        left: Lit,
        right: Lit,
        hint: &[u64],
    ) -> Result<(), CheckError> {
        self.check_new_id(id)?;
        self.check_fresh(var)?;
        self.check_known(left)?;
        self.check_known(right)?;
        self.db
            .check_rup(&[left.negate(), right.negate()], hint, true)?;
        let union = merge(self.deps_of(left).as_slice(), self.deps_of(right).as_slice());
        self.db.declare_var(var)?;
        for (cid, lits) in sum_clauses(id, var, left, right) {
            self.db.add_clause(cid, &lits, Origin::Defining)?;
        }
        self.deps.push(union);
        self.pog
            .add_sum(var, left, right)
            .expect("checked by the clause database");
        Ok(())
    }

    fn apply_root(&mut self, lit: Lit) -> Result<(), CheckError> {
        if self.root.is_some() {
            return Err(CheckError::DuplicateRoot);
        }
        self.check_known(lit)?;
        self.root = Some(lit);
        Ok(())
    }

    fn final_conditions(&self) -> Result<Verdict, CheckError> {
        let root = self.root.ok_or(CheckError::NoRoot)?;
        let inputs = self.db.active_count(Origin::Input);
        if inputs > 0 {
            return Err(CheckError::InputClausesActive(inputs));
        }
        let asserted = self.db.active_count(Origin::Asserted);
        if asserted != 1 {
            return Err(CheckError::AssertedCount(asserted));
        }
        let id = self.db.active_ids(Origin::Asserted)[0];
        if self.db.clause(id).as_deref() != Some(&[root][..]) {
            return Err(CheckError::FinalClauseNotRoot(id));
        }
        Ok(if self.assumption.is_some() {
            Verdict::ReverseOnly
        } else {
            Verdict::FullEquivalence
        })
    }

    /// Evaluates the final conditions. The POG is returned only for accepted proofs.
    pub fn finish(self) -> (Verdict, Option<Pog>) {
        match self.final_conditions() {
            Ok(v) => {
                let mut pog = self.pog;
                pog.set_root(self.root.expect("root checked"))
                    .expect("root variable is declared");
                (v, Some(pog))
            }
            Err(error) => (Verdict::Rejected { step: None, error }, None),
        }
    }
}

enum DepRef<'a> {
    Single(u32),
    Set(&'a [u32]),
}

impl DepRef<'_> {
    fn as_slice(&self) -> &[u32] {
        match self {
            DepRef::Single(x) => std::slice::from_ref(x),
            DepRef::Set(s) => s,
        }
    }
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Result of checking a whole proof.
#[derive(Debug)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub pog: Option<Pog>,
}

/// Replays `steps` against `cnf`, stopping at the first failing step.
pub fn check_proof<'a>(
    cnf: &CnfFormula,
    steps: impl IntoIterator<Item = &'a CpogStep>,
    options: CheckOptions,
) -> CheckOutcome {
    let mut checker = match Checker::new(cnf, options) {
        Ok(c) => c,
        Err(error) => {
            return CheckOutcome {
                verdict: Verdict::Rejected { step: None, error },
                pog: None,
            }
        }
    };
    for (i, step) in steps.into_iter().enumerate() {
        if let Err(error) = checker.apply(step) {
            return CheckOutcome {
                verdict: Verdict::Rejected {
                    step: Some(i + 1),
                    error,
                },
                pog: None,
            };
        }
    }
    let (verdict, pog) = checker.finish();
    CheckOutcome { verdict, pog }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::parse_dimacs;
    use crate::cpog::parse_cpog;

    const CNF: &str = "p cnf 4 5\n-1 3 -4 0\n-1 -3 4 0\n3 -4 0\n1 -3 4 0\n-1 -2 0\n";
    const DECLS: &str = "6 p 5 -3 -4 0\n9 p 6 3 4 0\n12 s 7 5 6 7 10 0\n15 p 8 -1 7 0\n18 p 9 1 -2 7 0\n22 s 10 8 9 16 19 0\nr 10\n";

    fn l(v: &[i64]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    fn checker_with_decls() -> Checker {
        let cnf = parse_dimacs(CNF).unwrap();
        let mut c = Checker::new(&cnf, CheckOptions::default()).unwrap();
        for s in parse_cpog(DECLS).unwrap() {
            c.apply(&s).unwrap();
        }
        c
    }

    #[test]
    fn rup_examples() {
        let mut c = checker_with_decls();
        assert_eq!(c.db.check_rup(&l(&[5, 1, 3]), &[3, 6], false), Ok(()));
        assert_eq!(
            c.db.check_rup(&l(&[5, 1, 3]), &[12, 3], false),
            Err(CheckError::Rup(RupError::NotUnit(12)))
        );
        assert_eq!(
            c.db.check_rup(&l(&[5, 1, 3]), &[3], false),
            Err(CheckError::Rup(RupError::NoConflict))
        );
        assert_eq!(
            c.db.check_rup(&l(&[5, 1, 3]), &[3, 6, 7], false),
            Err(CheckError::Rup(RupError::EarlyConflict(6)))
        );
        assert_eq!(
            c.db.check_rup(&l(&[5, 1, 3]), &[99], false),
            Err(CheckError::Rup(RupError::UnknownHint(99)))
        );
        assert_eq!(
            c.db.check_rup(&l(&[5, 1, 3]), &[3, 6], true),
            Err(CheckError::Rup(RupError::NotDefining(3)))
        );
        assert_eq!(
            c.db.check_rup(&l(&[5, -5]), &[], false),
            Err(CheckError::Rup(RupError::EmptyHint))
        );
        assert_eq!(c.db.check_rup(&l(&[5, -5]), &[3], false), Ok(()));
        // The assignment is fully reset between checks.
        assert_eq!(c.db.check_rup(&l(&[5, 1, 3]), &[3, 6], false), Ok(()));
    }

    #[test]
    fn sum_hint_must_be_defining() {
        let cnf = parse_dimacs(CNF).unwrap();
        let mut c = Checker::new(&cnf, CheckOptions::default()).unwrap();
        for s in parse_cpog("6 p 5 -3 -4 0\n9 p 6 3 4 0\n").unwrap() {
            c.apply(&s).unwrap();
        }
        let bad = parse_cpog("12 s 7 5 6 3 10 0").unwrap().remove(0);
        assert_eq!(
            c.apply(&bad),
            Err(CheckError::Rup(RupError::NotDefining(3)))
        );
        let good = parse_cpog("12 s 7 5 6 7 10 0").unwrap().remove(0);
        assert_eq!(c.apply(&good), Ok(()));
    }

    #[test]
    fn product_checks() {
        let mut c = checker_with_decls();
        let overlap = parse_cpog("25 p 11 3 -3 0").unwrap().remove(0);
        assert_eq!(
            c.apply(&overlap),
            Err(CheckError::DependencyOverlap { var: 11, input: 3 })
        );
        let overlap = parse_cpog("25 p 11 7 -4 0").unwrap().remove(0);
        assert_eq!(
            c.apply(&overlap),
            Err(CheckError::DependencyOverlap { var: 11, input: 4 })
        );
        let reuse = parse_cpog("25 p 10 1 0").unwrap().remove(0);
        assert_eq!(c.apply(&reuse), Err(CheckError::VarReuse(10)));
        let reuse = parse_cpog("25 p 4 1 0").unwrap().remove(0);
        assert_eq!(c.apply(&reuse), Err(CheckError::VarReuse(4)));
        let unknown = parse_cpog("25 p 11 12 0").unwrap().remove(0);
        assert_eq!(c.apply(&unknown), Err(CheckError::UnknownVar(12)));
        let gap = parse_cpog("26 p 11 1 0").unwrap().remove(0);
        assert_eq!(
            c.apply(&gap),
            Err(CheckError::BadId {
                expected: 25,
                found: 26
            })
        );
        let ok = parse_cpog("25 p 11 0").unwrap().remove(0);
        assert_eq!(c.apply(&ok), Ok(()));
        assert_eq!(c.db.clause(25).unwrap(), l(&[11]));
    }

    #[test]
    fn deletion_rules() {
        let mut c = checker_with_decls();
        let d = parse_cpog("d 7 1 0").unwrap().remove(0);
        assert_eq!(c.apply(&d), Err(CheckError::DeleteDefining(7)));
        let d = parse_cpog("d 1 8 10 12 16 21 22 0").unwrap().remove(0);
        assert!(c.apply(&d).is_err());
        assert!(c.db.is_active(1));
    }

    #[test]
    fn one_sided_assumption() {
        let cnf = parse_dimacs(CNF).unwrap();
        let text = format!(
            "{DECLS}25 a 10 0 0\nd 1 25 8 10 12 16 21 22 0\nd 2 25 7 11 12 16 21 22 0\nd 3 25 8 10 12 17 21 22 0\nd 4 25 7 11 12 17 19 22 0\nd 5 25 16 20 22 0\n"
        );
        let steps = parse_cpog(&text).unwrap();
        let out = check_proof(&cnf, &steps, CheckOptions { one_sided: true });
        assert_eq!(out.verdict, Verdict::ReverseOnly);
        let out = check_proof(&cnf, &steps, CheckOptions::default());
        assert_eq!(
            out.verdict,
            Verdict::Rejected {
                step: Some(8),
                error: CheckError::MissingHint
            }
        );
    }

    #[test]
    fn final_conditions() {
        let cnf = parse_dimacs(CNF).unwrap();
        let steps = parse_cpog("6 p 5 -3 -4 0\n").unwrap();
        let out = check_proof(&cnf, &steps, CheckOptions::default());
        assert_eq!(
            out.verdict,
            Verdict::Rejected {
                step: None,
                error: CheckError::NoRoot
            }
        );
        let steps = parse_cpog("6 p 5 -3 -4 0\nr 5\n").unwrap();
        let out = check_proof(&cnf, &steps, CheckOptions::default());
        assert_eq!(
            out.verdict,
            Verdict::Rejected {
                step: None,
                error: CheckError::InputClausesActive(5)
            }
        );
    }

    #[test]
    fn merge_sorted() {
        assert_eq!(merge(&[1, 3, 5], &[2, 3, 6]), vec![1, 2, 3, 5, 6]);
        assert_eq!(merge(&[], &[4]), vec![4]);
    }
}
