//! A CDCL solver that records a hinted RUP derivation for every learned clause.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::cnf::{clause_is_tautology, Lit};

const NO_REASON: u32 = u32::MAX;

/// One derived clause. Hint IDs refer to input clauses (`1..=m`, by position) and
/// to earlier proof steps (`m + 1`, `m + 2`, ... in order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub lits: Vec<Lit>,
    pub hint: Vec<u64>,
}

/// A derivation ending with the empty clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnsatProof {
    pub steps: Vec<ProofStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A value for every variable occurring in the clauses.
    Sat(Vec<Lit>),
    Unsat(UnsatProof),
    /// The conflict budget ran out.
    Unknown,
}

#[derive(Copy, Clone, Debug, Default)]
pub struct SolverOptions {
    pub conflict_budget: Option<u64>,
}

#[derive(Copy, Clone, PartialEq)]
struct Activity(f64, u32);

impl Eq for Activity {}

impl PartialOrd for Activity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Activity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

struct Solver {
    names: Vec<u64>,
    clauses: Vec<Vec<u32>>,
    ids: Vec<u64>,
    watches: Vec<Vec<u32>>,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail_pos: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    inc: f64,
    heap: BinaryHeap<Activity>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    proof: Vec<ProofStep>,
    next_id: u64,
}

impl Solver {
    fn lit_value(&self, l: u32) -> i8 {
        let v = self.values[(l >> 1) as usize];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn external(&self, l: u32) -> Lit {
        let v = self.names[(l >> 1) as usize] as i64;
        Lit::from_dimacs(if l & 1 == 1 { -v } else { v })
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: u32, reason: u32) {
        let v = (l >> 1) as usize;
        self.values[v] = if l & 1 == 1 { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len() as u32;
        self.trail.push(l);
    }

    fn attach(&mut self, ci: u32) {
        let c = &self.clauses[ci as usize];
        if c.len() >= 2 {
            let (a, b) = (c[0], c[1]);
            self.watches[a as usize].push(ci);
            self.watches[b as usize].push(ci);
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            'clauses: while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let v = self.values[(first >> 1) as usize];
                if (if first & 1 == 1 { -v } else { v }) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                for k in 2..c.len() {
                    let l = c[k];
                    let v = self.values[(l >> 1) as usize];
                    let val = if l & 1 == 1 { -v } else { v };
                    if val != -1 {
                        c.swap(1, k);
                        let w = c[1];
                        self.watches[w as usize].push(ci);
                        continue 'clauses;
                    }
                }
                ws[j] = ci;
                j += 1;
                if self.lit_value(first) == -1 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, ci);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
            self.heap = (0..self.activity.len())
                .filter(|&u| self.values[u] == 0)
                .map(|u| Activity(self.activity[u], u as u32))
                .collect();
        }
        if self.values[v] == 0 {
            self.heap.push(Activity(self.activity[v], v as u32));
        }
    }

    /// Level-0 variables reachable through reasons from `start`, in trail order.
    fn level0_closure(&mut self, start: &[u32], marks: &mut Vec<u32>) {
        let mut stack: Vec<u32> = start.to_vec();
        while let Some(v) = stack.pop() {
            if self.seen[v as usize] {
                continue;
            }
            self.seen[v as usize] = true;
            marks.push(v);
            let r = self.reason[v as usize];
            for &l in &self.clauses[r as usize] {
                let u = l >> 1;
                if u != v && !self.seen[u as usize] {
                    stack.push(u);
                }
            }
        }
    }

    fn hint_for(&self, vars: &mut [u32], conflict: u32) -> Vec<u64> {
        vars.sort_unstable_by_key(|&v| self.trail_pos[v as usize]);
        let mut hint: Vec<u64> = vars
            .iter()
            .map(|&v| self.ids[self.reason[v as usize] as usize])
            .collect();
        hint.push(self.ids[conflict as usize]);
        hint
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal first) and its hint.
    fn analyze(&mut self, conflict: u32) -> (Vec<u32>, Vec<u64>) {
        let level = self.decision_level();
        let mut learnt = vec![0u32];
        let mut resolved: Vec<u32> = Vec::new();
        let mut level0: Vec<u32> = Vec::new();
        let mut touched: Vec<u32> = Vec::new();
        let mut path = 0;
        let mut clause = conflict;
        let mut idx = self.trail.len();
        let mut p: Option<u32> = None;
        loop {
            let lits = self.clauses[clause as usize].clone();
            for q in lits {
                if Some(q) == p {
                    continue;
                }
                let v = (q >> 1) as usize;
                if self.seen[v] {
                    continue;
                }
                self.seen[v] = true;
                touched.push(v as u32);
                self.bump(v);
                match self.level[v] {
                    0 => level0.push(v as u32),
                    l if l == level => path += 1,
                    _ => learnt.push(q),
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            path -= 1;
            if path == 0 {
                learnt[0] = lit ^ 1;
                break;
            }
            let v = lit >> 1;
            resolved.push(v);
            clause = self.reason[v as usize];
        }
        for &v in &touched {
            self.seen[v as usize] = false;
        }
        let mut closure = Vec::new();
        self.level0_closure(&level0, &mut closure);
        for &v in &closure {
            self.seen[v as usize] = false;
        }
        closure.extend_from_slice(&resolved);
        let hint = self.hint_for(&mut closure, conflict);
        if learnt.len() > 2 {
            let best = (1..learnt.len())
                .max_by_key(|&k| self.level[(learnt[k] >> 1) as usize])
                .expect("nonempty");
            learnt.swap(1, best);
        }
        self.inc /= 0.95;
        (learnt, hint)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let v = (self.trail[k] >> 1) as usize;
            self.phase[v] = self.trail[k] & 1 == 0;
            self.values[v] = 0;
            self.reason[v] = NO_REASON;
            self.heap.push(Activity(self.activity[v], v as u32));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn add_proof_clause(&mut self, lits: Vec<u32>, hint: Vec<u64>) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        self.proof.push(ProofStep {
            lits: lits.iter().map(|&l| self.external(l)).collect(),
            hint,
        });
        let ci = self.clauses.len() as u32;
        self.clauses.push(lits);
        self.ids.push(id);
        ci
    }

    fn refute(&mut self, conflict: u32) -> UnsatProof {
        let start: Vec<u32> = self.clauses[conflict as usize]
            .iter()
            .map(|&l| l >> 1)
            .collect();
        let mut closure = Vec::new();
        self.level0_closure(&start, &mut closure);
        let hint = self.hint_for(&mut closure, conflict);
        self.add_proof_clause(Vec::new(), hint);
        UnsatProof {
            steps: std::mem::take(&mut self.proof),
        }
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(Activity(_, v)) = self.heap.pop() {
            if self.values[v as usize] == 0 {
                let neg = !self.phase[v as usize];
                return Some(2 * v + neg as u32);
            }
        }
        None
    }

    fn model(&self) -> Vec<Lit> {
        (0..self.names.len())
            .map(|v| self.external(2 * v as u32 + (self.values[v] != 1) as u32))
            .collect()
    }

    fn run(&mut self, budget: Option<u64>) -> SolveOutcome {
        if let Some(c) = self.propagate() {
            return SolveOutcome::Unsat(self.refute(c));
        }
        let mut conflicts = 0u64;
        let mut restart_limit = 100.0f64;
        let mut since_restart = 0u64;
        loop {
            match self.propagate() {
                Some(conflict) => {
                    conflicts += 1;
                    since_restart += 1;
                    if self.decision_level() == 0 {
                        return SolveOutcome::Unsat(self.refute(conflict));
                    }
                    if budget.is_some_and(|b| conflicts > b) {
                        return SolveOutcome::Unknown;
                    }
                    let (learnt, hint) = self.analyze(conflict);
                    let back = if learnt.len() == 1 {
                        0
                    } else {
                        self.level[(learnt[1] >> 1) as usize]
                    };
                    self.backtrack(back);
                    let asserting = learnt[0];
                    let ci = self.add_proof_clause(learnt, hint);
                    self.attach(ci);
                    self.enqueue(asserting, ci);
                }
                None => {
                    if since_restart as f64 >= restart_limit {
                        since_restart = 0;
                        restart_limit *= 1.5;
                        self.backtrack(0);
                        continue;
                    }
                    match self.pick_branch() {
                        None => return SolveOutcome::Sat(self.model()),
                        Some(l) => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, NO_REASON);
                        }
                    }
                }
            }
        }
    }
}

/// Solves a clause list. Clause `i` (0-based) has proof ID `i + 1`.
pub fn solve_clauses(clauses: &[Vec<Lit>], options: SolverOptions) -> SolveOutcome {
    let m = clauses.len() as u64;
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut names: Vec<u64> = Vec::new();
    let mut internal: Vec<(u64, Vec<u32>)> = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        let id = i as u64 + 1;
        if c.is_empty() {
            return SolveOutcome::Unsat(UnsatProof {
                steps: vec![ProofStep {
                    lits: Vec::new(),
                    hint: vec![id],
                }],
            });
        }
        if clause_is_tautology(c) {
            continue;
        }
        let mut lits: Vec<u32> = c
            .iter()
            .map(|l| {
                let v = *index.entry(l.var().index()).or_insert_with(|| {
                    names.push(l.var().index());
                    names.len() as u32 - 1
                });
                2 * v + (!l.is_positive()) as u32
            })
            .collect();
        lits.sort_unstable();
        lits.dedup();
        internal.push((id, lits));
    }
    let n = names.len();
    let mut s = Solver {
        names,
        clauses: Vec::with_capacity(internal.len()),
        ids: Vec::with_capacity(internal.len()),
        watches: vec![Vec::new(); 2 * n],
        values: vec![0; n],
        level: vec![0; n],
        reason: vec![NO_REASON; n],
        trail_pos: vec![0; n],
        trail: Vec::with_capacity(n),
        trail_lim: Vec::new(),
        qhead: 0,
        activity: vec![0.0; n],
        inc: 1.0,
        heap: (0..n as u32).map(|v| Activity(0.0, v)).collect(),
        phase: vec![false; n],
        seen: vec![false; n],
        proof: Vec::new(),
        next_id: m + 1,
    };
    for (id, lits) in internal {
        let ci = s.clauses.len() as u32;
        s.clauses.push(lits);
        s.ids.push(id);
        if s.clauses[ci as usize].len() == 1 {
            let l = s.clauses[ci as usize][0];
            match s.lit_value(l) {
                0 => s.enqueue(l, ci),
                -1 => return SolveOutcome::Unsat(s.refute(ci)),
                _ => {}
            }
        } else {
            s.attach(ci);
        }
    }
    s.run(options.conflict_budget)
}
