//! Satisfiability oracles that justify every unsatisfiability claim with a hinted RUP proof.

mod external;
mod solver;

use thiserror::Error;

pub use external::external_solve;
pub use solver::{solve_clauses, ProofStep, SolveOutcome, SolverOptions, UnsatProof};

use crate::checker::{CheckError, ClauseDb, Origin};
use crate::cnf::{CnfFormula, Lit};

#[derive(Debug, Error)]
pub enum SatError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver process failed: {0}")]
    Subprocess(String),
    #[error("malformed proof: {0}")]
    BadProof(String),
    #[error("proof step {step} fails replay: {error}")]
    Replay { step: usize, error: CheckError },
    #[error("solver model does not satisfy the clauses")]
    BadModel,
}

/// Where unsatisfiability proofs come from.
#[derive(Clone, Debug)]
pub enum Oracle {
    BuiltIn(SolverOptions),
    /// Shell command template with `{cnf}` and `{proof}` placeholders.
    External(String),
}

impl Default for Oracle {
    fn default() -> Oracle {
        Oracle::BuiltIn(SolverOptions::default())
    }
}

impl Oracle {
    pub fn solve(&self, clauses: &[Vec<Lit>]) -> Result<SolveOutcome, SatError> {
        match self {
            Oracle::BuiltIn(opts) => Ok(solve_clauses(clauses, *opts)),
            Oracle::External(cmd) => external_solve(clauses, cmd),
        }
    }
}

/// Solves a whole formula with the built-in solver.
pub fn solve(cnf: &CnfFormula, options: SolverOptions) -> SolveOutcome {
    let clauses: Vec<Vec<Lit>> = cnf.clauses().iter().map(|c| c.lits().to_vec()).collect();
    solve_clauses(&clauses, options)
}

/// Replays a proof under strict RUP. Returns the 1-based index of the first failing step.
pub fn replay_proof(clauses: &[Vec<Lit>], proof: &UnsatProof) -> Result<(), SatError> {
    let n = clauses
        .iter()
        .chain(proof.steps.iter().map(|s| &s.lits))
        .flatten()
        .map(|l| l.var().index())
        .max()
        .unwrap_or(0);
    let replay_err = |step: usize, error: CheckError| SatError::Replay { step, error };
    let mut db = ClauseDb::new(n).map_err(|e| replay_err(0, e))?;
    for (i, c) in clauses.iter().enumerate() {
        db.add_clause(i as u64 + 1, c, Origin::Input)
            .map_err(|e| replay_err(0, e))?;
    }
    for (k, step) in proof.steps.iter().enumerate() {
        db.check_rup(&step.lits, &step.hint, false)
            .map_err(|e| replay_err(k + 1, e))?;
        db.add_clause(db.next_id(), &step.lits, Origin::Asserted)
            .map_err(|e| replay_err(k + 1, e))?;
    }
    match proof.steps.last() {
        Some(s) if s.lits.is_empty() => Ok(()),
        _ => Err(SatError::BadProof("proof does not end with the empty clause".into())),
    }
}

/// True iff the literal set satisfies every clause.
pub fn model_satisfies(clauses: &[Vec<Lit>], model: &[Lit]) -> bool {
    let set: std::collections::HashSet<Lit> = model.iter().copied().collect();
    clauses.iter().all(|c| c.iter().any(|l| set.contains(l)))
}
