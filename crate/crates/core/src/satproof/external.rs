//! Runs an external solver and re-verifies its hinted proof locally.

use std::collections::HashMap;
use std::fs;
use std::process::Command;

use super::{model_satisfies, replay_proof, ProofStep, SatError, SolveOutcome, UnsatProof};
use crate::cnf::Lit;

fn write_cnf(clauses: &[Vec<Lit>]) -> String {
    let n = clauses
        .iter()
        .flatten()
        .map(|l| l.var().index())
        .max()
        .unwrap_or(0);
    let mut s = format!("p cnf {n} {}\n", clauses.len());
    for c in clauses {
        for l in c {
            s.push_str(&l.to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}

fn parse_model(stdout: &str) -> Vec<Lit> {
    stdout
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .flat_map(|l| l.split_whitespace())
        .filter_map(|t| t.parse::<i64>().ok().and_then(Lit::new))
        .collect()
}

/// Parses `<id> <lits> 0 <hints> 0` lines, renumbering steps after the `m` input clauses.
pub(crate) fn parse_hinted_proof(text: &str, m: u64) -> Result<UnsatProof, SatError> {
    let mut remap: HashMap<u64, u64> = HashMap::new();
    let mut steps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let bad = |msg: &str| SatError::BadProof(format!("line {}: {msg}", lineno + 1));
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('c') || toks.get(1) == Some(&"d") {
            continue;
        }
        let nums: Vec<i64> = toks
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| bad(&format!("bad token `{t}`"))))
            .collect::<Result<_, _>>()?;
        let id = u64::try_from(nums[0]).map_err(|_| bad("negative step ID"))?;
        let zero = nums[1..]
            .iter()
            .position(|&x| x == 0)
            .ok_or_else(|| bad("unterminated clause"))?
            + 1;
        let lits: Vec<Lit> = nums[1..zero].iter().map(|&x| Lit::from_dimacs(x)).collect();
        let rest = &nums[zero + 1..];
        if rest.last() != Some(&0) {
            return Err(bad("unterminated hint"));
        }
        let mut hint = Vec::with_capacity(rest.len() - 1);
        for &h in &rest[..rest.len() - 1] {
            if h <= 0 {
                return Err(bad("only positive RUP hints are accepted"));
            }
            let h = h as u64;
            let mapped = if h <= m {
                h
            } else {
                *remap
                    .get(&h)
                    .ok_or_else(|| bad(&format!("hint cites unknown clause {h}")))?
            };
            hint.push(mapped);
        }
        let empty = lits.is_empty();
        remap.insert(id, m + steps.len() as u64 + 1);
        steps.push(ProofStep { lits, hint });
        if empty {
            break;
        }
    }
    Ok(UnsatProof { steps })
}

/// Runs `command` through `sh -c` after substituting `{cnf}` and `{proof}` with temporary paths.
///
/// Exit code 10 means satisfiable (model on `v` lines of standard output) and 20 means
/// unsatisfiable with a hinted proof written to `{proof}`.
pub fn external_solve(clauses: &[Vec<Lit>], command: &str) -> Result<SolveOutcome, SatError> {
    let dir = tempfile::tempdir()?;
    let cnf_path = dir.path().join("input.cnf");
    let proof_path = dir.path().join("proof.lrat");
    fs::write(&cnf_path, write_cnf(clauses))?;
    let cmd = command
        .replace("{cnf}", &cnf_path.to_string_lossy())
        .replace("{proof}", &proof_path.to_string_lossy());
    let out = Command::new("sh").arg("-c").arg(&cmd).output()?;
    match out.status.code() {
        Some(10) => {
            let model = parse_model(&String::from_utf8_lossy(&out.stdout));
            if !model_satisfies(clauses, &model) {
                return Err(SatError::BadModel);
            }
            Ok(SolveOutcome::Sat(model))
        }
        Some(20) => {
            let text = fs::read_to_string(&proof_path)?;
            let proof = parse_hinted_proof(&text, clauses.len() as u64)?;
            replay_proof(clauses, &proof)?;
            Ok(SolveOutcome::Unsat(proof))
        }
        code => Err(SatError::Subprocess(format!(
            "`{cmd}` exited with {code:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ))),
    }
}
